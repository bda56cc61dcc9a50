# src/tests/test_forms.py
from __future__ import annotations

import math

import numpy as np
import pytest

from src.chain_core import SimplicialChain, boundary
from src.errors import DegenerateInputError, DimensionMismatchError, InputFormatError, ParameterRangeError
from src.forms import (
    PolynomialForm,
    evaluate,
    exterior_derivative,
    form_norm,
    integrate,
    stokes_check,
)
from src.mass_norms import mass
from src.services.experiments import random_chain, random_form

X_DY = PolynomialForm.from_terms(1, 2, {"2": "x"})
AREA = PolynomialForm.from_terms(2, 2, {"1,2": 1})


# ============================================================
# Escenario 1: construcción de formas
# ============================================================

def test_from_terms_applies_permutation_sign():
    swapped = PolynomialForm.from_terms(2, 3, {"2,1": "x"})
    direct = PolynomialForm.from_terms(2, 3, {(1, 2): "-x"})
    assert swapped.equals(direct)
    assert PolynomialForm.from_terms(2, 3, {"1,1": 1}).is_zero


def test_from_terms_accepts_aliases_and_numbers():
    form = PolynomialForm.from_terms(1, 3, {"1": "x*y + z", "3": 2.5})
    assert set(form.to_terms()) == {"1", "3"}
    values = evaluate(form, np.array([[2.0, 3.0, 1.0]]))
    assert values[(0,)][0] == pytest.approx(7.0)
    assert values[(2,)][0] == pytest.approx(2.5)


def test_bad_coefficients_are_input_errors():
    with pytest.raises(InputFormatError):
        PolynomialForm.from_terms(1, 2, {"1": "x +"})
    with pytest.raises(InputFormatError):
        PolynomialForm.from_terms(1, 2, {"1": "w"})


def test_multi_index_must_match_degree():
    with pytest.raises(DimensionMismatchError):
        PolynomialForm.from_terms(2, 2, {"1": "x"})
    with pytest.raises(DimensionMismatchError):
        PolynomialForm(1, 2, {(0, 1): 1})


def test_arithmetic_keeps_degree():
    total = X_DY + X_DY * 2
    assert total.equals(3 * X_DY)
    assert (X_DY - X_DY).is_zero
    with pytest.raises(DimensionMismatchError):
        X_DY + AREA


# ============================================================
# Escenario 2: derivada exterior y evaluación
# ============================================================

def test_derivative_of_x_dy_is_area_form():
    assert exterior_derivative(X_DY).equals(AREA)


def test_derivative_of_y_dx_is_minus_area_form():
    y_dx = PolynomialForm.from_terms(1, 2, {"1": "y"})
    assert exterior_derivative(y_dx).equals(-AREA)


def test_dd_vanishes(rng):
    for degree, ambient in [(0, 2), (0, 3), (1, 3)]:
        form = random_form(rng, degree, ambient)
        assert exterior_derivative(exterior_derivative(form)).is_zero


def test_top_degree_has_no_derivative():
    with pytest.raises(DimensionMismatchError):
        exterior_derivative(AREA)


def test_evaluate_returns_component_values():
    values = evaluate(X_DY, np.array([[2.0, 5.0], [-1.0, 0.0]]))
    np.testing.assert_allclose(values[(1,)], [2.0, -1.0])
    with pytest.raises(DimensionMismatchError):
        evaluate(X_DY, np.zeros((1, 3)))


# ============================================================
# Escenario 3: integración exacta y Stokes
# ============================================================

def test_integral_of_monomial_over_segment():
    x2_dx = PolynomialForm.from_terms(1, 1, {"1": "x1**2"})
    segment = SimplicialChain.from_terms([(1.0, ((0.0,), (1.0,)))])
    assert integrate(x2_dx, segment) == pytest.approx(1.0 / 3.0)


def test_area_integral_follows_orientation():
    triangle = ((0.0, 0.0), (1.0, 0.0), (0.0, 1.0))
    chain = SimplicialChain.from_terms([(1.0, triangle), (-3.0, triangle)])
    assert integrate(AREA, chain) == pytest.approx(-1.0)


def test_zero_form_integrates_by_point_evaluation():
    f = PolynomialForm.from_terms(0, 2, {(): "x**2"})
    points = SimplicialChain.from_terms([(3.0, ((2.0, 0.0),)), (-1.0, ((1.0, 4.0),))])
    assert integrate(f, points) == pytest.approx(11.0)


def test_green_on_square(boundary_of_square, square):
    assert integrate(X_DY, boundary_of_square) == pytest.approx(1.0)
    assert integrate(AREA, square) == pytest.approx(1.0)
    assert stokes_check(X_DY, square) == pytest.approx(0.0, abs=1e-14)


def test_integrate_checks_dimensions(square):
    with pytest.raises(DimensionMismatchError):
        integrate(X_DY, square)
    with pytest.raises(DimensionMismatchError):
        stokes_check(AREA, square)


def test_integral_of_cubic_over_triangle_in_space():
    # ∫ x dy∧dz sobre el triángulo (0,0,0),(0,1,0),(0,0,1): x = 0
    form = PolynomialForm.from_terms(2, 3, {"2,3": "x + 1"})
    tri = SimplicialChain.from_terms([(1.0, ((0, 0, 0), (0, 1, 0), (0, 0, 1)))])
    assert integrate(form, tri) == pytest.approx(0.5)


@pytest.mark.parametrize("n, m", [(1, 2), (1, 3), (2, 2), (2, 3)])
def test_stokes_holds_on_random_pairs(rng, n, m):
    for _ in range(25):
        chain = random_chain(rng, n, m, int(rng.integers(1, 4)))
        form = random_form(rng, n - 1, m, poly_degree=3)
        interior = integrate(exterior_derivative(form), chain)
        on_boundary = integrate(form, boundary(chain))
        scale = max(1.0, abs(interior), abs(on_boundary))
        assert stokes_check(form, chain) <= 1e-9 * scale


def _subdivide(chain: SimplicialChain) -> SimplicialChain:
    a, b, c = chain.vertices[:, 0], chain.vertices[:, 1], chain.vertices[:, 2]
    ab, bc, ca = (a + b) / 2, (b + c) / 2, (c + a) / 2
    pieces = [np.stack(t, axis=1) for t in ((a, ab, ca), (ab, b, bc), (ca, bc, c), (ab, bc, ca))]
    return SimplicialChain(2, chain.m, np.tile(chain.coefs, 4), np.concatenate(pieces))


def test_degree_six_monomials_integrate_exactly():
    triangle = SimplicialChain.from_terms([(1.0, ((0.0, 0.0), (1.0, 0.0), (0.0, 1.0)))])
    # ∫ x^a y^b sobre el triángulo unidad = a! b! / (a + b + 2)!
    assert integrate(PolynomialForm.from_terms(2, 2, {"1,2": "x**6"}), triangle) == pytest.approx(1.0 / 56.0, rel=1e-12)
    assert integrate(PolynomialForm.from_terms(2, 2, {"1,2": "x**3*y**3"}), triangle) == pytest.approx(
        1.0 / 1120.0, rel=1e-12
    )


def test_degree_six_integral_matches_subdivision(rng):
    for _ in range(10):
        form = random_form(rng, 2, 2, poly_degree=6)
        chain = random_chain(rng, 2, 2, 2)
        fine = chain
        for _ in range(3):
            fine = _subdivide(fine)
        assert integrate(form, fine) == pytest.approx(integrate(form, chain), rel=1e-10, abs=1e-10)


# ============================================================
# Escenario 4: normas de formas
# ============================================================

def test_sup_norm_on_unit_box():
    assert form_norm(X_DY, 0, 0.0, [(0, 1), (0, 1)]).value == pytest.approx(1.0)
    assert form_norm(X_DY, 1, 0.0, [(0, 1), (0, 1)]).value == pytest.approx(1.0)
    x2_dy = PolynomialForm.from_terms(1, 2, {"2": "x**2"})
    assert form_norm(x2_dy, 0, 0.0, [(0, 2), (0, 2)]).value == pytest.approx(4.0)


def test_holder_part_is_added():
    value = form_norm(X_DY, 0, 0.5, [(0, 1), (0, 1)]).value
    assert value == pytest.approx(2.0, rel=1e-6)


def test_euclidean_pointwise_norm_bounds_comass():
    radial = PolynomialForm.from_terms(1, 2, {"1": "x", "2": "y"})
    box = [(0, 1), (0, 1)]
    assert form_norm(radial, 0, 0.0, box).value == pytest.approx(1.0)
    assert form_norm(radial, 0, 0.0, box, pointwise="euclidean").value == pytest.approx(math.sqrt(2.0))


def test_finer_grid_never_lowers_the_estimate():
    form = PolynomialForm.from_terms(1, 2, {"1": "x**3 - y", "2": "x*y"})
    box = [(-1, 1), (-1, 1)]
    coarse = form_norm(form, 1, 0.0, box, grid_resolution=4)
    fine = form_norm(form, 1, 0.0, box, grid_resolution=64)
    assert fine.value >= coarse.value * (1 - 0.01)


def test_zero_form_has_zero_norm():
    assert form_norm(PolynomialForm.zero(1, 2), 2, 0.3, [(0, 1), (0, 1)]).value == 0.0


def test_form_norm_parameter_checks():
    with pytest.raises(ParameterRangeError):
        form_norm(X_DY, -1, 0.0, [(0, 1), (0, 1)])
    with pytest.raises(ParameterRangeError):
        form_norm(X_DY, 0, 1.0, [(0, 1), (0, 1)])
    with pytest.raises(DimensionMismatchError):
        form_norm(X_DY, 0, 0.0, [(0, 1)])
    with pytest.raises(DegenerateInputError):
        form_norm(X_DY, 0, 0.0, [(1, 0), (0, 1)])


def test_integral_is_bounded_by_mass_times_comass(rng):
    box = [(-1.0, 1.0), (-1.0, 1.0)]
    for _ in range(20):
        chain = random_chain(rng, 1, 2, int(rng.integers(1, 4)))
        form = random_form(rng, 1, 2, poly_degree=3)
        sup = form_norm(form, 0, 0.0, box, pointwise="euclidean").value
        assert abs(integrate(form, chain)) <= mass(chain).value * sup * (1 + 1e-6) + 1e-12
