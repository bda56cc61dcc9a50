# src/tests/test_fractal_domains.py
from __future__ import annotations

import math

import numpy as np
import pytest

from src.chain_core import boundary, collect
from src.errors import ParameterRangeError, UnsupportedCaseError
from src.forms import PolynomialForm, integrate
from src.fractal_domains import (
    HARRISON_BOX_DIMENSION_RANGE,
    CurveSpec,
    binary_approximator,
    box_dimension,
    harrison_curve_chain,
    harrison_is_embedded,
    harrison_points,
    harrison_sequence,
    koch_chain,
    koch_region_chain,
    koch_sequence,
    lattice_loop_is_embedded,
    limit_integral,
    similarity_dimension,
    snowflake_curve_chain,
    snowflake_region_chain,
    spiral_chain,
    spiral_region_chain,
    spiral_sequence,
)
from src.mass_norms import mass, mass_upper_bound, projected_mass
from src.norm_bounds import natural_norm_eval

X_DY = PolynomialForm.from_terms(1, 2, {"2": "x"})
AREA = PolynomialForm.from_terms(2, 2, {"1,2": 1})
DX = PolynomialForm.from_terms(1, 2, {"1": 1})
X_0 = PolynomialForm.from_terms(0, 2, {(): "x"})


# ============================================================
# Escenario 1: curvas de Koch y copo de nieve
# ============================================================

@pytest.mark.parametrize("k", [0, 1, 3, 5])
def test_koch_chain_has_expected_size_and_length(k):
    chain = koch_chain(k)
    assert len(chain) == 4 ** k
    assert mass_upper_bound(chain) == pytest.approx((4.0 / 3.0) ** k)


def test_koch_chain_mass_is_exact_for_small_levels():
    value = mass(koch_chain(2))
    assert value.is_exact
    assert value.value == pytest.approx(16.0 / 9.0)


def test_koch_chain_runs_from_origin_to_unit_point():
    ends = collect(boundary(koch_chain(4)))
    assert integrate(X_0, ends) == pytest.approx(1.0)
    assert float(np.sum(np.abs(ends.coefs))) == pytest.approx(2.0)


@pytest.mark.parametrize("k", [1, 2, 4])
def test_koch_region_spans_the_curve(k):
    assert integrate(X_DY, koch_chain(k)) == pytest.approx(integrate(AREA, koch_region_chain(k)), abs=1e-12)


def test_koch_parameters_are_checked():
    with pytest.raises(ParameterRangeError):
        koch_chain(-1)
    with pytest.raises(ParameterRangeError):
        koch_chain(13)
    with pytest.raises(ParameterRangeError):
        koch_chain(1, scale=0.2)


def test_similarity_dimension_of_koch_family():
    assert similarity_dimension(4, 1.0 / 3.0) == pytest.approx(math.log(4) / math.log(3))
    assert CurveSpec("koch").similarity_dimension == pytest.approx(1.2618595)
    assert CurveSpec("spiral").similarity_dimension is None


@pytest.mark.parametrize("k", [0, 1, 2, 3])
def test_snowflake_region_satisfies_green(k):
    curve = integrate(X_DY, snowflake_curve_chain(k))
    region = integrate(AREA, snowflake_region_chain(k))
    assert curve == pytest.approx(region, abs=1e-12)
    assert region > 0


def test_snowflake_area_approaches_closed_form():
    limit = 2.0 * math.sqrt(3.0) / 5.0
    assert integrate(AREA, snowflake_region_chain(6)) == pytest.approx(limit, abs=5e-3)


def test_box_dimension_of_koch_curve():
    assert 1.05 <= box_dimension(koch_chain(6)) <= 1.5
    with pytest.raises(UnsupportedCaseError):
        box_dimension(koch_region_chain(1))


# ============================================================
# Escenario 2: curva autosemejante en R^3 y su testigo
# ============================================================

def test_harrison_curve_is_closed_with_expected_size():
    chain, witness = harrison_curve_chain(1)
    assert (chain.n, chain.m, len(chain)) == (1, 3, 6 * 11)
    assert collect(boundary(chain)).is_zero
    assert witness.lam == 3.0 and witness.depth == 2
    assert chain.vertices.min() >= 0.0 and chain.vertices.max() <= 1.0


@pytest.mark.parametrize("k", [0, 1, 2, 3])
def test_harrison_loop_is_embedded(k):
    assert harrison_is_embedded(k)
    points = harrison_points(k)
    assert len(points) == 6 * 11 ** k + 1


def test_lattice_loop_detects_self_intersection():
    figure_eight = np.array(
        [(0, 0), (1, 0), (1, 1), (0, 1), (0, 0), (-1, 0), (-1, -1), (0, -1), (0, 0)], dtype=float
    )
    assert not lattice_loop_is_embedded(figure_eight, 1.0)
    square = np.array([(0, 0), (1, 0), (1, 1), (0, 1), (0, 0)], dtype=float)
    assert lattice_loop_is_embedded(square * 0.25, 0.25)
    assert not lattice_loop_is_embedded(square[:-1], 1.0)


@pytest.mark.parametrize("k", [1, 2, 3])
def test_harrison_witness_respects_the_bounds(k):
    chain, witness = harrison_curve_chain(k)
    bound = natural_norm_eval(chain, 3.0, witness)
    assert bound.value < 36
    assert max(bound.plane_values) < 12
    assert max(bound.residual_masses) == pytest.approx(0.0, abs=1e-9)
    for j, node in enumerate(witness.planes, start=1):
        assert projected_mass(node.chain, j, 2.0).value < 1
        for child in node.children.planes:
            assert mass_upper_bound(child.chain) < 1


def test_harrison_box_dimension_at_finest_level():
    chain, _ = harrison_curve_chain(3)
    low, high = HARRISON_BOX_DIMENSION_RANGE
    assert low <= box_dimension(chain) <= high


def test_harrison_levels_are_limited():
    with pytest.raises(ParameterRangeError):
        harrison_curve_chain(4)
    with pytest.raises(ParameterRangeError):
        harrison_curve_chain(0)


def test_harrison_sequence_carries_its_witnesses():
    seq = harrison_sequence((1,))
    assert [k for k, _ in seq.levels] == [1]
    assert seq.spec.similarity_dimension == pytest.approx(math.log(11) / math.log(3))
    assert seq.spec.closed
    assert seq.witness_builder(1).lam == 3.0


# ============================================================
# Escenario 3: aproximadores binarios
# ============================================================

def test_binary_approximator_lives_on_the_dyadic_lattice():
    chain = binary_approximator(CurveSpec("koch", detail=4), 5)
    h = 2.0 ** -5
    coords = chain.vertices / h
    np.testing.assert_allclose(coords, np.round(coords), atol=1e-9)
    assert not chain.is_zero


def test_binary_approximator_of_polyline_keeps_endpoints():
    spec = CurveSpec("polyline", points=((0.0, 0.0), (1.0, 0.5)))
    ends = collect(boundary(binary_approximator(spec, 3)))
    assert integrate(X_0, ends) == pytest.approx(1.0)


@pytest.mark.parametrize("k", [3, 6, 10, 14])
@pytest.mark.parametrize("angle", [0.0, 0.1, math.atan(0.5), math.pi / 4, 1.3])
def test_binary_approximator_of_unit_segment_keeps_its_length(k, angle):
    start = (0.0123, 0.0371)
    end = (start[0] + math.cos(angle), start[1] + math.sin(angle))
    chain = binary_approximator(CurveSpec("polyline", points=(start, end)), k)
    assert abs(mass_upper_bound(chain) - 1.0) <= 2.0 ** (1 - k) * math.sqrt(2.0)


def test_binary_approximator_of_unit_segment_in_space():
    start = (0.1, 0.2, 0.3)
    end = (0.1 + 2.0 / 3.0, 0.2 + 1.0 / 3.0, 0.3 + 2.0 / 3.0)
    spec = CurveSpec("polyline", ambient=3, points=(start, end))
    for k in (4, 8, 12):
        chain = binary_approximator(spec, k)
        assert abs(mass_upper_bound(chain) - 1.0) <= 2.0 ** (1 - k) * math.sqrt(3.0)


@pytest.mark.parametrize(
    "spec",
    [
        CurveSpec("polyline", points=((0.1, 0.1), (0.9, 0.2), (0.7, 0.8), (0.15, 0.6), (0.1, 0.1))),
        CurveSpec("cube_replicas", ambient=3, count=11, detail=1),
    ],
)
def test_binary_approximator_of_closed_curve_is_a_cycle(spec):
    for k in (3, 6):
        chain = binary_approximator(spec, k)
        assert not chain.is_zero
        assert collect(boundary(chain)).is_zero


@pytest.mark.parametrize("k", [4, 6, 8, 10])
def test_binary_approximator_of_koch_curve_keeps_x_dy(k):
    approx = integrate(X_DY, binary_approximator(CurveSpec("koch"), k))
    assert abs(approx - integrate(X_DY, koch_chain(8))) <= 10.0 * 2.0 ** -k


def test_binary_approximator_level_is_checked():
    with pytest.raises(ParameterRangeError):
        binary_approximator(CurveSpec("koch", detail=2), 15)


# ============================================================
# Escenario 4: integrales límite
# ============================================================

def test_koch_limit_integral_converges():
    result = limit_integral(X_DY, koch_sequence(range(1, 8)), tol=1e-3)
    assert result.converged
    assert result.ratio == pytest.approx(4.0 / 9.0, rel=1e-3)
    assert result.value == pytest.approx(-math.sqrt(3.0) / 20.0, abs=1e-3)


def test_limit_integral_of_exact_form_is_endpoint_difference():
    koch = limit_integral(DX, koch_sequence(range(1, 6)))
    assert koch.integrals == pytest.approx([1.0] * 5, abs=1e-12)
    spiral = limit_integral(DX, spiral_sequence(4))
    expected = [-1.0 / math.sqrt(t) - 1.0 for t in (2, 4, 8, 16)]
    assert spiral.integrals == pytest.approx(expected, abs=1e-12)
    assert max(spiral.deltas) == pytest.approx(1.0 / math.sqrt(2.0) - 0.5, abs=1e-12)


def test_spiral_limit_integral_diverges():
    result = limit_integral(X_DY, spiral_sequence(6))
    assert result.verdict == "diverged"
    assert not result.converged


@pytest.mark.parametrize("k", [2, 8, 32])
def test_spiral_boundary_is_two_points(k):
    ends = collect(boundary(spiral_chain(k)))
    assert len(ends) == 2
    assert integrate(X_0, ends) == pytest.approx((-1.0) ** (k + 1) / math.sqrt(k) - 1.0)


def test_spiral_flat_bound_grows_without_limit():
    bounds, areas = [], []
    for k in (2, 4, 8, 16, 32, 64):
        chain, region = spiral_chain(k), spiral_region_chain(k)
        residual = collect(chain - boundary(region))
        # lo que queda tras restar los semidiscos está sobre el eje x
        assert np.all(residual.vertices[:, :, 1] == 0.0)
        assert mass(residual).value == pytest.approx(abs(1.0 - (-1.0) ** (k + 1) / math.sqrt(k)))
        areas.append(mass_upper_bound(region))
        bounds.append(mass(residual).value + areas[-1])
    assert all(b > a for a, b in zip(bounds, bounds[1:]))
    assert all(b > a for a, b in zip(areas, areas[1:]))
    assert bounds[-1] > 2.0 * bounds[0]


def test_limit_integral_input_checks():
    with pytest.raises(ParameterRangeError):
        limit_integral(X_DY, koch_sequence([1, 2]))
    with pytest.raises(UnsupportedCaseError):
        limit_integral(AREA, koch_sequence([1, 2, 3]))
