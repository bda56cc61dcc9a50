# src/tests/test_chain_core.py
from __future__ import annotations

import numpy as np
import pytest

from src.chain_core import (
    OrientedSimplex,
    SimplicialChain,
    boundary,
    canonical,
    collect,
    coordinate_planes,
    project,
    reduce,
    refine,
    simplex_mass,
)
from src.errors import (
    DegenerateInputError,
    DimensionMismatchError,
    NoBoundaryError,
    ParameterRangeError,
    UnsupportedCaseError,
)
from src.forms import PolynomialForm, integrate
from src.services.experiments import random_chain

TRIANGLE = ((0.0, 0.0), (1.0, 0.0), (0.0, 1.0))
AREA = PolynomialForm.from_terms(2, 2, {"1,2": 1})


# ============================================================
# Escenario 1: construcción y validación
# ============================================================

def test_simplex_mass_uses_gram_determinant():
    assert simplex_mass(OrientedSimplex(TRIANGLE)) == pytest.approx(0.5)
    assert simplex_mass(OrientedSimplex(((0, 0, 0), (3, 4, 0)))) == pytest.approx(5.0)
    tetra = OrientedSimplex(((0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1)))
    assert simplex_mass(tetra) == pytest.approx(1.0 / 6.0)


def test_simplex_rejects_bad_dimensions_and_non_finite_coordinates():
    with pytest.raises(DimensionMismatchError):
        OrientedSimplex(((0.0,), (1.0,), (2.0,)))
    with pytest.raises(DimensionMismatchError):
        OrientedSimplex(((0.0, 0.0), (1.0,)))
    with pytest.raises(DegenerateInputError):
        OrientedSimplex(((0.0, 0.0), (float("nan"), 1.0)))


def test_chain_drops_zero_coefficients_and_degenerate_simplices():
    collinear = ((0.0, 0.0), (1.0, 1.0), (2.0, 2.0))
    chain = SimplicialChain.from_terms([(1.0, TRIANGLE), (0.0, TRIANGLE), (2.0, collinear)])
    assert len(chain) == 1
    assert chain.coefs.tolist() == [1.0]


def test_chain_arrays_are_read_only():
    chain = SimplicialChain.from_terms([(1.0, TRIANGLE)])
    with pytest.raises(ValueError):
        chain.coefs[0] = 5.0


def test_adding_chains_of_different_dimension_fails():
    segment = SimplicialChain.from_terms([(1.0, ((0.0, 0.0), (1.0, 0.0)))])
    triangle = SimplicialChain.from_terms([(1.0, TRIANGLE)])
    with pytest.raises(DimensionMismatchError):
        segment + triangle


def test_empty_term_list_needs_explicit_dimensions():
    with pytest.raises(DimensionMismatchError):
        SimplicialChain.from_terms([])
    assert SimplicialChain.from_terms([], n=1, m=2).is_zero


# ============================================================
# Escenario 2: borde y proyecciones
# ============================================================

def test_boundary_of_triangle_is_its_three_edges():
    chain = boundary(SimplicialChain.from_terms([(2.0, TRIANGLE)]))
    assert (chain.n, chain.m, len(chain)) == (1, 2, 3)
    assert sorted(chain.coefs.tolist()) == [-2.0, 2.0, 2.0]


def test_boundary_of_zero_chain_is_undefined():
    points = SimplicialChain.from_terms([(1.0, ((0.0, 0.0),))])
    with pytest.raises(NoBoundaryError):
        boundary(points)


def test_reversed_simplex_cancels_after_collect():
    simplex = OrientedSimplex(TRIANGLE)
    chain = SimplicialChain.from_terms([(1.0, simplex), (1.0, simplex.reversed())])
    assert collect(chain).is_zero


def test_swapping_two_vertices_negates_integral_and_boundary():
    simplex = OrientedSimplex(((0.2, 0.1), (1.5, 0.3), (0.4, 1.7)))
    forward = SimplicialChain.from_simplex(simplex, 2.0)
    backward = SimplicialChain.from_simplex(simplex.reversed(), 2.0)
    assert integrate(AREA, backward) == pytest.approx(-integrate(AREA, forward))
    assert integrate(AREA, forward) == pytest.approx(2.0 * simplex_mass(simplex))
    assert collect(boundary(forward) + boundary(backward)).is_zero


def test_coordinate_planes_are_lexicographic():
    assert coordinate_planes(3, 2) == [(0, 1), (0, 2), (1, 2)]
    assert len(coordinate_planes(4, 2)) == 6


def test_project_drops_degenerate_images_and_checks_index():
    segment = SimplicialChain.from_terms([(1.0, ((0.0, 0.0), (1.0, 0.0)))])
    assert len(project(segment, 1)) == 1
    assert project(segment, 2).is_zero
    with pytest.raises(ParameterRangeError):
        project(segment, 3)


# ============================================================
# Escenario 3: refinamiento y reducción
# ============================================================

def test_overlapping_segments_reduce_to_their_difference():
    chain = SimplicialChain.from_terms([
        (1.0, ((0.0, 0.0), (2.0, 0.0))),
        (-1.0, ((1.0, 0.0), (2.0, 0.0))),
    ])
    rep, exact = canonical(chain)
    assert exact
    assert len(rep) == 1
    assert float(rep.masses.sum()) == pytest.approx(1.0)


def test_refine_splits_nested_triangles_by_the_inner_edge():
    big = ((0.0, 0.0), (2.0, 0.0), (0.0, 2.0))
    chain = SimplicialChain.from_terms([(1.0, big), (-1.0, TRIANGLE)])
    complex_ = refine(chain, chain)
    assert complex_.masses.sum() == pytest.approx(2.0)
    reduced = reduce(chain, complex_)
    assert float(np.sum(np.abs(reduced.coefs) * reduced.masses)) == pytest.approx(1.5)


def test_two_diagonal_splits_refine_to_a_four_triangle_fan():
    a, b, c, d = (0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)
    first = SimplicialChain.from_terms([(1.0, (a, b, c)), (1.0, (a, c, d))])
    second = SimplicialChain.from_terms([(1.0, (a, b, d)), (1.0, (b, c, d))])
    complex_ = refine(first, second)
    assert len(complex_) == 4
    np.testing.assert_allclose(complex_.masses, 0.25)
    for cell in complex_.cells:
        assert np.any(np.all(np.isclose(cell, 0.5), axis=1))
    assert collect(reduce(first, complex_) - reduce(second, complex_)).is_zero


def test_coplanar_overlap_reduces_to_symmetric_difference():
    chain = SimplicialChain.from_terms([
        (1.0, ((0.0, 0.0), (2.0, 0.0), (0.0, 2.0))),
        (-1.0, ((1.0, 0.0), (3.0, 0.0), (1.0, 2.0))),
    ])
    rep, exact = canonical(chain)
    assert exact
    np.testing.assert_allclose(np.abs(rep.coefs), 1.0)
    assert float(np.sum(rep.coefs * rep.masses)) == pytest.approx(0.0, abs=1e-12)
    assert float(np.sum(np.abs(rep.coefs) * rep.masses)) == pytest.approx(3.0)
    # ninguna celda queda dentro del triángulo común (1,0), (2,0), (1,1)
    centroids = rep.vertices.mean(axis=1)
    inside = (centroids[:, 0] > 1.0) & (centroids[:, 1] > 0.0) & (centroids.sum(axis=1) < 2.0)
    assert not np.any(inside)


@pytest.mark.parametrize("n", [1, 2])
def test_reduction_is_idempotent(rng, n):
    for _ in range(20):
        chain = random_chain(rng, n, 2, 4)
        rep, _ = canonical(chain)
        again, exact = canonical(rep)
        assert exact
        assert collect(again - rep).is_zero


def test_refine_is_not_available_for_tetrahedra():
    tetra = SimplicialChain.from_terms([(1.0, ((0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1)))])
    with pytest.raises(UnsupportedCaseError):
        refine(tetra, tetra)
    rep, exact = canonical(tetra)
    assert not exact and len(rep) == 1


# ============================================================
# Escenario 4: propiedades estructurales (suites aleatorias)
# ============================================================

def test_boundary_of_boundary_vanishes_on_random_chains(rng):
    for case in range(1000):
        n, m = [(2, 2), (2, 3), (3, 3)][case % 3]
        chain = random_chain(rng, n, m, int(rng.integers(1, 5)))
        assert collect(boundary(boundary(chain))).is_zero


@pytest.mark.parametrize("n, m", [(1, 2), (1, 3), (2, 3), (2, 4), (3, 4)])
def test_projected_masses_satisfy_pythagoras(rng, n, m):
    chain = SimplicialChain(n, m, np.ones(200), rng.uniform(-1.0, 1.0, size=(200, n + 1, m)))
    projected = np.zeros(len(chain))
    for plane in range(1, len(coordinate_planes(m, n)) + 1):
        image = project(chain, plane)
        assert len(image) == len(chain)
        projected += image.masses ** 2
    np.testing.assert_allclose(projected, chain.masses ** 2, rtol=1e-9, atol=1e-15)
