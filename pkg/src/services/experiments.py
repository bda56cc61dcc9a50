from __future__ import annotations

import itertools
import logging
import math
from typing import Callable, Optional, Sequence

import numpy as np

from ..chain_core import SimplicialChain, boundary, collect
from ..errors import ParameterRangeError
from ..forms import PolynomialForm, coordinate_symbols, exterior_derivative, form_norm, integrate, stokes_check
from ..fractal_domains import (
    HARRISON_BOX_DIMENSION_RANGE,
    HARRISON_LEVELS,
    box_dimension,
    harrison_curve_chain,
    harrison_is_embedded,
    koch_chain,
    koch_region_chain,
    koch_sequence,
    limit_integral,
    snowflake_curve_chain,
    snowflake_region_chain,
    spiral_region_chain,
    spiral_sequence,
)
from ..lebesgue_bridge import StepFunction, lebesgue_consistency
from ..mass_norms import mass, mass_upper_bound, natural_norm_base, projected_mass
from ..norm_bounds import (
    NormBound,
    SpanningComplex,
    SpanningWitness,
    WitnessNode,
    flat_norm_bound,
    natural_norm_eval,
    natural_norm_search,
    whitney_integral_bound,
)
from ..schemas import ExperimentReport, NormBoundOut

logger = logging.getLogger("experiments")

X_DY = PolynomialForm.from_terms(1, 2, {"2": "x"})


# ============================================================
# Constructores auxiliares
# ============================================================

def polygon_points(sides: int, radius: float = 1.0) -> np.ndarray:
    angles = 2.0 * math.pi * np.arange(sides) / sides
    return radius * np.stack([np.cos(angles), np.sin(angles)], axis=1)


def polygon_chain(sides: int, radius: float = 1.0) -> SimplicialChain:
    """Borde antihorario del polígono regular inscrito."""
    pts = polygon_points(sides, radius)
    segments = np.stack([pts, np.roll(pts, -1, axis=0)], axis=1)
    return SimplicialChain(1, 2, np.ones(sides), segments)


def disk_cells(sides: int, radius: float = 1.0, subdivide: bool = True) -> SimplicialChain:
    """Abanico antihorario del polígono; con subdivide cada triángulo se parte en 4 por los puntos medios."""
    pts = polygon_points(sides, radius)
    center = np.zeros((sides, 2))
    fan = np.stack([center, pts, np.roll(pts, -1, axis=0)], axis=1)
    if subdivide:
        a, b, c = fan[:, 0], fan[:, 1], fan[:, 2]
        ab, bc, ca = (a + b) / 2, (b + c) / 2, (c + a) / 2
        fan = np.concatenate(
            [np.stack(t, axis=1) for t in ((a, ab, ca), (ab, b, bc), (ca, bc, c), (ab, bc, ca))]
        )
    return SimplicialChain(2, 2, np.ones(len(fan)), fan)


def random_chain(rng: np.random.Generator, n: int, m: int, terms: int, spread: float = 1.0) -> SimplicialChain:
    coefs = rng.integers(-3, 4, size=terms).astype(float)
    coefs[coefs == 0] = 1.0
    verts = rng.uniform(-spread, spread, size=(terms, n + 1, m))
    return SimplicialChain(n, m, coefs, verts)


def random_form(rng: np.random.Generator, degree: int, ambient: int, poly_degree: int = 3) -> PolynomialForm:
    """Forma con coeficientes polinomiales aleatorios de grado total ≤ poly_degree en cada componente."""
    symbols = coordinate_symbols(ambient)
    terms = {}
    for index in itertools.combinations(range(1, ambient + 1), degree):
        expr = 0
        for powers in itertools.product(range(poly_degree + 1), repeat=ambient):
            if sum(powers) <= poly_degree and rng.random() < 0.5:
                coef = int(rng.integers(-4, 5))
                term = coef
                for s, p in zip(symbols, powers):
                    term = term * s ** p
                expr = expr + term
        terms[index] = expr
    return PolynomialForm.from_terms(degree, ambient, terms)


def random_step_function(rng: np.random.Generator, max_pieces: int = 10) -> StepFunction:
    count = int(rng.integers(1, max_pieces + 1))
    ends = np.sort(rng.uniform(-10.0, 10.0, size=2 * count))
    values = rng.uniform(-5.0, 5.0, size=count)
    return StepFunction.from_triples((ends[2 * i], ends[2 * i + 1], values[i]) for i in range(count))


def _bound_summary(bound: NormBound) -> dict:
    return NormBoundOut.from_bound(bound).model_dump(mode="json", by_alias=True)


# ============================================================
# Comandos sobre entradas del usuario
# ============================================================

def norm_report(
    chain: SimplicialChain,
    lam: float,
    witness: Optional[SpanningWitness] = None,
    cells: Optional[Sequence[SimplicialChain]] = None,
    budget: Optional[int] = None,
    seed: int = 0,
) -> ExperimentReport:
    """Masa/norma natural: caso base si λ ≤ n, evaluación o búsqueda de testigo si λ > n."""
    if lam <= chain.n:
        value = natural_norm_base(chain, lam)
        rows = [{"plane": i, "value": projected_mass(chain, i, lam).value}
                for i in range(1, math.comb(chain.m, chain.n) + 1)]
        return ExperimentReport(
            name="norm",
            parameters={"lambda": lam, "n": chain.n, "m": chain.m},
            rows=rows,
            summary={"value": value.value, "kind": value.kind},
            verdict="pass",
        )
    if cells:
        bound = natural_norm_search(chain, lam, SpanningComplex.from_cells(cells), budget, seed_witness=witness, seed=seed)
    else:
        bound = natural_norm_eval(chain, lam, witness)
    rows = [
        {"plane": i + 1, "residual_mass": r, "value": v}
        for i, (r, v) in enumerate(zip(bound.residual_masses, bound.plane_values))
    ]
    return ExperimentReport(
        name="norm",
        parameters={"lambda": lam, "n": chain.n, "m": chain.m, "search": bool(cells), "seed": seed},
        rows=rows,
        summary={"value": bound.value, "bound": _bound_summary(bound)},
        verdict="pass",
    )


def integrate_report(form: PolynomialForm, chain: SimplicialChain) -> ExperimentReport:
    value = integrate(form, chain)
    return ExperimentReport(
        name="integrate",
        parameters={"degree": form.degree, "ambient": form.ambient, "terms": len(chain)},
        summary={"value": value, "mass": mass(chain).value},
        verdict="pass",
    )


def stokes_report(form: PolynomialForm, chain: SimplicialChain, tol: float = 1e-9) -> ExperimentReport:
    interior = integrate(exterior_derivative(form), chain)
    on_boundary = integrate(form, boundary(chain))
    residual = stokes_check(form, chain)
    passed = residual <= tol * max(1.0, abs(interior), abs(on_boundary))
    return ExperimentReport(
        name="stokes",
        parameters={"degree": form.degree, "ambient": form.ambient, "terms": len(chain)},
        summary={"integral_d_form": interior, "integral_boundary": on_boundary, "residual": residual},
        verdict="pass" if passed else "fail",
        tolerances={"relative": tol},
    )


def flatnorm_report(
    chain: Optional[SimplicialChain] = None,
    cells: Optional[Sequence[SimplicialChain]] = None,
    expected: Optional[float] = None,
    tol: float = 0.05,
) -> ExperimentReport:
    """Sin entradas: 64-gono sobre el complejo de 256 triángulos, comparado con π."""
    if chain is None:
        chain, cells, expected = polygon_chain(64), [disk_cells(64)], math.pi
    if not cells:
        raise ParameterRangeError("flatnorm needs spanning cells when a chain is given")
    complex_ = SpanningComplex.from_cells(cells)
    bound = flat_norm_bound(chain, complex_)
    passed = True if expected is None else abs(bound.value - expected) <= tol * abs(expected)
    return ExperimentReport(
        name="flatnorm",
        parameters={"terms": len(chain), "spanning_cells": len(complex_.complex_of(chain.n + 1))},
        summary={
            "value": bound.value,
            "expected": expected,
            "residual_mass": bound.residual_masses[0],
            "mass": mass(chain).value,
        },
        verdict="pass" if passed else "fail",
        tolerances={"relative": tol},
    )


# ============================================================
# Experimentos con nombre
# ============================================================

def koch_convergence(levels: Optional[Sequence[int]] = None, tol: float = 1e-4) -> ExperimentReport:
    levels = list(levels or range(1, 10))
    seq = koch_sequence(levels)
    result = limit_integral(X_DY, seq, tol)
    # los segmentos de A_k no se solapan: la cota es la masa exacta
    masses = [mass_upper_bound(chain) for _, chain in seq.levels]
    rows = [
        {"level": k, "integral": v, "delta": (result.deltas[i - 1] if i else None), "mass": masses[i]}
        for i, (k, v) in enumerate(zip(result.levels, result.integrals))
    ]
    return ExperimentReport(
        name="koch-convergence",
        parameters={"levels": levels, "form": "x dy"},
        rows=rows,
        summary={"value": result.value, "ratio": result.ratio, "verdict": result.verdict},
        verdict="pass" if result.converged and result.ratio < 1 else "fail",
        tolerances={"tol": tol},
    )


def harrison_bound(levels: Optional[Sequence[int]] = None) -> ExperimentReport:
    """
    Desigualdades del testigo por nivel: M_2(π_j C_j) < 1, M_3(D_ij) < 1, aporte
    por plano < 12 y total < 36. Además el lazo debe ser embebido y, en el
    nivel más fino, la dimensión por cajas debe caer en el rango esperado.
    """
    levels = list(levels or HARRISON_LEVELS)
    low, high = HARRISON_BOX_DIMENSION_RANGE
    rows = []
    passed = True
    for k in levels:
        chain, witness = harrison_curve_chain(k)
        bound = natural_norm_eval(chain, 3.0, witness)
        cone_masses = [projected_mass(node.chain, j, 2.0).value for j, node in enumerate(witness.planes, start=1)]
        volumes = [
            mass(child.chain).value
            for node in witness.planes
            for child in node.children.planes
            if not child.chain.is_zero
        ]
        row = {
            "level": k,
            "segments": len(chain),
            "value": bound.value,
            "max_plane_value": max(bound.plane_values),
            "max_projected_cone_mass": max(cone_masses),
            "max_volume": max(volumes, default=0.0),
            "embedded": harrison_is_embedded(k),
            "box_dimension": box_dimension(chain),
        }
        ok = (
            row["value"] < 36
            and row["max_plane_value"] < 12
            and row["max_projected_cone_mass"] < 1
            and row["max_volume"] < 1
            and row["embedded"]
        )
        if k == max(HARRISON_LEVELS):
            ok = ok and low <= row["box_dimension"] <= high
        row["holds"] = ok
        passed = passed and ok
        rows.append(row)
        logger.info(f"harrison level {k}: bound {bound.value:.6g}, box dimension {row['box_dimension']:.4f}")
    return ExperimentReport(
        name="harrison-bound",
        parameters={"levels": levels, "lambda": 3.0},
        rows=rows,
        summary={"max_value": max(r["value"] for r in rows)},
        verdict="pass" if passed else "fail",
        tolerances={"total": 36.0, "plane": 12.0, "mass": 1.0, "box_dimension_min": low, "box_dimension_max": high},
    )


def spiral_divergence(doublings: int = 8, tol: float = 1e-4) -> ExperimentReport:
    """
    ∫ x dy diverge a lo largo de las truncaciones y la cota plana
    M_1(A_k - ∂C_k) + M_2(C_k) con los semidiscos C_k crece sin límite,
    como Σ π r_n²/2 ~ Σ 1/n, mientras ∂A_k sigue siendo un par de puntos.
    """
    seq = spiral_sequence(doublings)
    result = limit_integral(X_DY, seq, tol)
    rows = []
    for (k, chain), integral in zip(seq.levels, result.integrals):
        region = spiral_region_chain(k)
        residual = mass(chain - boundary(region)).value
        # semidiscos con la misma orientación: la suma simple es la masa reducida
        area = mass_upper_bound(region)
        rows.append({
            "truncation": k,
            "integral": integral,
            "mass": mass(chain).value,
            "enclosed_area": area,
            "axis_residual": residual,
            "flat_bound": residual + area,
            "boundary_points": len(collect(boundary(chain))),
        })
    growing = all(b["flat_bound"] > a["flat_bound"] and b["enclosed_area"] > a["enclosed_area"]
                  for a, b in zip(rows, rows[1:]))
    two_points = all(r["boundary_points"] == 2 for r in rows)
    diverged = result.verdict == "diverged" and growing and two_points
    return ExperimentReport(
        name="spiral-divergence",
        parameters={"doublings": doublings, "form": "x dy"},
        rows=rows,
        summary={"ratio": result.ratio, "deltas": list(result.deltas), "flat_bound_growing": growing},
        verdict="diverged" if diverged else "fail",
        tolerances={"tol": tol},
    )


def snowflake_stokes(
    levels: Optional[Sequence[int]] = None, tol: float = 1e-9, form: Optional[PolynomialForm] = None
) -> ExperimentReport:
    levels = list(levels or range(0, 7))
    form = form or X_DY
    d_form = exterior_derivative(form)
    rows = []
    for k in levels:
        curve = integrate(form, snowflake_curve_chain(k))
        region = integrate(d_form, snowflake_region_chain(k))
        rows.append({"level": k, "boundary_integral": curve, "region_integral": region, "residual": abs(curve - region)})
    deltas = np.abs(np.diff([r["region_integral"] for r in rows]))
    converging = bool(len(deltas) < 2 or np.all(np.diff(deltas) <= 1e-15))
    passed = all(r["residual"] <= tol for r in rows) and converging
    return ExperimentReport(
        name="snowflake-stokes",
        parameters={"levels": levels, "form": form.to_terms()},
        rows=rows,
        summary={"max_residual": max(r["residual"] for r in rows), "converging": converging},
        verdict="pass" if passed else "fail",
        tolerances={"residual": tol},
    )


def lebesgue_report(
    function: Optional[StepFunction] = None, cases: int = 100, seed: int = 0, tol: float = 1e-12
) -> ExperimentReport:
    rng = np.random.default_rng(seed)
    functions = [function] if function is not None else [random_step_function(rng) for _ in range(cases)]
    rows = []
    for i, f in enumerate(functions):
        closed, area, graph = lebesgue_consistency(f)
        rows.append({
            "case": i,
            "pieces": len(f.pieces),
            "closed_form": closed,
            "area_integral": area,
            "boundary_integral": graph,
            "discrepancy": max(abs(closed - area), abs(closed - graph)),
        })
    worst = max(r["discrepancy"] for r in rows)
    return ExperimentReport(
        name="lebesgue",
        parameters={"cases": len(rows), "seed": seed},
        rows=rows,
        summary={"max_discrepancy": worst},
        verdict="pass" if worst <= tol else "fail",
        tolerances={"absolute": tol},
    )


def koch_ratio(levels: Optional[Sequence[int]] = None) -> ExperimentReport:
    """|∫_{A_k} x dy| / (|A_k|^♮_2 · ‖x dy‖_1) acotado mientras M_1(A_k) crece como (4/3)^k."""
    levels = list(levels or range(1, 9))
    rows = []
    for k in levels:
        chain = koch_chain(k)
        witness = SpanningWitness(2.0, (WitnessNode(koch_region_chain(k)),))
        bound = natural_norm_eval(chain, 2.0, witness)
        pts = chain.vertices.reshape(-1, 2)
        box = list(zip(pts.min(axis=0), pts.max(axis=0)))
        norm = form_norm(X_DY, 1, 0.0, box).value
        integral = integrate(X_DY, chain)
        rows.append({
            "level": k,
            "integral": integral,
            "natural_bound": bound.value,
            "form_norm": norm,
            "ratio": abs(integral) / (bound.value * norm),
            "mass": mass_upper_bound(chain),
        })
    first = rows[0]["ratio"]
    passed = all(r["ratio"] <= 2.0 * first for r in rows)
    return ExperimentReport(
        name="koch-ratio",
        parameters={"levels": levels, "lambda": 2.0, "form": "x dy"},
        rows=rows,
        summary={"first_ratio": first, "max_ratio": max(r["ratio"] for r in rows)},
        verdict="pass" if passed else "fail",
        tolerances={"ratio_growth": 2.0},
    )


def whitney_inequality(cases: int = 100, seed: int = 0, slack: float = 1e-9) -> ExperimentReport:
    rng = np.random.default_rng(seed)
    rows = []
    for i in range(cases):
        chain = random_chain(rng, 1, 2, int(rng.integers(1, 4)))
        spanning = random_chain(rng, 2, 2, int(rng.integers(1, 3)), spread=0.5)
        form = random_form(rng, 1, 2, poly_degree=int(rng.integers(0, 4)))
        integral = integrate(form, chain)
        bound = whitney_integral_bound(chain, spanning, form)
        rows.append({"case": i, "integral": integral, "bound": bound, "holds": abs(integral) <= bound + slack})
    violations = sum(1 for r in rows if not r["holds"])
    return ExperimentReport(
        name="whitney-inequality",
        parameters={"cases": cases, "seed": seed},
        rows=rows,
        summary={"violations": violations},
        verdict="pass" if violations == 0 else "fail",
        tolerances={"slack": slack},
    )


EXPERIMENTS: dict[str, Callable[..., ExperimentReport]] = {
    "koch-convergence": koch_convergence,
    "harrison-bound": harrison_bound,
    "spiral-divergence": spiral_divergence,
    "snowflake-stokes": snowflake_stokes,
    "lebesgue": lebesgue_report,
    "flatnorm": flatnorm_report,
    "koch-ratio": koch_ratio,
    "whitney-inequality": whitney_inequality,
}
