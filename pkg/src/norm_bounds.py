from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Iterable, Literal, Optional

import numpy as np

from . import config
from .chain_core import (
    SimplicialChain,
    SimplicialComplex,
    _vertex_set_keys,
    boundary,
    cell_coefficients,
    coordinate_planes,
    simplex_masses,
)
from .errors import (
    DimensionMismatchError,
    GeometryError,
    NotRepresentableError,
    ParameterRangeError,
    UnsupportedCaseError,
)
from .mass_norms import mass, natural_norm_base, projected_mass
from .services.simplex_solver import solve_lp

logger = logging.getLogger("norm_bounds")


# ============================================================
# Complejo generador
# ============================================================

@dataclass(frozen=True, eq=False)
class SpanningComplex:
    """
    Celdas por dimensión (todas las caras incluidas) y matrices de
    incidencia enteras: incidence[k] relaciona k-celdas (columnas) con sus
    (k-1)-caras (filas).
    """
    m: int
    cells: dict[int, SimplicialComplex]
    incidence: dict[int, np.ndarray] = field(default_factory=dict)

    @classmethod
    def from_cells(cls, chains: Iterable[SimplicialChain]) -> "SpanningComplex":
        """Construye el complejo a partir de las celdas superiores dadas (cualquier dimensión)."""
        given: dict[int, list[np.ndarray]] = {}
        m: int | None = None
        for chain in chains:
            if m is not None and chain.m != m:
                raise DimensionMismatchError("All spanning cells must share the ambient dimension")
            m = chain.m
            given.setdefault(chain.n, []).extend(list(chain.vertices))
        if m is None or not given:
            raise DimensionMismatchError("A spanning complex needs at least one cell")
        top = max(given)
        cells: dict[int, list[np.ndarray]] = {}
        index: dict[int, dict[tuple, tuple[int, float]]] = {}
        incidence_entries: dict[int, list[tuple[int, int, float]]] = {}

        def add(dim: int, verts: np.ndarray) -> tuple[int, float]:
            key, sign, _ = _vertex_set_keys(verts[None])[0]
            table = index.setdefault(dim, {})
            if key in table:
                idx, stored_sign = table[key]
                return idx, sign * stored_sign
            bucket = cells.setdefault(dim, [])
            table[key] = (len(bucket), sign)
            bucket.append(verts)
            return len(bucket) - 1, 1.0

        for dim in range(top, -1, -1):
            for verts in given.get(dim, []):
                add(dim, verts)
            if dim == 0:
                break
            for col, verts in enumerate(cells.get(dim, [])):
                for i in range(dim + 1):
                    row, rel = add(dim - 1, np.delete(verts, i, axis=0))
                    incidence_entries.setdefault(dim, []).append((row, col, (-1.0) ** i * rel))

        complexes = {
            dim: SimplicialComplex(dim, m, np.array(vs).reshape(-1, dim + 1, m)) for dim, vs in cells.items()
        }
        incidence: dict[int, np.ndarray] = {}
        for dim, entries in incidence_entries.items():
            mat = np.zeros((len(complexes[dim - 1]), len(complexes[dim])))
            for row, col, val in entries:
                mat[row, col] += val
            incidence[dim] = mat
        for dim in incidence:
            if dim - 1 in incidence and np.any(incidence[dim - 1] @ incidence[dim] != 0):
                raise GeometryError(f"Incidence matrices violate ∂∂ = 0 at dimension {dim}")
        return cls(m, complexes, incidence)

    def complex_of(self, dim: int) -> SimplicialComplex:
        return self.cells.get(dim, SimplicialComplex(dim, self.m, np.zeros((0, dim + 1, self.m))))

    def coefficients(self, chain: SimplicialChain) -> np.ndarray:
        cells = self.complex_of(chain.n)
        if chain.is_zero:
            return np.zeros(len(cells))
        if not len(cells):
            raise NotRepresentableError(f"The complex has no {chain.n}-cells to represent the chain")
        return cell_coefficients(chain, cells)


# ============================================================
# Testigos y cotas
# ============================================================

@dataclass(frozen=True)
class WitnessNode:
    chain: SimplicialChain
    children: Optional["SpanningWitness"] = None


@dataclass(frozen=True)
class SpanningWitness:
    """Árbol de cadenas generadoras: un nodo por plano coordenado (o uno compartido)."""
    lam: float
    planes: tuple[WitnessNode, ...]

    @property
    def depth(self) -> int:
        child_depths = [node.children.depth for node in self.planes if node.children is not None]
        return 1 + max(child_depths, default=0)


@dataclass(frozen=True)
class NormBound:
    value: float
    witness: SpanningWitness
    residual_masses: tuple[float, ...]
    plane_values: tuple[float, ...]
    lam: float
    kind: Literal["flat", "natural"] = "natural"


def zero_witness(chain: SimplicialChain, lam: float) -> SpanningWitness:
    return SpanningWitness(lam, (WitnessNode(SimplicialChain.zero(chain.n + 1, chain.m)),))


def _expand_planes(witness: SpanningWitness, count: int) -> tuple[WitnessNode, ...]:
    if len(witness.planes) == count:
        return witness.planes
    if len(witness.planes) == 1:
        return witness.planes * count
    raise DimensionMismatchError(f"Witness has {len(witness.planes)} planes, expected 1 or {count}")


# ============================================================
# Norma plana de Whitney
# ============================================================

def flat_norm_eval(chain: SimplicialChain, spanning: SimplicialChain) -> tuple[float, float]:
    """(M_n(A - ∂C) + M_{n+1}(C), M_n(A - ∂C))."""
    if spanning.is_zero:
        residual = mass(chain).value
        return residual, residual
    if (spanning.n, spanning.m) != (chain.n + 1, chain.m):
        raise DimensionMismatchError("Spanning chain must have dimension n+1 in the same ambient space")
    residual = mass(chain - boundary(spanning)).value
    return residual + mass(spanning).value, residual


def _l1_program(x: np.ndarray, inc: np.ndarray, w_res: np.ndarray, w_span: np.ndarray) -> np.ndarray:
    """
    min Σ w_res|x - inc·c| + Σ w_span|c| con variables partidas:
    s⁺ - s⁻ + inc·u⁺ - inc·u⁻ = x.
    """
    rows, cols = inc.shape
    eye = np.eye(rows)
    a_eq = np.hstack([eye, -eye, inc, -inc])
    cost = np.concatenate([w_res, w_res, w_span, w_span])
    result = solve_lp(cost, a_eq, x)
    u = result.x[2 * rows:]
    coefs = u[:cols] - u[cols:]
    coefs[np.abs(coefs) < config.LP_TOL] = 0.0
    return coefs


def flat_norm_bound(chain: SimplicialChain, complex_: SpanningComplex) -> NormBound:
    """Cota de |A|^♭ exacta relativa al complejo: LP sobre las (n+1)-celdas."""
    n = chain.n
    top = complex_.complex_of(n + 1)
    if len(top) == 0:
        spanning = SimplicialChain.zero(n + 1, chain.m)
    else:
        x = complex_.coefficients(chain)
        coefs = _l1_program(x, complex_.incidence[n + 1], complex_.complex_of(n).masses, top.masses)
        spanning = top.as_chain(coefs)
    value, residual = flat_norm_eval(chain, spanning)
    logger.info(f"flat norm bound {value:.6g} over {len(top)} spanning cells")
    return NormBound(
        value=value,
        witness=SpanningWitness(float(n + 1), (WitnessNode(spanning),)),
        residual_masses=(residual,),
        plane_values=(value,),
        lam=float(n + 1),
        kind="flat",
    )


# ============================================================
# Norma λ-natural: evaluación de testigos
# ============================================================

def _chain_norm(spanning: SimplicialChain, lam: float, children: Optional[SpanningWitness]) -> float:
    if spanning.is_zero:
        return 0.0
    if lam <= spanning.n:
        if children is not None and any(not node.chain.is_zero for node in children.planes):
            raise DimensionMismatchError(
                f"Witness is deeper than the recursion: lambda={lam} is a base case for n={spanning.n}"
            )
        return natural_norm_base(spanning, lam).value
    return natural_norm_eval(spanning, lam, children).value


def natural_norm_eval(
    chain: SimplicialChain, lam: float, witness: Optional[SpanningWitness] = None
) -> NormBound:
    """
    Σ_i [M_{n,π_i}(A - ∂C_i) + |C_i|^♮_λ], recursivo hasta el caso base
    λ ≤ dim(C). Sin testigo se usa C = 0 en todos los planos.
    """
    n, m = chain.n, chain.m
    if not n < lam <= m:
        raise ParameterRangeError(f"natural_norm_eval needs n < lambda <= m (n={n}, m={m}, lambda={lam})")
    if witness is None:
        witness = zero_witness(chain, lam)
    if witness.lam != lam:
        raise DimensionMismatchError(f"Witness built for lambda={witness.lam}, evaluated at {lam}")
    planes = coordinate_planes(m, n)
    nodes = _expand_planes(witness, len(planes))
    residuals: list[float] = []
    plane_values: list[float] = []
    for i, node in enumerate(nodes, start=1):
        spanning = node.chain
        if spanning.is_zero:
            residual_chain = chain
        else:
            if (spanning.n, spanning.m) != (n + 1, m):
                raise DimensionMismatchError(
                    f"Witness chain at plane {i} has dimension ({spanning.n}, {spanning.m}), "
                    f"expected ({n + 1}, {m})"
                )
            residual_chain = chain - boundary(spanning)
        residual = projected_mass(residual_chain, i, float(n)).value
        residuals.append(residual)
        plane_values.append(residual + _chain_norm(spanning, lam, node.children))
    return NormBound(
        value=float(sum(plane_values)),
        witness=witness,
        residual_masses=tuple(residuals),
        plane_values=tuple(plane_values),
        lam=lam,
    )


# ============================================================
# Norma λ-natural: búsqueda de testigos sobre un complejo
# ============================================================

def _plane_weights(cells: SimplicialComplex, exponent: float) -> np.ndarray:
    """M(π_j ρ)^exponent para cada plano coordenado j de dimensión cells.n (filas) y celda ρ."""
    planes = coordinate_planes(cells.m, cells.n)
    if not len(cells):
        return np.zeros((len(planes), 0))
    out = np.array([simplex_masses(cells.cells[:, :, list(axes)]) for axes in planes])
    return np.power(np.clip(out, 0.0, None), exponent)


def _sparse_columns(mat: np.ndarray) -> list[tuple[np.ndarray, np.ndarray]]:
    cols = []
    for j in range(mat.shape[1]):
        rows = np.nonzero(mat[:, j])[0]
        cols.append((rows, mat[rows, j]))
    return cols


class _GreedyPlane:
    """
    Descenso por coordenadas con valores en {-1, 0, 1} para un plano:
    Σ w|x - B1 c| + Σ_j [Σ u_j|c - B2 d_j| + Σ z|d_j|].
    Los residuos se actualizan de forma incremental.
    """

    def __init__(self, x, b1, b2, w, u, z):
        self.x, self.w, self.u, self.z = x, w, u, z
        self.cols1 = _sparse_columns(b1)
        self.cols2 = _sparse_columns(b2)
        self.b1, self.b2 = b1, b2
        self.planes = u.shape[0]

    def objective(self, c: np.ndarray, d: np.ndarray) -> float:
        r1 = self.x - self.b1 @ c
        r2 = c[None, :] - d @ self.b2.T
        return float(self.w @ np.abs(r1) + np.sum(self.u * np.abs(r2)) + np.sum(self.z[None, :] * np.abs(d)))

    def descend(self, c: np.ndarray, d: np.ndarray, max_sweeps: int = 50) -> tuple[np.ndarray, np.ndarray, float]:
        c, d = c.astype(float).copy(), d.astype(float).copy()
        r1 = self.x - self.b1 @ c
        r2 = c[None, :] - d @ self.b2.T
        for _ in range(max_sweeps):
            improved = False
            for rho, (rows, vals) in enumerate(self.cols1):
                best_delta, best_step = -1e-12, 0.0
                for target in (-1.0, 0.0, 1.0):
                    step = target - c[rho]
                    if step == 0.0:
                        continue
                    new_r1 = r1[rows] - step * vals
                    delta = float(self.w[rows] @ (np.abs(new_r1) - np.abs(r1[rows])))
                    col = r2[:, rho]
                    delta += float(self.u[:, rho] @ (np.abs(col + step) - np.abs(col)))
                    if delta < best_delta:
                        best_delta, best_step = delta, step
                if best_step:
                    c[rho] += best_step
                    r1[rows] -= best_step * vals
                    r2[:, rho] += best_step
                    improved = True
            for j in range(self.planes):
                for kappa, (rows, vals) in enumerate(self.cols2):
                    best_delta, best_step = -1e-12, 0.0
                    for target in (-1.0, 0.0, 1.0):
                        step = target - d[j, kappa]
                        if step == 0.0:
                            continue
                        new_r2 = r2[j, rows] - step * vals
                        delta = float(self.u[j, rows] @ (np.abs(new_r2) - np.abs(r2[j, rows])))
                        delta += self.z[kappa] * (abs(target) - abs(d[j, kappa]))
                        if delta < best_delta:
                            best_delta, best_step = delta, step
                    if best_step:
                        d[j, kappa] += best_step
                        r2[j, rows] -= best_step * vals
                        improved = True
            if not improved:
                break
        return c, d, self.objective(c, d)


def _seed_vectors(
    seed: Optional[SpanningWitness], plane_count: int, complex_: SpanningComplex, n: int
) -> list[tuple[np.ndarray, list[np.ndarray]]]:
    """Coeficientes iniciales (C_i, [D_ij]) sobre las celdas del complejo; ceros si no hay semilla."""
    spanning_cells = complex_.complex_of(n + 1)
    upper_cells = complex_.complex_of(n + 2)
    zero = [(np.zeros(len(spanning_cells)), []) for _ in range(plane_count)]
    if seed is None:
        return zero
    try:
        out = []
        for node in _expand_planes(seed, plane_count):
            c = complex_.coefficients(node.chain) if not node.chain.is_zero else np.zeros(len(spanning_cells))
            ds = []
            if node.children is not None and len(upper_cells):
                child_count = len(coordinate_planes(complex_.m, n + 1))
                for child in _expand_planes(node.children, child_count):
                    ds.append(
                        complex_.coefficients(child.chain) if not child.chain.is_zero else np.zeros(len(upper_cells))
                    )
            out.append((c, ds))
        return out
    except NotRepresentableError as exc:
        logger.warning(f"seed witness is not representable on the complex, starting from zero: {exc}")
        return zero


def natural_norm_search(
    chain: SimplicialChain,
    lam: float,
    complex_: SpanningComplex,
    budget: Optional[int] = None,
    *,
    seed_witness: Optional[SpanningWitness] = None,
    seed: int = 0,
) -> NormBound:
    """
    Busca testigos sobre las celdas del complejo y devuelve la mejor cota
    evaluada. Con λ ≤ n+1 cada plano es un LP exacto; con n+1 < λ ≤ n+2 se
    usa descenso por coordenadas con `budget` reinicios sembrados. El
    resultado nunca supera la evaluación del testigo nulo ni la de la semilla.
    """
    budget = config.SEARCH_BUDGET if budget is None else budget
    if budget <= 0:
        raise ParameterRangeError(f"Search budget must be positive (got {budget})")
    n, m = chain.n, chain.m
    if not n < lam <= m:
        raise ParameterRangeError(f"natural_norm_search needs n < lambda <= m (n={n}, m={m}, lambda={lam})")
    depth = math.ceil(lam - n)
    if depth > 2:
        raise UnsupportedCaseError(f"Witness search supports lambda <= n + 2 (lambda={lam}, n={n})")

    planes = coordinate_planes(m, n)
    x = complex_.coefficients(chain)
    residual_weights = _plane_weights(complex_.complex_of(n), 1.0)
    spanning_cells = complex_.complex_of(n + 1)
    seeds = _seed_vectors(seed_witness, len(planes), complex_, n)
    nodes: list[WitnessNode] = []

    if depth == 1:
        span_weights = _plane_weights(spanning_cells, lam / (n + 1)).sum(axis=0)
        for i in range(len(planes)):
            if not len(spanning_cells):
                coefs = np.zeros(0)
            else:
                coefs = _l1_program(x, complex_.incidence[n + 1], residual_weights[i], span_weights)
            nodes.append(WitnessNode(spanning_cells.as_chain(coefs)))
            logger.debug(f"plane {i + 1}: LP witness with {int(np.count_nonzero(coefs))} cells")
    else:
        upper_cells = complex_.complex_of(n + 2)
        child_planes = coordinate_planes(m, n + 1)
        u = _plane_weights(spanning_cells, 1.0)
        z = _plane_weights(upper_cells, lam / (n + 2)).sum(axis=0)
        b1 = complex_.incidence.get(n + 1, np.zeros((len(x), 0)))
        b2 = complex_.incidence.get(n + 2, np.zeros((len(spanning_cells), 0)))
        rng = np.random.default_rng(seed)
        for i in range(len(planes)):
            greedy = _GreedyPlane(x, b1, b2, residual_weights[i], u, z)
            c0, ds0 = seeds[i]
            d0 = np.array(ds0) if ds0 else np.zeros((len(child_planes), len(upper_cells)))
            best_c, best_d, best = greedy.descend(c0, d0)
            for restart in range(1, budget):
                c_try, d_try = best_c.copy(), best_d.copy()
                flat = np.concatenate([c_try, d_try.reshape(-1)])
                if not len(flat):
                    break
                picks = rng.choice(len(flat), size=max(1, len(flat) // 10), replace=False)
                flat[picks] = rng.integers(-1, 2, size=len(picks))
                c_try = flat[: len(c_try)]
                d_try = flat[len(c_try):].reshape(d_try.shape)
                c_new, d_new, value = greedy.descend(c_try, d_try)
                if value < best - 1e-12:
                    best_c, best_d, best = c_new, d_new, value
            logger.debug(f"plane {i + 1}: greedy objective {best:.6g} after {budget} starts")
            children = SpanningWitness(
                lam, tuple(WitnessNode(upper_cells.as_chain(best_d[j])) for j in range(len(child_planes)))
            )
            nodes.append(WitnessNode(spanning_cells.as_chain(best_c), children))

    candidates = [natural_norm_eval(chain, lam, SpanningWitness(lam, tuple(nodes)))]
    candidates.append(natural_norm_eval(chain, lam, None))
    if seed_witness is not None:
        candidates.append(natural_norm_eval(chain, lam, seed_witness))
    result = min(candidates, key=lambda bound: bound.value)
    logger.info(f"natural norm search (lambda={lam}, depth={depth}): bound {result.value:.6g}")
    return result


# ============================================================
# Desigualdad de integración
# ============================================================

def whitney_integral_bound(chain: SimplicialChain, spanning: SimplicialChain, form) -> float:
    """
    M_n(A - ∂C)·‖ω‖₀ + M_{n+1}(C)·‖dω‖₀ con normas sup (euclídeas por punto)
    sobre la caja que contiene a A y a C. Acota |∫_A ω| para todo C.
    """
    from .forms import exterior_derivative, form_norm

    if form.degree != chain.n or form.ambient != chain.m:
        raise DimensionMismatchError(
            f"Form of degree {form.degree} in R^{form.ambient} against a ({chain.n}, {chain.m}) chain"
        )
    points = [chain.vertices.reshape(-1, chain.m)]
    if not spanning.is_zero:
        points.append(spanning.vertices.reshape(-1, spanning.m))
    stacked = np.concatenate(points)
    if not len(stacked):
        return 0.0
    box = list(zip(stacked.min(axis=0), stacked.max(axis=0)))
    total, residual = flat_norm_eval(chain, spanning)
    bound = residual * form_norm(form, 0, 0.0, box, pointwise="euclidean").value
    if not spanning.is_zero:
        bound += (total - residual) * form_norm(exterior_derivative(form), 0, 0.0, box, pointwise="euclidean").value
    return float(bound)
