from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass, field
from functools import lru_cache
from tokenize import TokenError
from typing import Literal, Mapping, Sequence, Union

import numpy as np
import sympy
from sympy.parsing.sympy_parser import parse_expr

from . import config
from .chain_core import SimplicialChain, boundary
from .errors import DegenerateInputError, DimensionMismatchError, InputFormatError, ParameterRangeError

logger = logging.getLogger("forms")

MultiIndex = tuple[int, ...]
Coefficient = Union[str, float, int, sympy.Expr, sympy.Poly]
Pointwise = Literal["max", "euclidean"]

_ALIASES = ("x", "y", "z")


@lru_cache(maxsize=None)
def coordinate_symbols(m: int) -> tuple[sympy.Symbol, ...]:
    """x1, ..., xm (con alias x, y, z al parsear cuando m ≤ 3)."""
    return tuple(sympy.Symbol(f"x{i}", real=True) for i in range(1, m + 1))


def _parse(value: Coefficient, m: int) -> sympy.Poly:
    symbols = coordinate_symbols(m)
    if isinstance(value, sympy.Poly):
        expr = value.as_expr()
    elif isinstance(value, str):
        local = {str(s): s for s in symbols}
        local.update({alias: symbols[i] for i, alias in enumerate(_ALIASES[:m])})
        try:
            expr = parse_expr(value, local_dict=local)
        except (SyntaxError, TypeError, TokenError, sympy.SympifyError) as exc:
            raise InputFormatError(f"Cannot parse polynomial coefficient {value!r}: {exc}") from exc
    else:
        expr = sympy.sympify(value)
    stray = expr.free_symbols - set(symbols)
    if stray:
        raise InputFormatError(f"Unknown variables {sorted(map(str, stray))} in a form on R^{m}")
    try:
        return sympy.Poly(expr, *symbols)
    except sympy.PolynomialError as exc:
        raise InputFormatError(f"Coefficient {value!r} is not a polynomial") from exc


def _sorted_index(index: Sequence[int]) -> tuple[MultiIndex, int]:
    """Ordena un multi-índice y devuelve el signo de la permutación (0 si hay repetidos)."""
    if len(set(index)) != len(index):
        return tuple(index), 0
    order = sorted(range(len(index)), key=lambda k: index[k])
    inversions = sum(1 for a in range(len(order)) for b in range(a + 1, len(order)) if order[a] > order[b])
    return tuple(index[k] for k in order), -1 if inversions % 2 else 1


@dataclass(frozen=True, eq=False)
class PolynomialForm:
    """
    ω = Σ_I p_I dx_I con multi-índices crecientes (base 0) y coeficientes
    polinomiales de sympy en x1..xm. Los componentes nulos se descartan.
    """
    degree: int
    ambient: int
    components: Mapping[MultiIndex, sympy.Poly] = field(default_factory=dict)

    def __post_init__(self):
        if not 0 <= self.degree <= self.ambient:
            raise DimensionMismatchError(f"Invalid form degree {self.degree} in R^{self.ambient}")
        clean: dict[MultiIndex, sympy.Poly] = {}
        for index, poly in self.components.items():
            index = tuple(int(i) for i in index)
            if len(index) != self.degree or any(not 0 <= i < self.ambient for i in index):
                raise DimensionMismatchError(f"Multi-index {index} invalid for a {self.degree}-form in R^{self.ambient}")
            if list(index) != sorted(set(index)):
                raise DimensionMismatchError(f"Multi-index {index} must be strictly increasing")
            poly = _parse(poly, self.ambient)
            if not poly.is_zero:
                clean[index] = poly
        object.__setattr__(self, "components", dict(sorted(clean.items())))

    # ------------------------------------------------------------
    # Constructores
    # ------------------------------------------------------------
    @classmethod
    def zero(cls, degree: int, ambient: int) -> "PolynomialForm":
        return cls(degree, ambient, {})

    @classmethod
    def from_terms(
        cls, degree: int, ambient: int, terms: Mapping[Union[str, Sequence[int]], Coefficient]
    ) -> "PolynomialForm":
        """
        Construye la forma desde índices en base 1 ("1,2" o (1, 2)) en cualquier
        orden; el signo de la permutación se aplica y los índices repetidos se anulan.
        """
        acc: dict[MultiIndex, sympy.Poly] = {}
        for raw_index, coefficient in terms.items():
            if isinstance(raw_index, str):
                parts = [p for p in raw_index.replace(" ", "").split(",") if p]
                try:
                    index = [int(p) - 1 for p in parts]
                except ValueError as exc:
                    raise InputFormatError(f"Bad multi-index {raw_index!r}") from exc
            else:
                index = [int(i) - 1 for i in raw_index]
            if len(index) != degree:
                raise DimensionMismatchError(f"Multi-index {raw_index!r} has length {len(index)}, expected {degree}")
            key, sign = _sorted_index(index)
            if sign == 0:
                continue
            poly = _parse(coefficient, ambient) * sign
            acc[key] = acc[key] + poly if key in acc else poly
        return cls(degree, ambient, acc)

    # ------------------------------------------------------------
    # Acceso y aritmética
    # ------------------------------------------------------------
    @property
    def symbols(self) -> tuple[sympy.Symbol, ...]:
        return coordinate_symbols(self.ambient)

    @property
    def is_zero(self) -> bool:
        return not self.components

    def to_terms(self) -> dict[str, str]:
        """Componentes con índices en base 1, p. ej. {"1,2": "x1**2"}."""
        return {",".join(str(i + 1) for i in index): str(poly.as_expr()) for index, poly in self.components.items()}

    def _check_compatible(self, other: "PolynomialForm") -> None:
        if (self.degree, self.ambient) != (other.degree, other.ambient):
            raise DimensionMismatchError(
                f"Cannot combine forms of degree {self.degree} in R^{self.ambient} "
                f"and degree {other.degree} in R^{other.ambient}"
            )

    def __add__(self, other: "PolynomialForm") -> "PolynomialForm":
        self._check_compatible(other)
        acc = dict(self.components)
        for index, poly in other.components.items():
            acc[index] = acc[index] + poly if index in acc else poly
        return PolynomialForm(self.degree, self.ambient, acc)

    def __neg__(self) -> "PolynomialForm":
        return self * -1

    def __sub__(self, other: "PolynomialForm") -> "PolynomialForm":
        return self + (-other)

    def __mul__(self, scalar: float) -> "PolynomialForm":
        return PolynomialForm(self.degree, self.ambient, {i: p * scalar for i, p in self.components.items()})

    __rmul__ = __mul__

    def equals(self, other: "PolynomialForm") -> bool:
        return (self - other).is_zero


# ============================================================
# Derivada exterior
# ============================================================

def exterior_derivative(form: PolynomialForm) -> PolynomialForm:
    """d(p dx_I) = Σ_j ∂p/∂x_j dx_j ∧ dx_I."""
    if form.degree >= form.ambient:
        raise DimensionMismatchError(
            f"The exterior derivative of a {form.degree}-form in R^{form.ambient} would have degree "
            f"{form.degree + 1} > {form.ambient}"
        )
    symbols = form.symbols
    acc: dict[MultiIndex, sympy.Poly] = {}
    for index, poly in form.components.items():
        for j, symbol in enumerate(symbols):
            if j in index:
                continue
            partial = poly.diff(symbol)
            if partial.is_zero:
                continue
            # mover dx_j a su posición dentro de dx_I
            sign = -1 if sum(1 for i in index if i < j) % 2 else 1
            key = tuple(sorted(index + (j,)))
            term = partial * sign
            acc[key] = acc[key] + term if key in acc else term
    return PolynomialForm(form.degree + 1, form.ambient, acc)


# ============================================================
# Evaluación
# ============================================================

def _poly_values(poly: sympy.Poly, symbols: Sequence[sympy.Symbol], points: np.ndarray) -> np.ndarray:
    func = sympy.lambdify(symbols, poly.as_expr(), "numpy")
    values = np.asarray(func(*points.T), dtype=float)
    return np.broadcast_to(values, (len(points),)).astype(float)


def evaluate(form: PolynomialForm, points: np.ndarray) -> dict[MultiIndex, np.ndarray]:
    """Valores de cada componente en los puntos (P, m)."""
    points = np.atleast_2d(np.asarray(points, dtype=float))
    if points.shape[1] != form.ambient:
        raise DimensionMismatchError(f"Points in R^{points.shape[1]} for a form on R^{form.ambient}")
    return {index: _poly_values(poly, form.symbols, points) for index, poly in form.components.items()}


# ============================================================
# Integración exacta sobre símplices
# ============================================================

@lru_cache(maxsize=None)
def _barycentric_assignments(n: int, total_degree: int) -> tuple[tuple[tuple[int, ...], float], ...]:
    """
    Asignaciones factor → vértice con su peso ∏β!/(n+|β|)!, donde β cuenta
    cuántos factores caen en cada vértice.
    """
    denominator = math.factorial(n + total_degree)
    out = []
    for assign in itertools.product(range(n + 1), repeat=total_degree):
        counts = np.bincount(np.array(assign, dtype=int), minlength=n + 1) if assign else np.zeros(n + 1, int)
        weight = math.prod(math.factorial(int(b)) for b in counts) / denominator
        out.append((assign, weight))
    return tuple(out)


def _simplex_poly_integrals(poly: sympy.Poly, vertices: np.ndarray) -> np.ndarray:
    """∫_Δ p(Σ λ_k v_k) dt para cada símplex (vectorizado sobre T símplices)."""
    count, k, _ = vertices.shape
    n = k - 1
    out = np.zeros(count)
    for exponents, coefficient in poly.terms():
        factors = [axis for axis, power in enumerate(exponents) for _ in range(power)]
        acc = np.zeros(count)
        for assign, weight in _barycentric_assignments(n, len(factors)):
            term = np.full(count, weight)
            for axis, vertex in zip(factors, assign):
                term = term * vertices[:, vertex, axis]
            acc += term
        out += float(coefficient) * acc
    return out


def integrate(form: PolynomialForm, chain: SimplicialChain) -> float:
    """Σ a_i ∫_{σ_i} ω, exacto vía la fórmula factorial de monomios baricéntricos."""
    if (form.degree, form.ambient) != (chain.n, chain.m):
        raise DimensionMismatchError(
            f"Cannot integrate a {form.degree}-form on R^{form.ambient} over a ({chain.n}, {chain.m}) chain"
        )
    if chain.is_zero or form.is_zero:
        return 0.0
    if form.degree == 0:
        points = chain.vertices[:, 0, :]
        values = evaluate(form, points)[()]
        return float(chain.coefs @ values)
    vertices = chain.vertices
    edges = vertices[:, 1:, :] - vertices[:, :1, :]
    total = 0.0
    for index, poly in form.components.items():
        dets = np.linalg.det(edges[:, :, list(index)])
        total += float(chain.coefs @ (dets * _simplex_poly_integrals(poly, vertices)))
    return total


def stokes_check(form: PolynomialForm, chain: SimplicialChain) -> float:
    """|∫_A dω - ∫_{∂A} ω|."""
    if form.degree + 1 != chain.n or form.ambient != chain.m:
        raise DimensionMismatchError(
            f"Stokes needs a form of degree n-1: got degree {form.degree} against a ({chain.n}, {chain.m}) chain"
        )
    residual = abs(integrate(exterior_derivative(form), chain) - integrate(form, boundary(chain)))
    logger.debug(f"stokes residual {residual:.3e} over {len(chain)} simplices")
    return float(residual)


# ============================================================
# Normas de formas sobre una caja
# ============================================================

@dataclass(frozen=True)
class FormNorm:
    k: int
    alpha: float
    box: tuple[tuple[float, float], ...]
    value: float
    grid_resolution: int
    pointwise: Pointwise = "max"


def _derivatives(form: PolynomialForm, k: int) -> dict[MultiIndex, list[sympy.Poly]]:
    """∂^β ω_I para todo β con |β| ≤ k, agrupados por β (exponentes por eje)."""
    symbols = form.symbols
    out: dict[MultiIndex, list[sympy.Poly]] = {}
    for order in range(k + 1):
        for combo in itertools.combinations_with_replacement(range(form.ambient), order):
            beta = tuple(combo.count(axis) for axis in range(form.ambient))
            polys = []
            for poly in form.components.values():
                for axis in combo:
                    poly = poly.diff(symbols[axis])
                polys.append(poly)
            out[beta] = polys
    return out


def _combine(values: np.ndarray, pointwise: Pointwise) -> np.ndarray:
    """values: (componentes, puntos) → magnitud por punto."""
    if pointwise == "euclidean":
        return np.sqrt(np.sum(values ** 2, axis=0))
    return np.max(np.abs(values), axis=0)


def _grid_estimate(
    form: PolynomialForm,
    derivatives: dict[MultiIndex, list[sympy.Poly]],
    k: int,
    alpha: float,
    box: Sequence[tuple[float, float]],
    resolution: int,
    pointwise: Pointwise,
) -> float:
    axes = [np.linspace(lo, hi, resolution + 1) if hi > lo else np.array([lo]) for lo, hi in box]
    shape = tuple(len(a) for a in axes)
    points = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, form.ambient)
    sup = 0.0
    holder = 0.0
    for beta, polys in derivatives.items():
        values = np.array([_poly_values(p, form.symbols, points) for p in polys])
        sup = max(sup, float(_combine(values, pointwise).max(initial=0.0)))
        if alpha > 0.0 and sum(beta) == k:
            grid_values = values.reshape((len(polys),) + shape)
            for axis, (lo, hi) in enumerate(box):
                if hi <= lo:
                    continue
                h = (hi - lo) / resolution
                stride = 1
                # pares a distancias diádicas a lo largo de cada eje
                while stride <= resolution:
                    lead = [slice(None)] + [slice(None)] * form.ambient
                    tail = [slice(None)] + [slice(None)] * form.ambient
                    lead[axis + 1] = slice(stride, None)
                    tail[axis + 1] = slice(None, -stride)
                    diff = grid_values[tuple(lead)] - grid_values[tuple(tail)]
                    quotient = _combine(diff.reshape(len(polys), -1), pointwise) / (stride * h) ** alpha
                    holder = max(holder, float(quotient.max(initial=0.0)))
                    stride *= 2
    return sup + holder


def form_norm(
    form: PolynomialForm,
    k: int,
    alpha: float,
    box: Sequence[Sequence[float]],
    grid_resolution: int | None = None,
    *,
    pointwise: Pointwise = "max",
) -> FormNorm:
    """
    Estimación inferior de ‖ω‖_{k+alpha} sobre la caja: sup muestreado de
    |∂^β ω_I| (|β| ≤ k) más, con alpha > 0, el cociente de Hölder de las
    derivadas de orden k. La malla se duplica hasta que dos estimaciones
    consecutivas difieren menos de 1%. Con pointwise="euclidean" se toma la
    norma euclídea del vector de componentes en cada punto, que acota la
    comasa de ω.
    """
    if k < 0:
        raise ParameterRangeError(f"Derivative order must be >= 0 (got {k})")
    if not 0.0 <= alpha < 1.0:
        raise ParameterRangeError(f"Hölder exponent must be in [0, 1) (got {alpha})")
    box_t = tuple((float(lo), float(hi)) for lo, hi in box)
    if len(box_t) != form.ambient:
        raise DimensionMismatchError(f"Box has {len(box_t)} axes, form lives in R^{form.ambient}")
    if any(lo > hi for lo, hi in box_t):
        raise DegenerateInputError(f"Empty box {box_t}")
    resolution = grid_resolution or config.FORM_GRID_RESOLUTION
    if resolution < 1:
        raise ParameterRangeError(f"Grid resolution must be positive (got {resolution})")
    if form.is_zero:
        return FormNorm(k, alpha, box_t, 0.0, resolution, pointwise)

    def fits(r: int) -> bool:
        return r <= config.FORM_GRID_MAX_RESOLUTION and (r + 1) ** form.ambient <= config.FORM_GRID_MAX_POINTS

    while resolution > 1 and not fits(resolution):
        resolution //= 2
    derivatives = _derivatives(form, k)
    value = _grid_estimate(form, derivatives, k, alpha, box_t, resolution, pointwise)
    while fits(2 * resolution):
        finer = max(value, _grid_estimate(form, derivatives, k, alpha, box_t, 2 * resolution, pointwise))
        resolution *= 2
        converged = abs(finer - value) <= 0.01 * max(abs(finer), 1e-300)
        value = finer
        if converged:
            break
    logger.debug(f"form norm k={k} alpha={alpha}: {value:.6g} at resolution {resolution}")
    return FormNorm(k, alpha, box_t, float(value), resolution, pointwise)
