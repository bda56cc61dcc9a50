from __future__ import annotations

import itertools
import logging
import math
from bisect import bisect_left, bisect_right
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

import numpy as np

from . import config
from .errors import (
    DegenerateInputError,
    DimensionMismatchError,
    NoBoundaryError,
    NotRepresentableError,
    ParameterRangeError,
    UnsupportedCaseError,
)

logger = logging.getLogger("chain_core")

Point = tuple[float, ...]


# ============================================================
# Masas de símplices (vectorizado)
# ============================================================

def simplex_masses(vertices: np.ndarray) -> np.ndarray:
    """Masas n-dimensionales de un lote de símplices (T, n+1, m) vía Gram."""
    vertices = np.asarray(vertices, dtype=float)
    count, k, _ = vertices.shape
    n = k - 1
    if n == 0:
        return np.ones(count)
    edges = vertices[:, 1:, :] - vertices[:, :1, :]
    gram = edges @ edges.transpose(0, 2, 1)
    det = np.linalg.det(gram) if count else np.zeros(0)
    return np.sqrt(np.clip(det, 0.0, None)) / math.factorial(n)


def _max_edge_lengths(vertices: np.ndarray) -> np.ndarray:
    diffs = vertices[:, :, None, :] - vertices[:, None, :, :]
    return np.sqrt((diffs ** 2).sum(axis=-1).max(axis=(1, 2)))


def _degenerate_mask(vertices: np.ndarray, masses: np.ndarray) -> np.ndarray:
    n = vertices.shape[1] - 1
    if n == 0:
        return np.zeros(len(masses), dtype=bool)
    max_edge = _max_edge_lengths(vertices)
    return (max_edge == 0.0) | (masses < config.DEGENERACY_TOL * max_edge ** n)


# ============================================================
# Tipos de dominio
# ============================================================

@dataclass(frozen=True)
class OrientedSimplex:
    """Símplice orientado: el orden de los vértices fija la orientación."""
    vertices: tuple[Point, ...]

    def __post_init__(self):
        verts = tuple(tuple(float(x) for x in p) for p in self.vertices)
        if not verts:
            raise DimensionMismatchError("A simplex needs at least one vertex")
        m = len(verts[0])
        if any(len(p) != m for p in verts):
            raise DimensionMismatchError("All vertices must share the ambient dimension")
        if len(verts) - 1 > m:
            raise DimensionMismatchError(f"n={len(verts) - 1} exceeds ambient dimension m={m}")
        if not all(math.isfinite(x) for p in verts for x in p):
            raise DegenerateInputError("Vertex coordinates must be finite")
        object.__setattr__(self, "vertices", verts)

    @property
    def n(self) -> int:
        return len(self.vertices) - 1

    @property
    def m(self) -> int:
        return len(self.vertices[0])

    @property
    def array(self) -> np.ndarray:
        return np.array(self.vertices, dtype=float)

    @property
    def is_degenerate(self) -> bool:
        arr = self.array[None]
        return bool(_degenerate_mask(arr, simplex_masses(arr))[0])

    def reversed(self) -> "OrientedSimplex":
        """Mismo conjunto de puntos, orientación opuesta."""
        if self.n == 0:
            return self
        v = list(self.vertices)
        v[0], v[1] = v[1], v[0]
        return OrientedSimplex(tuple(v))


def simplex_mass(simplex: OrientedSimplex) -> float:
    """√det(G)/n!; 0 para símplices degenerados."""
    if simplex.is_degenerate:
        return 0.0
    return float(simplex_masses(simplex.array[None])[0])


@dataclass(frozen=True, eq=False)
class SimplicialChain:
    """
    Suma formal finita Σ a_i σ_i. Al construirla se descartan coeficientes
    nulos y símplices degenerados, así que el invariante vale siempre.
    """
    n: int
    m: int
    coefs: np.ndarray
    vertices: np.ndarray
    masses: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if self.n < 0 or self.n > self.m:
            raise DimensionMismatchError(f"Invalid chain dimensions n={self.n}, m={self.m}")
        coefs = np.asarray(self.coefs, dtype=float).reshape(-1)
        verts = np.asarray(self.vertices, dtype=float).reshape(len(coefs), self.n + 1, self.m)
        if not (np.all(np.isfinite(coefs)) and np.all(np.isfinite(verts))):
            raise DegenerateInputError("Chain coefficients and coordinates must be finite")
        masses = simplex_masses(verts)
        keep = (coefs != 0.0) & ~_degenerate_mask(verts, masses)
        coefs, verts, masses = coefs[keep].copy(), verts[keep].copy(), masses[keep].copy()
        for arr in (coefs, verts, masses):
            arr.setflags(write=False)
        object.__setattr__(self, "coefs", coefs)
        object.__setattr__(self, "vertices", verts)
        object.__setattr__(self, "masses", masses)

    # ------------------------------------------------------------
    # Constructores
    # ------------------------------------------------------------
    @classmethod
    def zero(cls, n: int, m: int) -> "SimplicialChain":
        return cls(n, m, np.zeros(0), np.zeros((0, n + 1, m)))

    @classmethod
    def from_terms(
        cls,
        terms: Iterable[tuple[float, OrientedSimplex | Sequence[Sequence[float]]]],
        *,
        n: int | None = None,
        m: int | None = None,
    ) -> "SimplicialChain":
        coefs: list[float] = []
        verts: list[tuple[Point, ...]] = []
        for coef, simplex in terms:
            if not isinstance(simplex, OrientedSimplex):
                simplex = OrientedSimplex(tuple(tuple(p) for p in simplex))
            if n is None:
                n, m = simplex.n, simplex.m
            if (simplex.n, simplex.m) != (n, m):
                raise DimensionMismatchError(
                    f"Term of dimension ({simplex.n}, {simplex.m}) in a ({n}, {m}) chain"
                )
            coefs.append(float(coef))
            verts.append(simplex.vertices)
        if n is None or m is None:
            raise DimensionMismatchError("Empty term list needs explicit n and m")
        return cls(n, m, np.array(coefs), np.array(verts, dtype=float).reshape(len(coefs), n + 1, m))

    @classmethod
    def from_simplex(cls, simplex: OrientedSimplex, coef: float = 1.0) -> "SimplicialChain":
        return cls.from_terms([(coef, simplex)])

    # ------------------------------------------------------------
    # Acceso
    # ------------------------------------------------------------
    def __len__(self) -> int:
        return len(self.coefs)

    def __iter__(self) -> Iterator[tuple[float, OrientedSimplex]]:
        for coef, verts in zip(self.coefs, self.vertices):
            yield float(coef), OrientedSimplex(tuple(map(tuple, verts)))

    @property
    def terms(self) -> list[tuple[float, OrientedSimplex]]:
        return list(self)

    @property
    def is_zero(self) -> bool:
        return len(self) == 0

    # ------------------------------------------------------------
    # Aritmética de cadenas (sobre listas de términos)
    # ------------------------------------------------------------
    def _check_compatible(self, other: "SimplicialChain") -> None:
        if (self.n, self.m) != (other.n, other.m):
            raise DimensionMismatchError(
                f"Cannot combine ({self.n}, {self.m}) and ({other.n}, {other.m}) chains"
            )

    def __add__(self, other: "SimplicialChain") -> "SimplicialChain":
        self._check_compatible(other)
        return SimplicialChain(
            self.n,
            self.m,
            np.concatenate([self.coefs, other.coefs]),
            np.concatenate([self.vertices, other.vertices]),
        )

    def __neg__(self) -> "SimplicialChain":
        return SimplicialChain(self.n, self.m, -self.coefs, self.vertices)

    def __sub__(self, other: "SimplicialChain") -> "SimplicialChain":
        return self + (-other)

    def __mul__(self, scalar: float) -> "SimplicialChain":
        return SimplicialChain(self.n, self.m, float(scalar) * self.coefs, self.vertices)

    __rmul__ = __mul__

    def scaled(self, factor: float) -> "SimplicialChain":
        """Homotecia de las coordenadas por `factor`."""
        return SimplicialChain(self.n, self.m, self.coefs, float(factor) * self.vertices)

    def translated(self, offset: Sequence[float]) -> "SimplicialChain":
        return SimplicialChain(self.n, self.m, self.coefs, self.vertices + np.asarray(offset, dtype=float))


@dataclass(frozen=True, eq=False)
class SimplicialComplex:
    """Conjunto finito de celdas n-dimensionales sobre el que se reescriben cadenas."""
    n: int
    m: int
    cells: np.ndarray

    def __post_init__(self):
        cells = np.asarray(self.cells, dtype=float).reshape(-1, self.n + 1, self.m)
        cells.setflags(write=False)
        object.__setattr__(self, "cells", cells)

    def __len__(self) -> int:
        return len(self.cells)

    @property
    def masses(self) -> np.ndarray:
        return simplex_masses(self.cells)

    def as_chain(self, coefs: np.ndarray | None = None) -> SimplicialChain:
        if coefs is None:
            coefs = np.ones(len(self))
        return SimplicialChain(self.n, self.m, coefs, self.cells)


# ============================================================
# Borde y proyecciones
# ============================================================

def boundary(chain: SimplicialChain) -> SimplicialChain:
    """∂ Σ a σ = Σ a Σ_i (-1)^i (σ sin el vértice i); caras degeneradas se descartan."""
    if chain.n == 0:
        raise NoBoundaryError("The boundary of a 0-chain is not defined")
    k = chain.n + 1
    faces = [np.delete(chain.vertices, i, axis=1) for i in range(k)]
    coefs = [chain.coefs * (-1.0) ** i for i in range(k)]
    return SimplicialChain(chain.n - 1, chain.m, np.concatenate(coefs), np.concatenate(faces))


def coordinate_planes(m: int, n: int) -> list[tuple[int, ...]]:
    """Planos coordenados n-dimensionales de R^m, en orden lexicográfico."""
    return list(itertools.combinations(range(m), n))


def project_onto(chain: SimplicialChain, axes: Sequence[int]) -> SimplicialChain:
    """Proyección ortogonal sobre los ejes dados; imágenes degeneradas se descartan."""
    axes = tuple(axes)
    if len(axes) < chain.n or any(a < 0 or a >= chain.m for a in axes):
        raise ParameterRangeError(f"Invalid projection axes {axes} for a chain in R^{chain.m}")
    return SimplicialChain(chain.n, len(axes), chain.coefs, chain.vertices[:, :, list(axes)])


def project(chain: SimplicialChain, plane: int) -> SimplicialChain:
    """Proyección sobre el plano coordenado `plane` (1..N, orden lexicográfico)."""
    planes = coordinate_planes(chain.m, chain.n)
    if not 1 <= plane <= len(planes):
        raise ParameterRangeError(f"Plane index {plane} outside 1..{len(planes)}")
    return project_onto(chain, planes[plane - 1])


# ============================================================
# Reducción por conjuntos de vértices (válida en toda dimensión)
# ============================================================

def _permutation_sign(order: Sequence[int]) -> float:
    inversions = sum(1 for i in range(len(order)) for j in range(i + 1, len(order)) if order[i] > order[j])
    return -1.0 if inversions % 2 else 1.0


def _rounded(arr: np.ndarray) -> np.ndarray:
    return np.round(arr, config.PLANE_ROUND_DECIMALS) + 0.0


def _vertex_set_keys(vertices: np.ndarray) -> list[tuple[tuple, float, list[int]]]:
    rounded = _rounded(vertices)
    out = []
    for verts in rounded:
        rows = [tuple(r) for r in verts]
        order = sorted(range(len(rows)), key=rows.__getitem__)
        out.append((tuple(rows[j] for j in order), _permutation_sign(order), order))
    return out


def collect(chain: SimplicialChain) -> SimplicialChain:
    """Suma los coeficientes de símplices con el mismo conjunto de vértices."""
    sums: dict[tuple, float] = {}
    reps: dict[tuple, np.ndarray] = {}
    for coef, verts, (key, sign, order) in zip(chain.coefs, chain.vertices, _vertex_set_keys(chain.vertices)):
        if key not in sums:
            sums[key] = 0.0
            reps[key] = verts[order]
        sums[key] += sign * coef
    keys = [k for k, c in sums.items() if abs(c) > config.COEF_ZERO_TOL]
    if not keys:
        return SimplicialChain.zero(chain.n, chain.m)
    return SimplicialChain(
        chain.n, chain.m, np.array([sums[k] for k in keys]), np.array([reps[k] for k in keys])
    )


# ============================================================
# Planos afines: marcos ortonormales y claves normalizadas
# ============================================================

def _frames(vertices: np.ndarray) -> np.ndarray:
    """Base ortonormal (Gram-Schmidt) del plano de cada símplice: (T, n, m)."""
    edges = vertices[:, 1:, :] - vertices[:, :1, :]
    basis = np.zeros_like(edges)
    for j in range(edges.shape[1]):
        w = edges[:, j, :].copy()
        for i in range(j):
            w -= (w * basis[:, i, :]).sum(axis=1, keepdims=True) * basis[:, i, :]
        basis[:, j, :] = w / np.linalg.norm(w, axis=1, keepdims=True)
    return basis


def _plane_keys(vertices: np.ndarray) -> list[tuple]:
    """
    Clave del plano afín de cada símplice: proyector P = BᵀB y pie
    p0 - P p0, ambos independientes de la base elegida.
    """
    if vertices.shape[1] == 1:
        return [tuple(r) for r in _rounded(vertices[:, 0, :])]
    basis = _frames(vertices)
    proj = basis.transpose(0, 2, 1) @ basis
    p0 = vertices[:, 0, :]
    foot = p0 - (proj @ p0[:, :, None])[:, :, 0]
    flat = np.concatenate([proj.reshape(len(vertices), -1), foot], axis=1)
    return [tuple(r) for r in _rounded(flat)]


def _group_by_plane(vertices: np.ndarray) -> dict[tuple, list[int]]:
    groups: dict[tuple, list[int]] = {}
    for idx, key in enumerate(_plane_keys(vertices)):
        groups.setdefault(key, []).append(idx)
    return groups


def _orient2d(tri: np.ndarray) -> float:
    (ax, ay), (bx, by), (cx, cy) = tri
    return 0.5 * ((bx - ax) * (cy - ay) - (by - ay) * (cx - ax))


# ============================================================
# Superposición 2D (triángulos coplanares)
# ============================================================

def _triangles_overlap(t1: np.ndarray, t2: np.ndarray, eps: float) -> bool:
    """Ejes separadores: True si los interiores se cortan."""
    for tri in (t1, t2):
        for i in range(3):
            edge = tri[(i + 1) % 3] - tri[i]
            axis = np.array([-edge[1], edge[0]])
            p1, p2 = t1 @ axis, t2 @ axis
            norm = np.linalg.norm(axis)
            if p1.max() <= p2.min() + eps * norm or p2.max() <= p1.min() + eps * norm:
                return False
    return True


def _split_polygon(poly: list[np.ndarray], line: np.ndarray, eps: float) -> list[list[np.ndarray]]:
    a, b, c = line
    side = [a * p[0] + b * p[1] + c for p in poly]
    if all(s >= -eps for s in side) or all(s <= eps for s in side):
        return [poly]
    pos: list[np.ndarray] = []
    neg: list[np.ndarray] = []
    for i, p in enumerate(poly):
        q = poly[(i + 1) % len(poly)]
        sp, sq = side[i], side[(i + 1) % len(poly)]
        if sp >= -eps:
            pos.append(p)
        if sp <= eps:
            neg.append(p)
        if (sp > eps and sq < -eps) or (sp < -eps and sq > eps):
            cut = p + (q - p) * (sp / (sp - sq))
            pos.append(cut)
            neg.append(cut)
    return [piece for piece in (pos, neg) if len(piece) >= 3]


def _polygon_area(poly: list[np.ndarray]) -> float:
    xs = np.array([p[0] for p in poly])
    ys = np.array([p[1] for p in poly])
    return 0.5 * float(np.dot(xs, np.roll(ys, -1)) - np.dot(ys, np.roll(xs, -1)))


def _fan(poly: list[np.ndarray]) -> list[np.ndarray]:
    """Abanico antihorario desde el vértice lexicográficamente menor."""
    if _polygon_area(poly) < 0:
        poly = poly[::-1]
    start = min(range(len(poly)), key=lambda i: (poly[i][0], poly[i][1]))
    poly = poly[start:] + poly[:start]
    return [np.array([poly[0], poly[i], poly[i + 1]]) for i in range(1, len(poly) - 1)]


def _overlay_cluster(triangles: list[np.ndarray], scale: float) -> list[np.ndarray]:
    eps = 1e-12 * scale
    lines: list[np.ndarray] = []
    for tri in triangles:
        for i in range(3):
            p, q = tri[i], tri[(i + 1) % 3]
            normal = np.array([q[1] - p[1], p[0] - q[0]])
            normal /= np.linalg.norm(normal)
            line = np.array([normal[0], normal[1], -normal @ p])
            if line[0] < 0 or (line[0] == 0 and line[1] < 0):
                line = -line
            if not any(np.allclose(line, other, atol=1e-9 * max(1.0, scale)) for other in lines):
                lines.append(line)
    pieces: list[list[np.ndarray]] = []
    centroids: list[np.ndarray] = []
    for tri in triangles:
        polys = [list(tri)]
        for line in lines:
            polys = [part for poly in polys for part in _split_polygon(poly, line, eps)]
        for poly in polys:
            area = abs(_polygon_area(poly))
            if area <= 1e-14 * scale ** 2:
                continue
            centroid = np.mean(poly, axis=0)
            if any(np.allclose(centroid, other, atol=1e-7 * scale) for other in centroids):
                continue
            centroids.append(centroid)
            pieces.append(poly)
    return [cell for poly in pieces for cell in _fan(poly)]


def _refine_planar(vertices: np.ndarray) -> list[np.ndarray]:
    """Celdas triangulares que refinan a todos los triángulos dados (n = 2)."""
    cells: list[np.ndarray] = []
    keys = [key for key, _, _ in _vertex_set_keys(vertices)]
    for idxs in _group_by_plane(vertices).values():
        seen: dict[tuple, int] = {}
        for i in idxs:
            seen.setdefault(keys[i], i)
        if len(seen) == 1:
            cells.append(vertices[next(iter(seen.values()))])
            continue
        tris3d = vertices[sorted(seen.values())]
        basis = _frames(tris3d[:1])[0]
        origin = tris3d[0, 0]
        tris2d = [(t - origin) @ basis.T for t in tris3d]
        scale = max(1.0, float(np.abs(np.array(tris2d)).max()))
        # Clusters de triángulos cuyos interiores se solapan (union-find)
        parent = list(range(len(tris2d)))

        def find(i: int) -> int:
            while parent[i] != i:
                parent[i] = parent[parent[i]]
                i = parent[i]
            return i

        lo = np.array([t.min(axis=0) for t in tris2d])
        hi = np.array([t.max(axis=0) for t in tris2d])
        for i in range(len(tris2d)):
            cand = np.nonzero(np.all(lo[i + 1:] < hi[i], axis=1) & np.all(hi[i + 1:] > lo[i], axis=1))[0] + i + 1
            for j in cand:
                if find(i) != find(j) and _triangles_overlap(tris2d[i], tris2d[j], 1e-9 * scale):
                    parent[find(i)] = find(j)
        clusters: dict[int, list[int]] = {}
        for i in range(len(tris2d)):
            clusters.setdefault(find(i), []).append(i)
        for members in clusters.values():
            if len(members) == 1:
                cells.append(tris3d[members[0]])
                continue
            for cell2d in _overlay_cluster([tris2d[i] for i in members], scale):
                cells.append(origin + cell2d @ basis)
    return cells


def _refine_linear(vertices: np.ndarray) -> list[np.ndarray]:
    """Celdas (segmentos) entre puntos de quiebre consecutivos de cada recta."""
    cells: list[np.ndarray] = []
    for idxs in _group_by_plane(vertices).values():
        segs = vertices[idxs]
        direction = _frames(segs[:1])[0, 0]
        origin = segs[0, 0]
        params = (segs - origin) @ direction
        tol = 1e-9 * max(1.0, float(np.abs(params).max()))
        order = np.argsort(params.ravel(), kind="stable")
        flat_params = params.ravel()
        flat_points = segs.reshape(-1, segs.shape[-1])
        breaks: list[float] = []
        points: list[np.ndarray] = []
        for i in order:
            if not breaks or flat_params[i] - breaks[-1] > tol:
                breaks.append(float(flat_params[i]))
                points.append(flat_points[i])
        lo, hi = params.min(axis=1), params.max(axis=1)
        for j in range(len(breaks) - 1):
            mid = 0.5 * (breaks[j] + breaks[j + 1])
            if np.any((lo <= mid) & (mid <= hi)):
                cells.append(np.array([points[j], points[j + 1]]))
    return cells


def refine(a: SimplicialChain, b: SimplicialChain) -> SimplicialComplex:
    """
    Complejo común sobre el que ambas cadenas son representables.
    Implementado para n = 0, n = 1 (segmentos por recta) y n = 2
    (triángulos agrupados por plano afín).
    """
    if (a.n, a.m) != (b.n, b.m):
        raise DimensionMismatchError(f"Cannot refine ({a.n}, {a.m}) against ({b.n}, {b.m})")
    vertices = np.concatenate([a.vertices, b.vertices])
    if a.n == 0:
        seen: dict[tuple, np.ndarray] = {}
        for key, p in zip(_plane_keys(vertices), vertices):
            seen.setdefault(key, p)
        cells = list(seen.values())
    elif a.n == 1:
        cells = _refine_linear(vertices)
    elif a.n == 2:
        cells = _refine_planar(vertices)
    else:
        raise UnsupportedCaseError(f"refine is not implemented for n={a.n}")
    return SimplicialComplex(a.n, a.m, np.array(cells).reshape(-1, a.n + 1, a.m))


# ============================================================
# Reescritura sobre un complejo
# ============================================================

class _CellIndex:
    """Índice de las celdas de un complejo por conjunto de vértices y, bajo demanda, por plano."""

    def __init__(self, complex_: SimplicialComplex):
        self.complex = complex_
        self.by_vertices: dict[tuple, tuple[int, float]] = {}
        for i, (key, sign, _) in enumerate(_vertex_set_keys(complex_.cells)):
            self.by_vertices.setdefault(key, (i, sign))
        self._members: dict[tuple, list[int]] | None = None
        self.groups: dict[tuple, dict] = {}

    def _group(self, plane_key: tuple) -> dict | None:
        if plane_key in self.groups:
            return self.groups[plane_key]
        cells = self.complex.cells
        if self._members is None:
            self._members = _group_by_plane(cells) if len(cells) else {}
        if plane_key not in self._members:
            return None
        idxs_arr = np.array(self._members[plane_key])
        basis = _frames(cells[idxs_arr[:1]])[0]
        origin = cells[idxs_arr[0], 0]
        local = (cells[idxs_arr] - origin) @ basis.T
        group = {"ids": idxs_arr, "basis": basis, "origin": origin}
        if self.complex.n == 1:
            t0, t1 = local[:, 0, 0], local[:, 1, 0]
            lo, hi = np.minimum(t0, t1), np.maximum(t0, t1)
            order = np.argsort(lo, kind="stable")
            group.update(
                ids=idxs_arr[order], lo=lo[order], hi=hi[order],
                sign=np.sign(t1 - t0)[order], lo_list=list(lo[order]),
            )
        else:
            group.update(
                centroid=local.mean(axis=1),
                area=np.abs([_orient2d(t) for t in local]),
                sign=np.sign([_orient2d(t) for t in local]),
            )
        self.groups[plane_key] = group
        return group

    def contributions(self, verts: np.ndarray, key_info: tuple, plane_key: tuple | None) -> list[tuple[int, float]]:
        key, sign, _ = key_info
        if key in self.by_vertices:
            idx, cell_sign = self.by_vertices[key]
            return [(idx, sign * cell_sign)]
        n = self.complex.n
        if n not in (1, 2) or plane_key is None:
            return []
        group = self._group(plane_key)
        if group is None:
            return []
        local = (verts - group["origin"]) @ group["basis"].T
        if n == 1:
            t0, t1 = float(local[0, 0]), float(local[1, 0])
            lo, hi = min(t0, t1), max(t0, t1)
            tol = 1e-9 * max(1.0, abs(lo), abs(hi))
            start = bisect_left(group["lo_list"], lo - tol)
            stop = bisect_right(group["lo_list"], hi + tol)
            out = []
            covered = 0.0
            for pos in range(start, stop):
                if group["hi"][pos] <= hi + tol:
                    out.append((int(group["ids"][pos]), float(np.sign(t1 - t0) * group["sign"][pos])))
                    covered += group["hi"][pos] - group["lo"][pos]
            return out if abs(covered - (hi - lo)) <= 1e-7 * max(hi - lo, 1e-300) + tol else []
        area = _orient2d(local)
        (ax, ay), (bx, by), (cx, cy) = local
        px, py = group["centroid"][:, 0], group["centroid"][:, 1]
        det = (by - cy) * (ax - cx) + (cx - bx) * (ay - cy)
        l1 = ((by - cy) * (px - cx) + (cx - bx) * (py - cy)) / det
        l2 = ((cy - ay) * (px - cx) + (ax - cx) * (py - cy)) / det
        l3 = 1.0 - l1 - l2
        inside = np.nonzero((l1 >= -1e-9) & (l2 >= -1e-9) & (l3 >= -1e-9))[0]
        covered = float(group["area"][inside].sum())
        if abs(covered - abs(area)) > 1e-7 * abs(area):
            return []
        return [(int(group["ids"][i]), float(np.sign(area) * group["sign"][i])) for i in inside]


def cell_coefficients(chain: SimplicialChain, complex_: SimplicialComplex) -> np.ndarray:
    """Vector de coeficientes de `chain` sobre las celdas del complejo."""
    if (chain.n, chain.m) != (complex_.n, complex_.m):
        raise DimensionMismatchError(
            f"Chain ({chain.n}, {chain.m}) does not match complex ({complex_.n}, {complex_.m})"
        )
    index = _CellIndex(complex_)
    coefs = np.zeros(len(complex_))
    if chain.is_zero:
        return coefs
    keys = _vertex_set_keys(chain.vertices)
    plane_keys = _plane_keys(chain.vertices) if chain.n in (1, 2) else [None] * len(chain)
    for t, (coef, verts) in enumerate(zip(chain.coefs, chain.vertices)):
        parts = index.contributions(verts, keys[t], plane_keys[t])
        if not parts:
            raise NotRepresentableError(
                f"Term {t} (coef={coef}, vertices={verts.tolist()}) is not representable on the complex"
            )
        for idx, sign in parts:
            coefs[idx] += sign * coef
    return coefs


def reduce(chain: SimplicialChain, complex_: SimplicialComplex) -> SimplicialChain:
    """Representante canónico de `chain` relativo a las celdas del complejo."""
    coefs = cell_coefficients(chain, complex_)
    coefs[np.abs(coefs) <= config.COEF_ZERO_TOL] = 0.0
    return complex_.as_chain(coefs)


def supports_refinement(chain: SimplicialChain) -> bool:
    return chain.n <= 2


def canonical(chain: SimplicialChain) -> tuple[SimplicialChain, bool]:
    """
    Reduce la cadena sobre su propio refinamiento cuando está soportado.
    Devuelve (representante, exacto). Si no, combina símplices idénticos.
    """
    collected = collect(chain)
    if not supports_refinement(chain) or collected.is_zero:
        return collected, supports_refinement(chain)
    return reduce(collected, refine(collected, collected)), True
