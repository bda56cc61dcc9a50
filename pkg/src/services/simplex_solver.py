from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .. import config
from ..errors import LPError

logger = logging.getLogger("simplex_solver")


@dataclass(frozen=True)
class LPResult:
    x: np.ndarray
    objective: float
    iterations: int


# ============================================================
# Utilidades internas del tableau
# ============================================================

def _pivot(tableau: np.ndarray, row: int, col: int) -> None:
    tableau[row] /= tableau[row, col]
    factors = tableau[:, col].copy()
    factors[row] = 0.0
    tableau -= np.outer(factors, tableau[row])


def _run_phase(
    tableau: np.ndarray,
    basis: list[int],
    n_cols: int,
    tol: float,
    max_iterations: int,
    start_iteration: int = 0,
) -> int:
    """
    Itera con la regla de Bland sobre las primeras `n_cols` columnas.
    La última fila es la de costos reducidos; la última columna, el lado derecho.
    """
    iterations = start_iteration
    rows = tableau.shape[0] - 1
    while True:
        reduced = tableau[-1, :n_cols]
        candidates = np.nonzero(reduced < -tol)[0]
        if len(candidates) == 0:
            return iterations
        col = int(candidates[0])
        column = tableau[:rows, col]
        positive = np.nonzero(column > tol)[0]
        if len(positive) == 0:
            raise LPError("Linear program is unbounded (malformed spanning complex?)")
        ratios = tableau[positive, -1] / column[positive]
        best = ratios.min()
        ties = positive[ratios <= best + tol * max(1.0, abs(best))]
        # Bland: entre empates sale la variable básica de menor índice
        row = int(min(ties, key=lambda r: basis[r]))
        _pivot(tableau, row, col)
        basis[row] = col
        iterations += 1
        if iterations >= max_iterations:
            raise LPError(f"Simplex did not converge in {max_iterations} iterations")


# ============================================================
# Solver principal: min c·x  s.a.  A x = b, x ≥ 0
# ============================================================

def solve_lp(
    c: np.ndarray,
    a_eq: np.ndarray,
    b_eq: np.ndarray,
    *,
    tol: float | None = None,
    max_iterations: int | None = None,
) -> LPResult:
    """
    Método simplex denso en dos fases con pivoteo de Bland (determinista).
    Las columnas unitarias ya presentes se usan como base inicial; solo las
    filas sin ellas reciben variables artificiales.
    """
    tol = config.LP_TOL if tol is None else tol
    max_iterations = config.LP_MAX_ITERATIONS if max_iterations is None else max_iterations
    c = np.asarray(c, dtype=float)
    a = np.array(a_eq, dtype=float, copy=True)
    b = np.array(b_eq, dtype=float, copy=True)
    rows, cols = a.shape
    if len(c) != cols or len(b) != rows:
        raise LPError(f"Inconsistent LP shapes: c={len(c)}, A={a.shape}, b={len(b)}")

    negative = b < 0
    a[negative] *= -1.0
    b[negative] *= -1.0

    # Base inicial: columnas unitarias existentes
    basis = [-1] * rows
    for j in range(cols):
        col = a[:, j]
        nonzero = np.nonzero(col)[0]
        if len(nonzero) == 1 and col[nonzero[0]] == 1.0 and basis[nonzero[0]] < 0:
            basis[nonzero[0]] = j
    missing = [r for r in range(rows) if basis[r] < 0]

    n_art = len(missing)
    tableau = np.zeros((rows + 1, cols + n_art + 1))
    tableau[:rows, :cols] = a
    tableau[:rows, -1] = b
    for k, r in enumerate(missing):
        tableau[r, cols + k] = 1.0
        basis[r] = cols + k

    iterations = 0
    if n_art:
        # Fase 1: minimizar la suma de artificiales
        tableau[-1, cols:cols + n_art] = 1.0
        for r in missing:
            tableau[-1] -= tableau[r]
        iterations = _run_phase(tableau, basis, cols + n_art, tol, max_iterations)
        if -tableau[-1, -1] > tol * max(1.0, float(np.abs(b).max(initial=0.0))):
            raise LPError("Linear program is infeasible")
        # Sacar artificiales de la base cuando sea posible
        for r in range(rows):
            if basis[r] >= cols:
                candidates = np.nonzero(np.abs(tableau[r, :cols]) > tol)[0]
                if len(candidates):
                    _pivot(tableau, r, int(candidates[0]))
                    basis[r] = int(candidates[0])
        tableau[:, cols:cols + n_art] = 0.0

    # Fase 2: costos reducidos de c respecto de la base actual
    tableau[-1] = 0.0
    tableau[-1, :cols] = c
    for r in range(rows):
        if basis[r] < cols and tableau[-1, basis[r]] != 0.0:
            tableau[-1] -= tableau[-1, basis[r]] * tableau[r]
    iterations = _run_phase(tableau, basis, cols, tol, max_iterations, iterations)

    x = np.zeros(cols)
    for r in range(rows):
        if basis[r] < cols:
            x[basis[r]] = tableau[r, -1]
    x[np.abs(x) < tol] = 0.0
    objective = float(c @ x)
    logger.debug(f"LP solved: {rows} rows, {cols} columns, {iterations} pivots, objective={objective}")
    return LPResult(x=x, objective=objective, iterations=iterations)
