from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .chain_core import SimplicialChain, boundary
from .errors import ParameterRangeError
from .forms import PolynomialForm, integrate

logger = logging.getLogger("lebesgue_bridge")

AREA_FORM = PolynomialForm.from_terms(2, 2, {"1,2": 1})
Y_DX = PolynomialForm.from_terms(1, 2, {"1": "y"})


@dataclass(frozen=True)
class StepPiece:
    a: float
    b: float
    v: float


@dataclass(frozen=True)
class StepFunction:
    """f = Σ v·1_[a,b) con intervalos disjuntos; las piezas de valor 0 se descartan."""
    pieces: tuple[StepPiece, ...]

    def __post_init__(self):
        pieces = []
        for piece in self.pieces:
            if not np.isfinite([piece.a, piece.b, piece.v]).all():
                raise ParameterRangeError(f"Step piece {piece} has non-finite entries")
            if piece.b <= piece.a:
                raise ParameterRangeError(f"Step piece [{piece.a}, {piece.b}) is empty")
            if piece.v != 0.0:
                pieces.append(piece)
        pieces.sort(key=lambda p: p.a)
        for left, right in zip(pieces, pieces[1:]):
            if right.a < left.b:
                raise ParameterRangeError(f"Step pieces [{left.a}, {left.b}) and [{right.a}, {right.b}) overlap")
        object.__setattr__(self, "pieces", tuple(pieces))

    @classmethod
    def from_triples(cls, triples: Iterable[tuple[float, float, float]]) -> "StepFunction":
        return cls(tuple(StepPiece(float(a), float(b), float(v)) for a, b, v in triples))

    def __neg__(self) -> "StepFunction":
        return StepFunction(tuple(StepPiece(p.a, p.b, -p.v) for p in self.pieces))

    def integral(self) -> float:
        """Σ v·(b - a)."""
        return float(sum(p.v * (p.b - p.a) for p in self.pieces))


def chain_from_step_function(f: StepFunction) -> SimplicialChain:
    """
    A_f: cada rectángulo [a,b) x [0,v) (bajo el eje si v < 0) partido en dos
    triángulos antihorarios, con coeficiente -1 para valores negativos.
    """
    if not f.pieces:
        return SimplicialChain.zero(2, 2)
    cells, coefs = [], []
    for p in f.pieces:
        lo, hi = min(0.0, p.v), max(0.0, p.v)
        sign = 1.0 if p.v > 0 else -1.0
        cells.append([(p.a, lo), (p.b, lo), (p.b, hi)])
        cells.append([(p.a, lo), (p.b, hi), (p.a, hi)])
        coefs.extend([sign, sign])
    return SimplicialChain(2, 2, np.array(coefs), np.array(cells, dtype=float))


def lebesgue_consistency(f: StepFunction) -> tuple[float, float, float]:
    """
    (Σ v·long, ∫_{A_f} dx∧dy, ∫_Γ y dx). Γ es el grafo recorrido de izquierda
    a derecha, es decir ∂A_f con la orientación opuesta: ∫_Γ y dx = -∫_{∂A_f} y dx.
    """
    chain = chain_from_step_function(f)
    closed_form = f.integral()
    area = integrate(AREA_FORM, chain)
    graph = -integrate(Y_DX, boundary(chain)) if not chain.is_zero else 0.0
    logger.debug(f"lebesgue consistency over {len(f.pieces)} pieces: {closed_form}, {area}, {graph}")
    return closed_form, area, graph
