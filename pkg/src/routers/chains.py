from fastapi import APIRouter
from typing import Union
import logging

from .. import schemas
from ..chain_core import boundary
from ..mass_norms import mass, natural_norm_base, projected_mass
from ..norm_bounds import SpanningComplex, flat_norm_bound, natural_norm_eval, natural_norm_search

router = APIRouter()
logger = logging.getLogger("chains")


# ============================================================
# Endpoint: Masa y borde
# ============================================================
@router.post(
    "/mass",
    response_model=schemas.MassValueOut,
    summary="Masa de una cadena",
    description="Masa de Gram exacta si la cadena es canónica; en otro caso, cota superior Σ|a_i|·M(σ_i).",
)
def chain_mass(payload: schemas.ChainRequest):
    return schemas.MassValueOut.from_value(mass(payload.chain.to_chain()))


@router.post(
    "/projected-mass/{plane}",
    response_model=schemas.MassValueOut,
    summary="Masa λ-proyectada sobre un plano coordenado (1..C(m,n))",
)
def chain_projected_mass(plane: int, lam: float, payload: schemas.ChainRequest):
    return schemas.MassValueOut.from_value(projected_mass(payload.chain.to_chain(), plane, lam))


@router.post(
    "/boundary",
    response_model=schemas.ChainIn,
    summary="Borde ∂A de una cadena (n ≥ 1)",
)
def chain_boundary(payload: schemas.ChainRequest):
    return schemas.ChainIn.from_chain(boundary(payload.chain.to_chain()))


# ============================================================
# Endpoint: Normas
# ============================================================
@router.post(
    "/natural-norm",
    response_model=Union[schemas.NormBoundOut, schemas.MassValueOut],
    summary="Cota superior de la norma λ-natural",
    description="""
- **λ ≤ n**: caso base, suma sobre los planos coordenados de las masas λ-proyectadas.
- **λ > n** sin `complex_cells`: evalúa el testigo enviado (o el testigo nulo).
- **λ > n** con `complex_cells`: busca un testigo sobre el complejo, usando `witness` como semilla.
    """,
)
def natural_norm(payload: schemas.NaturalNormRequest):
    chain = payload.chain.to_chain()
    lam = payload.lambda_
    if lam <= chain.n:
        return schemas.MassValueOut.from_value(natural_norm_base(chain, lam))
    witness = payload.witness.to_witness() if payload.witness else None
    if payload.complex_cells:
        complex_ = SpanningComplex.from_cells(c.to_chain() for c in payload.complex_cells)
        bound = natural_norm_search(
            chain, lam, complex_, payload.budget, seed_witness=witness, seed=payload.seed
        )
    else:
        bound = natural_norm_eval(chain, lam, witness)
    logger.info(f"natural norm (lambda={lam}) <= {bound.value:.6g}")
    return schemas.NormBoundOut.from_bound(bound)


@router.post(
    "/flat-norm",
    response_model=schemas.NormBoundOut,
    summary="Norma plana relativa a un complejo",
    description="Minimiza M(A - ∂C) + M(C) sobre cadenas C del complejo generado por `complex_cells`.",
)
def flat_norm(payload: schemas.FlatNormRequest):
    chain = payload.chain.to_chain()
    complex_ = SpanningComplex.from_cells(c.to_chain() for c in payload.complex_cells)
    return schemas.NormBoundOut.from_bound(flat_norm_bound(chain, complex_))
