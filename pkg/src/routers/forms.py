from fastapi import APIRouter

from .. import schemas
from ..forms import exterior_derivative, integrate, stokes_check

router = APIRouter()


# ============================================================
# Endpoint: Integración de formas polinomiales
# ============================================================
@router.post(
    "/integrate",
    response_model=schemas.ValueOut,
    summary="Integral exacta ∫_A ω",
    description="El grado de la forma debe coincidir con la dimensión de la cadena y ambas viven en el mismo R^m.",
)
def form_integrate(payload: schemas.FormChainRequest):
    return schemas.ValueOut(value=integrate(payload.form.to_form(), payload.chain.to_chain()))


@router.post(
    "/stokes",
    response_model=schemas.ValueOut,
    summary="Residuo de Stokes |∫_A dω - ∫_∂A ω|",
)
def form_stokes(payload: schemas.FormChainRequest):
    return schemas.ValueOut(value=stokes_check(payload.form.to_form(), payload.chain.to_chain()))


@router.post(
    "/derivative",
    response_model=schemas.FormIn,
    summary="Derivada exterior dω",
)
def form_derivative(payload: schemas.FormRequest):
    return schemas.FormIn.from_form(exterior_derivative(payload.form.to_form()))
