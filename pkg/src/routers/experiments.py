from fastapi import APIRouter, HTTPException
import logging

from .. import schemas
from ..services.experiments import EXPERIMENTS

router = APIRouter()
logger = logging.getLogger("experiments")


# ============================================================
# Utilidades internas
# ============================================================

def _kwargs_for(name: str, req: schemas.ExperimentRequest) -> dict:
    """Traduce la petición genérica a los parámetros de cada experimento."""
    kwargs: dict = {}
    if req.levels is not None:
        if name == "spiral-divergence":
            kwargs["doublings"] = max(req.levels)
        elif name in ("koch-convergence", "harrison-bound", "snowflake-stokes", "koch-ratio"):
            kwargs["levels"] = req.levels
    if req.tol is not None and name in ("koch-convergence", "spiral-divergence", "snowflake-stokes", "lebesgue", "flatnorm"):
        kwargs["tol"] = req.tol
    if name in ("lebesgue", "whitney-inequality"):
        kwargs["seed"] = req.seed
        if req.cases is not None:
            kwargs["cases"] = req.cases
    return kwargs


# ============================================================
# Endpoint: Experimentos con nombre
# ============================================================
@router.get("/", summary="Lista de experimentos disponibles")
def list_experiments():
    return {"experiments": sorted(EXPERIMENTS)}


@router.post(
    "/{name}",
    response_model=schemas.ExperimentReport,
    summary="Ejecuta un experimento y devuelve su reporte",
    description="""
Experimentos: `koch-convergence`, `harrison-bound`, `spiral-divergence`, `snowflake-stokes`,
`lebesgue`, `flatnorm`, `koch-ratio`, `whitney-inequality`.

- `levels`: niveles a recorrer (en `spiral-divergence` el mayor es el número de duplicaciones).
- `tol`, `seed`, `cases`: solo se aplican donde el experimento los usa.
    """,
)
def run_experiment(name: str, payload: schemas.ExperimentRequest | None = None):
    if name not in EXPERIMENTS:
        raise HTTPException(status_code=404, detail=f"Unknown experiment '{name}'")
    kwargs = _kwargs_for(name, payload or schemas.ExperimentRequest())
    logger.info(f"running experiment {name} with {kwargs}")
    return EXPERIMENTS[name](**kwargs)
