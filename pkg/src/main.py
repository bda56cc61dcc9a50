from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
import logging

from . import config
from .errors import GeometryError
# Importamos los routers
from .routers import chains, forms, experiments

logger = logging.getLogger("main")

# ============================================================
# Configuración de la aplicación
# ============================================================
app = FastAPI(
    title="Natural Norms Service",
    description="""
Servicio de **normas naturales** sobre cadenas simpliciales.

### Funcionalidades principales:
- **Cadenas**:
  - Masa, borde y masas proyectadas.
  - Cotas de la norma λ-natural (evaluación o búsqueda de testigos).
  - Norma plana relativa a un complejo (programa lineal).
- **Formas polinomiales**:
  - Integración exacta, derivada exterior y verificación de Stokes.
- **Experimentos**:
  - Curvas de Koch, curva autosemejante en R^3, espiral, copo de nieve,
    puente de Lebesgue y desigualdad de integración.

> **Swagger/OpenAPI** disponible en `/docs`
> **Healthcheck** disponible en `/healthz`
    """,
    version="1.0.0",
)

# ============================================================
# Configuración CORS
# ============================================================
app.add_middleware(
    CORSMiddleware,
    allow_origins=config.ALLOWED_ORIGINS,
    allow_credentials=True,
    allow_methods=["*"],
    allow_headers=["*"],
)


# ============================================================
# Errores de dominio → HTTP
# ============================================================
@app.exception_handler(GeometryError)
async def geometry_error_handler(request: Request, exc: GeometryError):
    logger.error(f"{request.url.path}: {exc}")
    return JSONResponse(status_code=exc.http_status, content={"detail": str(exc)})


# ============================================================
# Routers
# ============================================================
app.include_router(chains.router, prefix="/chains", tags=["Chains"])
app.include_router(forms.router, prefix="/forms", tags=["Forms"])
app.include_router(experiments.router, prefix="/experiments", tags=["Experiments"])


# ============================================================
# Endpoints de sistema
# ============================================================
@app.get("/healthz", tags=["System"])
def health_check():
    """
    Verifica la salud del servicio.
    """
    return {"status": "ok", "service": "natural-norms"}


@app.get("/", tags=["System"])
def root():
    return {
        "message": "Natural Norms Service",
        "swagger_ui": "/docs",
        "healthcheck": "/healthz",
    }
