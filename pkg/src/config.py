import os
from dotenv import load_dotenv

# ============================================================
# Cargar variables de entorno (.env)
# ============================================================
load_dotenv()

# ============================================================
# Tolerancias geométricas
# ============================================================
# Un símplice es degenerado si su masa < DEGENERACY_TOL * (arista máx)^n
DEGENERACY_TOL = float(os.getenv("DEGENERACY_TOL", "1e-12"))
# Decimales para la clave de plano afín usada en reduce/refine
PLANE_ROUND_DECIMALS = int(os.getenv("PLANE_ROUND_DECIMALS", "9"))
# Coeficientes con |a| <= COEF_ZERO_TOL se descartan tras una reducción
COEF_ZERO_TOL = float(os.getenv("COEF_ZERO_TOL", "1e-12"))

# ============================================================
# Programación lineal
# ============================================================
LP_TOL = float(os.getenv("LP_TOL", "1e-9"))
LP_MAX_ITERATIONS = int(os.getenv("LP_MAX_ITERATIONS", "50000"))

# ============================================================
# Normas de formas (muestreo en grilla)
# ============================================================
FORM_GRID_RESOLUTION = int(os.getenv("FORM_GRID_RESOLUTION", "64"))
FORM_GRID_MAX_RESOLUTION = int(os.getenv("FORM_GRID_MAX_RESOLUTION", "1024"))
# Tope de puntos totales de la grilla (evita explotar en R^3)
FORM_GRID_MAX_POINTS = int(os.getenv("FORM_GRID_MAX_POINTS", "2000000"))

# ============================================================
# Búsqueda, experimentos y reportes
# ============================================================
SEARCH_BUDGET = int(os.getenv("SEARCH_BUDGET", "8"))
REPORT_OUT_DIR = os.getenv("REPORT_OUT_DIR", "reports")
LOG_LEVEL = os.getenv("LOG_LEVEL", "INFO").upper()

# Orígenes permitidos para la API HTTP
ALLOWED_ORIGINS = os.getenv("ALLOWED_ORIGINS", "*").split(",")
