# ============================================================
# conftest.py  —  Configuración global de pruebas
# ============================================================

from __future__ import annotations
from collections.abc import Generator
from pathlib import Path

import numpy as np
import orjson
import pytest
from fastapi.testclient import TestClient
from typer.testing import CliRunner

from src.chain_core import SimplicialChain
from src.main import app
from src.norm_bounds import SpanningComplex

UNIT_SQUARE = [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]


# ------------------------------------------------------------
# 1️⃣  Generador aleatorio determinista
# ------------------------------------------------------------
@pytest.fixture
def rng() -> np.random.Generator:
    """
    Generador con semilla fija: cada test ve la misma secuencia de casos.
    """
    return np.random.default_rng(20240611)


# ------------------------------------------------------------
# 2️⃣  Cadenas de referencia
# ------------------------------------------------------------
def square_boundary() -> SimplicialChain:
    """Borde antihorario del cuadrado unidad (4 segmentos)."""
    segments = [[UNIT_SQUARE[i], UNIT_SQUARE[(i + 1) % 4]] for i in range(4)]
    return SimplicialChain(1, 2, np.ones(4), np.array(segments))


def square_cells() -> SimplicialChain:
    """Cuadrado unidad como dos triángulos antihorarios."""
    a, b, c, d = UNIT_SQUARE
    return SimplicialChain(2, 2, np.ones(2), np.array([[a, b, c], [a, c, d]]))


@pytest.fixture
def boundary_of_square() -> SimplicialChain:
    return square_boundary()


@pytest.fixture
def square() -> SimplicialChain:
    return square_cells()


@pytest.fixture
def square_complex() -> SpanningComplex:
    return SpanningComplex.from_cells([square_cells()])


# ------------------------------------------------------------
# 3️⃣  Cliente HTTP de pruebas (FastAPI TestClient)
# ------------------------------------------------------------
@pytest.fixture
def client() -> Generator[TestClient, None, None]:
    """
    Devuelve un cliente de pruebas para realizar solicitudes HTTP
    contra la aplicación FastAPI sin levantar un servidor real.
    """
    client = TestClient(app)
    yield client


# ------------------------------------------------------------
# 4️⃣  CLI (Typer) y archivos de entrada
# ------------------------------------------------------------
@pytest.fixture
def runner() -> CliRunner:
    return CliRunner()


def chain_payload(chain: SimplicialChain) -> dict:
    return {
        "n": chain.n,
        "m": chain.m,
        "terms": [{"coef": float(c), "vertices": v.tolist()} for c, v in zip(chain.coefs, chain.vertices)],
    }


def write_json(path: Path, data) -> Path:
    """Escribe `data` como JSON y devuelve la ruta (para pasarla a la CLI)."""
    path.write_bytes(orjson.dumps(data))
    return path
