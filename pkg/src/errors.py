from __future__ import annotations


class GeometryError(Exception):
    """
    Excepción de negocio para cadenas, formas y normas.
    `http_status` lo usa la API; `exit_code` lo usa la CLI.
    """
    http_status: int = 422
    exit_code: int = 1

    def __init__(self, message: str, http_status: int | None = None):
        super().__init__(message)
        if http_status is not None:
            self.http_status = http_status


class DimensionMismatchError(GeometryError):
    """Dimensiones (n, m, grado) incompatibles entre operandos."""


class DegenerateInputError(GeometryError):
    """Entrada sin volumen donde se requiere uno (p. ej. caja vacía)."""


class NoBoundaryError(GeometryError):
    """El borde de una 0-cadena no está definido."""


class NotRepresentableError(GeometryError):
    """Un término no se puede escribir sobre las celdas de un complejo."""


class UnsupportedCaseError(GeometryError):
    """Caso fuera de lo implementado (refine, profundidad de búsqueda...)."""
    http_status = 400


class ParameterRangeError(GeometryError):
    """Parámetro fuera de rango (λ, índice de plano, nivel, presupuesto)."""


class LPError(GeometryError):
    """Programa lineal infactible, no acotado o sin converger."""
    http_status = 500


class InputFormatError(GeometryError):
    """Archivo de entrada malformado (el mensaje incluye línea y columna)."""
