from __future__ import annotations

import csv
import logging
import math
from pathlib import Path
from typing import Type, TypeVar

import orjson
from pydantic import BaseModel, ValidationError

from ..errors import InputFormatError
from ..schemas import ExperimentReport

logger = logging.getLogger("report_writer")

Model = TypeVar("Model", bound=BaseModel)

JSON_OPTIONS = orjson.OPT_INDENT_2 | orjson.OPT_SORT_KEYS | orjson.OPT_SERIALIZE_NUMPY | orjson.OPT_APPEND_NEWLINE


# ============================================================
# Lectura de entradas JSON
# ============================================================

def read_input(path: Path, model: Type[Model]) -> Model:
    """Lee y valida un archivo JSON; los errores citan línea/columna o el campo."""
    try:
        raw = Path(path).read_bytes()
    except OSError as exc:
        raise InputFormatError(f"{path}: cannot read file ({exc.strerror})") from exc
    try:
        data = orjson.loads(raw)
    except orjson.JSONDecodeError as exc:
        raise InputFormatError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
    try:
        return model.model_validate(data)
    except ValidationError as exc:
        first = exc.errors()[0]
        location = ".".join(str(part) for part in first["loc"]) or "<root>"
        raise InputFormatError(f"{path}: field '{location}': {first['msg']}") from exc


# ============================================================
# Escritura de reportes (JSON + CSV)
# ============================================================

def format_float(value: float) -> str:
    """17 cifras significativas; siempre se lee de vuelta como float."""
    text = format(value, ".17g")
    return text if "." in text or "e" in text else text + ".0"


def _fixed_floats(value):
    if isinstance(value, float):
        # JSON no admite inf/nan
        return orjson.Fragment(format_float(value)) if math.isfinite(value) else None
    if isinstance(value, dict):
        return {key: _fixed_floats(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [_fixed_floats(item) for item in value]
    return value


def dumps_report(report: ExperimentReport) -> bytes:
    return orjson.dumps(_fixed_floats(report.model_dump(mode="json", by_alias=True)), option=JSON_OPTIONS)


def _csv_value(value) -> str:
    if isinstance(value, float):
        return format_float(value)
    if isinstance(value, (list, tuple)):
        return ";".join(_csv_value(v) for v in value)
    return "" if value is None else str(value)


def write_report(report: ExperimentReport, out_dir: Path) -> list[Path]:
    """Escribe <out>/<name>.json y, si hay filas, <out>/<name>.csv."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    json_path = out_dir / f"{report.name}.json"
    json_path.write_bytes(dumps_report(report))
    written = [json_path]
    if report.rows:
        fieldnames: list[str] = []
        for row in report.rows:
            fieldnames.extend(k for k in row if k not in fieldnames)
        csv_path = out_dir / f"{report.name}.csv"
        with csv_path.open("w", newline="", encoding="utf-8") as handle:
            writer = csv.DictWriter(handle, fieldnames=fieldnames)
            writer.writeheader()
            for row in report.rows:
                writer.writerow({k: _csv_value(row.get(k)) for k in fieldnames})
        written.append(csv_path)
    logger.info(f"report '{report.name}' written to {out_dir}")
    return written
