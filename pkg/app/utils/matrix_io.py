# path: app/utils/matrix_io.py
"""
Lectura de matrices y vectores para la CLI.

JSON: un objeto con entradas nombradas (A, u, w, g, h, B, v, a, b, ...).
Cada valor es una lista (real) o un par {"re": ..., "im": ...}; los
escalares se devuelven como float.

    {"A": {"re": [[1, 0], [0, 2]], "im": [[0, 0], [0, 0]]}, "u": [0.6, 0.8]}

CSV: una única matriz real, una fila por línea; se devuelve bajo `default_name`.
"""

import csv
import json
import logging
from pathlib import Path
from typing import Any, Dict, Union

import numpy as np

from app.core.errors import InvalidInput

logger = logging.getLogger(__name__)

Loaded = Dict[str, Union[np.ndarray, float]]


def _decode(name: str, value: Any) -> Union[np.ndarray, float]:
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return float(value)
    if isinstance(value, dict):
        if "re" not in value:
            raise InvalidInput(f"La entrada '{name}' necesita la clave 're'")
        re_part = np.asarray(value["re"], dtype=float)
        im_part = np.asarray(value.get("im", np.zeros_like(re_part)), dtype=float)
        if re_part.shape != im_part.shape:
            raise InvalidInput(
                f"Las partes 're' e 'im' de '{name}' tienen formas distintas",
                {"re": re_part.shape, "im": im_part.shape},
            )
        return re_part + 1j * im_part
    if isinstance(value, list):
        return np.asarray(value, dtype=float)
    raise InvalidInput(f"Tipo no soportado para '{name}'", {"type": type(value).__name__})


def load_json(path: Path) -> Loaded:
    try:
        payload = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise InvalidInput(f"No se pudo leer el JSON de entrada: {exc}", {"path": str(path)}) from exc
    if not isinstance(payload, dict):
        raise InvalidInput("El JSON de entrada debe ser un objeto", {"path": str(path)})

    out: Loaded = {}
    for name, value in payload.items():
        try:
            out[name] = _decode(name, value)
        except ValueError as exc:
            raise InvalidInput(f"Valores no numéricos en '{name}'", {"path": str(path)}) from exc
    return out


def load_csv(path: Path, default_name: str = "A") -> Loaded:
    try:
        with open(path, newline="", encoding="utf-8") as handle:
            rows = [row for row in csv.reader(handle) if row and not row[0].lstrip().startswith("#")]
    except OSError as exc:
        raise InvalidInput(f"No se pudo leer el CSV de entrada: {exc}", {"path": str(path)}) from exc

    widths = {len(row) for row in rows}
    if not rows or len(widths) != 1:
        raise InvalidInput("El CSV debe tener filas de igual longitud", {"path": str(path)})
    try:
        matrix = np.array([[float(cell) for cell in row] for row in rows])
    except ValueError as exc:
        raise InvalidInput("El CSV contiene valores no numéricos", {"path": str(path)}) from exc
    return {default_name: matrix}


def load_input(path: Path, default_name: str = "A") -> Loaded:
    """Despacha por extensión: .json o .csv."""
    suffix = Path(path).suffix.lower()
    if suffix == ".json":
        data = load_json(path)
    elif suffix == ".csv":
        data = load_csv(path, default_name)
    else:
        raise InvalidInput("Formato de entrada no soportado (se espera .json o .csv)", {"path": str(path)})
    logger.debug(f"[CLI] Entrada {path}: {sorted(data)}")
    return data


def require(data: Loaded, name: str) -> np.ndarray:
    if name not in data:
        raise InvalidInput(f"Falta la entrada '{name}'", {"available": sorted(data)})
    value = data[name]
    if not isinstance(value, np.ndarray):
        raise InvalidInput(f"La entrada '{name}' debe ser un arreglo")
    return value
