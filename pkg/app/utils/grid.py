# path: app/utils/grid.py
"""
Grillas de parámetros para los barridos de la CLI.

Sintaxis: ejes separados por coma, cada uno `nombre=especificación` con

    valor                  un único valor           t=1.2
    inicio:fin:n           n puntos equiespaciados  s=-3:3:61
    inicio:fin:n:log       n puntos logarítmicos    tau=1e1:1e5:9:log
    v1;v2;v3               lista explícita          tau=1;2;4

La grilla es el producto cartesiano de los ejes en el orden dado (el último
eje varía más rápido). La evaluación en paralelo conserva ese orden.
"""

import itertools
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Dict, List, Sequence, TypeVar

import numpy as np

from app.core.config import GRID_WORKERS
from app.core.errors import GridParseError

logger = logging.getLogger(__name__)

T = TypeVar("T")
GridPoint = Dict[str, float]


def _number(text: str, axis: str) -> float:
    try:
        value = float(text)
    except ValueError as exc:
        raise GridParseError(f"Valor no numérico en el eje '{axis}'", {"value": text}) from exc
    if not math.isfinite(value):
        raise GridParseError(f"Valor no finito en el eje '{axis}'", {"value": text})
    return value


def parse_axis(name: str, raw: str) -> List[float]:
    """Valores de un eje a partir de su especificación."""
    raw = raw.strip()
    if ";" in raw:
        return [_number(part, name) for part in raw.split(";") if part.strip()]

    parts = raw.split(":")
    if len(parts) == 1:
        return [_number(parts[0], name)]

    log_scale = parts[-1].strip().lower() == "log"
    if log_scale:
        parts = parts[:-1]
    if len(parts) != 3:
        raise GridParseError(f"El eje '{name}' debe tener la forma inicio:fin:n[:log]", {"axis": raw})

    start, stop = _number(parts[0], name), _number(parts[1], name)
    try:
        count = int(parts[2])
    except ValueError as exc:
        raise GridParseError(f"Cantidad de puntos inválida en '{name}'", {"axis": raw}) from exc
    if count < 1:
        raise GridParseError(f"El eje '{name}' necesita al menos un punto", {"axis": raw})

    if log_scale:
        if start <= 0 or stop <= 0:
            raise GridParseError(f"La escala logarítmica de '{name}' requiere extremos positivos", {"axis": raw})
        return [float(x) for x in np.geomspace(start, stop, count)]
    return [float(x) for x in np.linspace(start, stop, count)]


def parse_grid(text: str | None, defaults: Dict[str, str] | None = None) -> List[GridPoint]:
    """
    Expande la especificación en la lista ordenada de puntos.

    Ejemplo:
        parse_grid("s=0:1:3,t=2") -> [{"s": 0.0, "t": 2.0}, {"s": 0.5, "t": 2.0}, {"s": 1.0, "t": 2.0}]

    Raises:
        GridParseError
    """
    axes: Dict[str, List[float]] = {}
    for name, raw in (defaults or {}).items():
        axes[name] = parse_axis(name, raw)

    for chunk in (text or "").split(","):
        if not chunk.strip():
            continue
        if "=" not in chunk:
            raise GridParseError("Cada eje debe tener la forma nombre=especificación", {"chunk": chunk})
        name, raw = chunk.split("=", 1)
        name = name.strip()
        if not name:
            raise GridParseError("Eje sin nombre", {"chunk": chunk})
        axes[name] = parse_axis(name, raw)

    if not axes:
        return [{}]
    names = list(axes)
    return [dict(zip(names, combo)) for combo in itertools.product(*(axes[n] for n in names))]


def axis_values(points: Sequence[GridPoint], name: str) -> List[float]:
    """Valores distintos de un eje, en orden de aparición."""
    seen: List[float] = []
    for point in points:
        if name in point and point[name] not in seen:
            seen.append(point[name])
    return seen


def map_grid(fn: Callable[[GridPoint], T], points: Sequence[GridPoint], workers: int = GRID_WORKERS) -> List[T]:
    """
    Aplica fn a cada punto; con workers > 1 usa un ThreadPoolExecutor.
    Los resultados se devuelven en el orden de la grilla.
    """
    if workers <= 1 or len(points) <= 1:
        return [fn(point) for point in points]
    logger.info(f"[GRID] Evaluando {len(points)} puntos con {workers} workers")
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, points))
