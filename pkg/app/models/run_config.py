# app/models/run_config.py

import math
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator

from app.core.config import DEFAULT_SEED, GRID_WORKERS

Subcommand = Literal["spectrum", "svsweep", "density", "interlace"]
OutputFormat = Literal["csv", "json", "xlsx"]


class RunConfig(BaseModel):
    """Invocación validada de la CLI. Se vuelca como eco en cada artefacto."""

    model_config = ConfigDict(frozen=True)

    subcommand: Subcommand
    input: Optional[Path] = Field(default=None, description="Archivo JSON/CSV con matrices y vectores")
    example: Optional[str] = Field(default=None, description="Entrada incorporada en lugar de --input")
    grid: Optional[str] = Field(default=None, description="Especificación de la grilla de parámetros")
    out: Optional[Path] = Field(default=None, description="Archivo de salida; stdout si falta")
    format: OutputFormat = "csv"
    seed: int = DEFAULT_SEED
    workers: int = Field(default=GRID_WORKERS, ge=1)
    tolerances: Dict[str, float] = Field(default_factory=dict, description="Overrides de --tol-*")
    options: Dict[str, Any] = Field(default_factory=dict, description="Opciones propias del subcomando")

    @field_validator("tolerances")
    @classmethod
    def finite_tolerances(cls, value: Dict[str, float]) -> Dict[str, float]:
        for name, tol in value.items():
            if not math.isfinite(tol) or tol <= 0:
                raise ValueError(f"La tolerancia '{name}' debe ser finita y positiva")
        return value

    def tol(self, name: str, default: float) -> float:
        return self.tolerances.get(name, default)

    def echo(self) -> Dict[str, Any]:
        """Eco determinista de la configuración (sin rutas de salida)."""
        data = self.model_dump(mode="json", exclude={"out"})
        return {k: v for k, v in data.items() if v not in (None, {}, [])}


class ResultTable(BaseModel):
    """Filas ordenadas de un subcomando más un resumen opcional."""

    columns: List[str]
    rows: List[Dict[str, Any]] = Field(default_factory=list)
    summary: Dict[str, Any] = Field(default_factory=dict)
