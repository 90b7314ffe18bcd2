# app/models/meixner.py

import math
from typing import Any, Dict, List, Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field

from app.models.measures import Atom


class MeixnerParams(BaseModel):
    """u = (γ, a, b, c) de la clase de Meixner libre."""

    model_config = ConfigDict(frozen=True)

    gamma: float
    a: float
    b: float = Field(..., ge=0.0)
    c: float = Field(..., ge=0.0)

    @property
    def support(self) -> Tuple[float, float]:
        r = 2 * math.sqrt(self.b)
        return (self.a - r, self.a + r)

    def as_tuple(self) -> Tuple[float, float, float, float]:
        return (self.gamma, self.a, self.b, self.c)


class MeixnerClassification(BaseModel):
    """
    Conteo de átomos según las reglas sobre f y Δ_g, más las masas reales
    (residuos de G en la hoja física). Una ubicación de la regla que no es
    polo de G figura con masa 0 y `virtual=True`.
    """

    model_config = ConfigDict(frozen=True)

    atom_count: Literal[0, 1, 2]
    atom_locations: List[float]
    discriminant: float = Field(..., description="Δ_g = c²[(γ−a)² − 4b(1−c)]")
    f_coeffs: List[float] = Field(
        ..., description="Coeficientes de f en potencias ascendentes de (x − a)"
    )
    atoms: List[Atom] = Field(default_factory=list)
    delta: bool = Field(default=False, description="c = 0: la medida es δ_γ")


class SRange(BaseModel):
    """Subconjunto de ℝ: unión de intervalos abiertos más puntos aislados, menos puntos excluidos."""

    model_config = ConfigDict(frozen=True)

    intervals: List[Tuple[float, float]] = Field(default_factory=list)
    points: List[float] = Field(default_factory=list)
    excluded: List[float] = Field(default_factory=list)

    def contains(self, s: float, tol: float = 1e-10) -> bool:
        if any(abs(s - p) <= tol for p in self.points):
            return True
        if any(abs(s - e) <= tol for e in self.excluded):
            return False
        return any(lo < s < hi for lo, hi in self.intervals)

    def describe(self) -> str:
        parts = [f"({lo:g}, {hi:g})" for lo, hi in self.intervals] + [f"{{{p:g}}}" for p in self.points]
        text = " ∪ ".join(parts) if parts else "∅"
        if self.excluded:
            text += " ∖ {" + ", ".join(f"{e:g}" for e in self.excluded) + "}"
        return text


class MeixnerTransitionReport(BaseModel):
    """Rango de s para el que U^s(μ_u) = μ_{u_s} alcanza el número de átomos `target`."""

    model_config = ConfigDict(frozen=True)

    transition: Literal["1to2", "0to1", "0to2"]
    target: Literal[1, 2]
    case: str = Field(..., description="Caso de la clasificación aplicado")
    params: MeixnerParams
    range: SRange
    details: Dict[str, Any] = Field(default_factory=dict)
    note: Optional[str] = None
