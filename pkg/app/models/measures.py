# app/models/measures.py

from typing import Any, Callable, List, Literal, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from app.core.config import MASS_TOL


class Atom(BaseModel):
    model_config = ConfigDict(frozen=True)

    location: float
    mass: float = Field(..., ge=0.0)
    virtual: bool = Field(default=False, description="Ubicación dada por la regla pero sin polo en la hoja física")


class JacobiData(BaseModel):
    """
    Coeficientes de recurrencia (aₙ, bₙ): aₙ en la diagonal, bₙ > 0 fuera de
    ella. Más allá de la última entrada se repite el último valor (cola constante).
    """

    model_config = ConfigDict(frozen=True)

    a: List[float] = Field(..., min_length=1)
    b: List[float] = Field(..., min_length=1)

    @field_validator("b")
    @classmethod
    def positive_b(cls, value: List[float]) -> List[float]:
        if any(x < 0 for x in value):
            raise ValueError("Los coeficientes b deben ser no negativos")
        return value

    def coefficients(self, N: int) -> tuple[np.ndarray, np.ndarray]:
        """(a₀..a_{N−1}, b₀..b_{N−2}) con cola constante."""
        a = np.array(self.a[:N] + [self.a[-1]] * max(0, N - len(self.a)), dtype=float)
        b = np.array(self.b[: N - 1] + [self.b[-1]] * max(0, N - 1 - len(self.b)), dtype=float)
        return a, b


class TransformParams(BaseModel):
    """Parámetros de U^{p,q}, t_τ o W^{s,t} más el primer momento m de la medida base."""

    model_config = ConfigDict(frozen=True)

    kind: Literal["U", "T", "W"]
    p: Optional[float] = None
    q: Optional[float] = Field(default=None, description="q ≥ 0")
    tau: Optional[float] = None
    s: Optional[float] = None
    t: Optional[float] = None
    m: Optional[float] = Field(default=None, description="Primer momento; None toma el de la medida base")

    @model_validator(mode="after")
    def check_kind(self) -> "TransformParams":
        required = {"U": ("p", "q"), "T": ("tau",), "W": ("s", "t")}[self.kind]
        missing = [name for name in required if getattr(self, name) is None]
        if missing:
            raise ValueError(f"Faltan parámetros para {self.kind}: {missing}")
        if self.kind == "U" and self.q < 0:
            raise ValueError("U^{p,q} requiere q ≥ 0")
        return self

    @classmethod
    def from_deformation(cls, s: float, t: float, m: Optional[float] = None) -> "TransformParams":
        """U asociada a la deformación antidiagonal: p = 1−s−t, q = (1−s)(1−t)."""
        return cls(kind="U", p=1 - s - t, q=(1 - s) * (1 - t), m=m)


class SpectralMeasure(BaseModel):
    """
    Medida de probabilidad sobre ℝ: átomos, parte absolutamente continua
    opcional y, si se conocen, coeficientes de Jacobi o transformada cerrada.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    name: str
    atoms: List[Atom] = Field(default_factory=list)
    support: Optional[Tuple[float, float]] = Field(default=None, description="Soporte [A, B] de la densidad")
    density: Optional[Callable[[np.ndarray], np.ndarray]] = None
    jacobi: Optional[JacobiData] = None
    cauchy: Optional[Any] = Field(default=None, description="Transformada de Cauchy en forma cerrada")
    first_moment: float = 0.0

    @model_validator(mode="after")
    def check_mass(self) -> "SpectralMeasure":
        if self.density is None and self.jacobi is None and self.cauchy is None:
            total = sum(atom.mass for atom in self.atoms)
            if abs(total - 1.0) > MASS_TOL:
                raise ValueError(f"La masa total de los átomos es {total}, no 1")
        if self.support is not None and self.support[0] > self.support[1]:
            raise ValueError("Soporte con extremos invertidos")
        return self


class StieltjesResult(BaseModel):
    """Densidad recuperada en la grilla y átomos detectados."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    x: np.ndarray
    density: np.ndarray = Field(..., description="NaN en puntos marcados o enmascarados")
    flagged: np.ndarray = Field(..., description="Extrapolación no convergente")
    masked: np.ndarray = Field(..., description="Puntos a menos del radio de un átomo")
    atoms: List[Atom]
    eps_schedule: List[float]
    total_mass: float = Field(..., description="Σ masas + ∫densidad (trapecios)")
