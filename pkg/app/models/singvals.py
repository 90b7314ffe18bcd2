# app/models/singvals.py

from typing import List, Literal, Optional, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field


class SVLimits(BaseModel):
    """Valores singulares de B − τvu* para τ → ∞."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    divergent_rate: Literal["tau"] = Field(default="tau", description="σ₁(τ) = τ + o(τ)")
    zeros: List[float] = Field(..., description="Ceros z₁ ≥ … ≥ z_{n−1} del polinomio límite")
    finite_limits: List[float] = Field(..., description="√zⱼ en orden decreciente")
    sigma1_at_zero: float = Field(..., description="σ₁(B)")
    bound_holds: bool = Field(..., description="σ₁(0) > √z₁")
    compression_gap: float = Field(..., description="max |√zⱼ − límite por compresión de B a u⊥|")


class VanishesLinearly(BaseModel):
    """σₙ(τ) = rate·τ⁻¹ + o(τ⁻¹), caso u*B⁻¹v = 0."""

    model_config = ConfigDict(frozen=True)

    kind: Literal["vanishes_linearly"] = "vanishes_linearly"
    rate: float = Field(..., description="1 / (‖B⁻¹v‖·‖B⁻*u‖)")
    kappa: complex = Field(..., description="u*B⁻¹v observado")


class ConvergesTo(BaseModel):
    """σₙ(τ) → 1/σ_max(B_∞), caso u*B⁻¹v ≠ 0."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    kind: Literal["converges_to"] = "converges_to"
    limit: float
    kappa: complex
    b_infinity: np.ndarray = Field(..., description="B⁻¹ − (u*B⁻¹v)⁻¹·B⁻¹vu*B⁻¹")


SmallestSVAsymptotics = Union[VanishesLinearly, ConvergesTo]


class ConditionGrowth(BaseModel):
    """κ₂(B − τvu*) ~ coeff·τ^order."""

    model_config = ConfigDict(frozen=True)

    kind: Literal["linear", "quadratic"]
    order: int = Field(..., description="1 (lineal) o 2 (cuadrático)")
    coeff: float
    condition_at_zero: float = Field(..., description="κ₂(B)")


class SVConvergenceTable(BaseModel):
    model_config = ConfigDict(frozen=True)

    taus: List[float]
    singular_values: List[List[float]] = Field(..., description="σ₁(τ) ≥ … por fila")
    limits: List[float] = Field(..., description="√z_{j−1} asociados a σⱼ, j ≥ 2")
    compression_gap: float = Field(default=0.0, description="Diferencia máxima con los límites por compresión")
    distances: List[List[float]] = Field(..., description="|σⱼ(τ) − √z_{j−1}|, j ≥ 2")
    slopes: List[Optional[float]] = Field(..., description="Pendiente log-log por índice j ≥ 2")
    scaled_smallest: Optional[List[float]] = Field(
        default=None, description="σₙ(τ)·τ (solo en la rama que se anula)"
    )
