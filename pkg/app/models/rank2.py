# app/models/rank2.py

from typing import List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field


class AsymptoticSpectrum(BaseModel):
    """Espectro de A − (αr)uw* − (βr)gh* cuando r → ∞."""

    model_config = ConfigDict(frozen=True)

    divergent: List[complex] = Field(..., description="λᵢ tales que hay autovalores rλᵢ + o(r)")
    perturbation_eigenvalues: List[complex] = Field(
        ..., description="Autovalores no nulos de αuw* + βgh* (iguales a −λᵢ)"
    )
    finite_limits: List[complex] = Field(..., description="Ceros del polinomio límite q")
    degenerate: bool = Field(default=False, description="rank(αuw* + βgh*) < 2")
    q_simple_roots: bool = Field(default=True, description="Los ceros de q son simples")


class InterlacingReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    applies: bool = Field(..., description="El polo x₀ de la hipérbola queda fuera de [min λ, max λ]")
    x0: float = Field(..., description="Singularidad de la hipérbola, stm/(st − s − t)")
    lambda_min: float
    lambda_max: float
    m: float = Field(..., description="⟨u, Au⟩")
    s: float
    t: float
    realness_guaranteed: bool = Field(
        default=False, description="(1−s)(1−t) > 0: espectro real aunque no necesariamente entrelazado"
    )


class PhaseTransitionReport(BaseModel):
    """Resultado del test de transición de fase para s → 0⁺."""

    model_config = ConfigDict(frozen=True)

    verdict: Literal["stays", "leaves"]
    a_minus2: complex = Field(..., description="Coeficiente de (λ₀ − z)⁻² en Q_uw + Q_gh")
    eps_schedule: List[float]
    estimates: List[complex] = Field(..., description="−ε²·[Q_uw + Q_gh](λ₀ + iε) por cada ε")
    extrapolations: List[complex] = Field(..., description="Extrapolaciones lineales en ε de pares consecutivos")
    split_coefficient: complex = Field(..., description="c con z± ≈ λ₀ ± c·√s")
    direct_test_real: bool = Field(..., description="Q_uw + Q_gh real en λ₀ ± iε (ε mínimo)")
    degenerate: bool = Field(default=False, description="a₋₂ ≈ 0: caso frontera")
    jordan_pair: List[complex] = Field(default_factory=list, description="Autovalores de A asociados a la cadena")
    note: Optional[str] = None
