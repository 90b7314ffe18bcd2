# path: app/services/singvals.py
"""
Valores singulares de perturbaciones de rango uno B − τvu*.

La matriz de Gram (B − τvu*)*(B − τvu*) = A − τ·wu* − τ·uw* + τ²·uu*, con
A = B*B y w = B*v, es una perturbación de rango dos de A. Su polinomio
característico se arma como R_τ(x)·det(x − A) con las funciones de Weyl de A.

Los barridos en τ usan la SVD de LAPACK; los autovalores de Gram y la
compresión a u⊥ quedan como oráculos independientes.
"""

import logging
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np
import scipy.linalg
from numpy.typing import ArrayLike

from app.core.config import LIMIT_AGREEMENT_TOL, ORTHOGONALITY_TOL, PARALLEL_TOL, POLY_STRIP_TOL
from app.core.errors import InvalidInput, ScalarMultipleCase, SingularB, SingularMatrix
from app.models.singvals import (
    ConditionGrowth,
    ConvergesTo,
    SmallestSVAsymptotics,
    SVConvergenceTable,
    SVLimits,
    VanishesLinearly,
)
from app.services.numcore import (
    CMatrix,
    CPoly,
    CVector,
    as_cmatrix,
    as_cvector,
    eigenvalues_hermitian,
    inner,
    poly_roots,
    solve_linear,
)
from app.services.rank2 import Rank2Perturbation, rank2_polys, strip_to_scale
from app.services.weyl import weyl_numerator

logger = logging.getLogger(__name__)

_UNIT_TOL = 1e-12


# ------------------------------------------------------------------------------------
# TIPO
# ------------------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class SVPerturbation:
    """B (m×n), u ∈ ℂⁿ, v ∈ ℂᵐ unitarios y τ ≥ 0."""

    B: CMatrix
    u: CVector
    v: CVector
    tau: float = 0.0
    scalar_multiple: bool = False

    @classmethod
    def build(
        cls,
        B: ArrayLike,
        u: ArrayLike,
        v: ArrayLike,
        tau: float = 0.0,
        *,
        parallel_tol: float = PARALLEL_TOL,
    ) -> "SVPerturbation":
        """
        Valida las dimensiones y las normas y marca el caso B*v ∥ u.

        Raises:
            InvalidInput: dimensiones inconsistentes, ‖u‖ ≠ 1, ‖v‖ ≠ 1 o τ < 0.
        """
        B = as_cmatrix(B, square=False, name="B")
        m, n = B.shape
        u = as_cvector(u, size=n, name="u")
        v = as_cvector(v, size=m, name="v")
        for name, vec in (("u", u), ("v", v)):
            norm = float(np.linalg.norm(vec))
            if abs(norm - 1.0) > _UNIT_TOL:
                raise InvalidInput(f"{name} debe tener norma 1", {"norm": norm})
        if tau < 0:
            raise InvalidInput("τ debe ser no negativo", {"tau": tau})

        w = B.conj().T @ v
        w_norm = float(np.linalg.norm(w))
        # seno del ángulo entre B*v y u (u unitario)
        sine = float(np.linalg.norm(w - inner(w, u) * u)) / w_norm if w_norm > 0 else 0.0
        return cls(B=B, u=u, v=v, tau=float(tau), scalar_multiple=sine < parallel_tol)

    @property
    def n(self) -> int:
        return self.B.shape[1]

    @property
    def gram_base(self) -> CMatrix:
        return self.B.conj().T @ self.B

    @property
    def w(self) -> CVector:
        return as_cvector(self.B.conj().T @ self.v)

    def with_tau(self, tau: float) -> "SVPerturbation":
        return replace(self, tau=float(tau))

    def matrix(self) -> CMatrix:
        return self.B - self.tau * np.outer(self.v, np.conj(self.u))


def _require_generic(P: SVPerturbation) -> None:
    if P.scalar_multiple:
        raise ScalarMultipleCase("B*v es múltiplo de u: aplica la teoría de perturbaciones usual")


# ------------------------------------------------------------------------------------
# POLINOMIOS
# ------------------------------------------------------------------------------------

def _gram_pieces(P: SVPerturbation) -> tuple[CPoly, CPoly, CPoly, float]:
    """(det(x−A), det·(Q_uw + Q_wu), det·(−Q_uu + Q_uwQ_wu − Q_wwQ_uu), escala)."""
    A = P.gram_base
    polys = rank2_polys(Rank2Perturbation.general(A, P.u, P.w, P.w, P.u))
    p_uu = weyl_numerator(A, P.u, P.u)
    linear = polys.uw + polys.gh
    quadratic = polys.q - p_uu
    return polys.base, linear, quadratic, polys.scale


def gram_char_poly(P: SVPerturbation) -> CPoly:
    """
    R_τ(x)·det(x − B*B), con

        R_τ = 1 + 2τ·Re Q_{u,B*v} + τ²(−Q_uu + |Q_{u,B*v}|² − Q_{B*v,B*v}Q_uu)

    Raises:
        ScalarMultipleCase
    """
    _require_generic(P)
    base, linear, quadratic, scale = _gram_pieces(P)
    tau = P.tau
    scale *= max(1.0, tau * tau)
    return strip_to_scale(base + tau * linear + (tau * tau) * quadratic, scale, POLY_STRIP_TOL)


def sv_limit_polynomial(P: SVPerturbation) -> tuple[CPoly, SVLimits]:
    """
    Coeficiente de τ² en la expansión anterior, de grado n−1; sus ceros zⱼ
    son los cuadrados de los límites finitos de σ₂(τ), …, σₙ(τ).

    Raises:
        ScalarMultipleCase
    """
    _require_generic(P)
    _, _, quadratic, scale = _gram_pieces(P)
    q = strip_to_scale(quadratic, scale)
    if q.degree != P.n - 1:
        logger.warning(f"[SINGVALS] Polinomio límite de grado {q.degree} (esperado {P.n - 1})")

    zeros = poly_roots(q).real if q.degree >= 1 else np.zeros(0)
    zeros = np.sort(np.clip(zeros, 0.0, None))[::-1]
    sigma1 = float(np.linalg.svd(np.asarray(P.B), compute_uv=False)[0])
    limits = np.sqrt(zeros)
    bound = bool(limits.size == 0 or sigma1 > limits[0])
    if not bound:
        logger.warning(f"[SINGVALS] σ₁(0)={sigma1:.6g} no supera √z₁={limits[0]:.6g}")

    compressed = sv_limits_by_compression(P)
    k = min(limits.size, compressed.size)
    gap = float(np.max(np.abs(limits[:k] - compressed[:k]))) if k else 0.0
    if gap > LIMIT_AGREEMENT_TOL * max(1.0, sigma1):
        logger.warning(f"[SINGVALS] Límites polinomiales y por compresión difieren en {gap:.3g}")

    return q, SVLimits(
        zeros=[float(z) for z in zeros],
        finite_limits=[float(s) for s in limits],
        sigma1_at_zero=sigma1,
        bound_holds=bound,
        compression_gap=gap,
    )


def sv_limits_by_compression(P: SVPerturbation) -> np.ndarray:
    """
    Límites finitos como raíces de los autovalores de la compresión hermítica
    P⊥B*(I − vv*)BP⊥ a u⊥, en orden decreciente.
    """
    basis = scipy.linalg.null_space(np.conj(P.u)[None, :])
    projected = P.B @ basis
    projected = projected - np.outer(P.v, np.conj(P.v) @ projected)
    gram = np.conj(projected.T) @ projected
    values = np.sqrt(np.clip(eigenvalues_hermitian(gram), 0.0, None))
    return values[::-1]


def singular_values(P: SVPerturbation) -> np.ndarray:
    """σ₁ ≥ σ₂ ≥ … de B − τvu*."""
    return np.linalg.svd(np.asarray(P.matrix()), compute_uv=False)


# ------------------------------------------------------------------------------------
# VALOR SINGULAR MÍNIMO Y NÚMERO DE CONDICIÓN
# ------------------------------------------------------------------------------------

@dataclass(frozen=True)
class _InverseData:
    B_inv: CMatrix
    B_inv_v: CVector
    B_adj_inv_u: CVector  # B⁻*u
    kappa: complex
    vanishing: bool


def _inverse_data(B: ArrayLike, u: ArrayLike, v: ArrayLike, orth_tol: float) -> _InverseData:
    B = as_cmatrix(B, name="B")
    n = B.shape[0]
    u = as_cvector(u, size=n, name="u")
    v = as_cvector(v, size=n, name="v")
    try:
        B_inv = np.column_stack([solve_linear(B, e) for e in np.eye(n, dtype=np.complex128)])
    except SingularMatrix as exc:
        raise SingularB("B no es invertible", exc.detail) from exc

    B_inv_v = B_inv @ v
    B_adj_inv_u = B_inv.conj().T @ u
    kappa = inner(B_inv_v, u)
    scale = float(np.linalg.norm(B_inv_v) * np.linalg.norm(B_adj_inv_u))
    vanishing = abs(kappa) < orth_tol * max(scale, 1.0)
    logger.debug(f"[SINGVALS] u*B⁻¹v = {kappa:.3e} (escala {scale:.3e}) -> {'se anula' if vanishing else 'no nulo'}")
    return _InverseData(B_inv, B_inv_v, B_adj_inv_u, kappa, vanishing)


def smallest_sv_asymptotics(
    B: ArrayLike,
    u: ArrayLike,
    v: ArrayLike,
    *,
    orth_tol: float = ORTHOGONALITY_TOL,
) -> SmallestSVAsymptotics:
    """
    Comportamiento de σₙ(B − τvu*) para τ → ∞ (B cuadrada invertible).

    Si κ = u*B⁻¹v ≠ 0, (B − τvu*)⁻¹ → B_∞ = B⁻¹ − κ⁻¹B⁻¹vu*B⁻¹ y
    σₙ(τ) → 1/σ_max(B_∞). Si κ = 0, σₙ(τ)·τ → 1/(‖B⁻¹v‖·‖B⁻*u‖).

    Raises:
        SingularB
    """
    data = _inverse_data(B, u, v, orth_tol)
    if data.vanishing:
        rate = 1.0 / float(np.linalg.norm(data.B_inv_v) * np.linalg.norm(data.B_adj_inv_u))
        return VanishesLinearly(rate=rate, kappa=data.kappa)

    b_inf = data.B_inv - np.outer(data.B_inv_v, np.conj(data.B_adj_inv_u)) / data.kappa
    sigma_max = float(np.linalg.svd(b_inf, compute_uv=False)[0])
    return ConvergesTo(limit=1.0 / sigma_max, kappa=data.kappa, b_infinity=b_inf)


def condition_number_asymptotics(
    B: ArrayLike,
    u: ArrayLike,
    v: ArrayLike,
    *,
    orth_tol: float = ORTHOGONALITY_TOL,
) -> ConditionGrowth:
    """
    κ₂(B − τvu*) ~ σ_max(B_∞)·τ si u*B⁻¹v ≠ 0, y ~ ‖B⁻¹v‖·‖B⁻*u‖·τ² si u*B⁻¹v = 0.

    Combina σ₁(τ) = τ + o(τ) con el comportamiento de σₙ(τ).
    """
    branch = smallest_sv_asymptotics(B, u, v, orth_tol=orth_tol)
    kappa0 = float(np.linalg.cond(np.asarray(B, dtype=np.complex128)))
    if isinstance(branch, ConvergesTo):
        return ConditionGrowth(kind="linear", order=1, coeff=1.0 / branch.limit, condition_at_zero=kappa0)
    return ConditionGrowth(kind="quadratic", order=2, coeff=1.0 / branch.rate, condition_at_zero=kappa0)


# ------------------------------------------------------------------------------------
# TABLA DE CONVERGENCIA
# ------------------------------------------------------------------------------------

def loglog_slope(taus: ArrayLike, values: ArrayLike) -> float | None:
    """Pendiente de mínimos cuadrados de log(values) contra log(taus) (None si hay < 2 puntos útiles)."""
    taus = np.asarray(taus, dtype=float)
    values = np.asarray(values, dtype=float)
    ok = (taus > 0) & np.isfinite(values) & (values > 0)
    if np.count_nonzero(ok) < 2:
        return None
    slope, _ = np.polyfit(np.log(taus[ok]), np.log(values[ok]), 1)
    return float(slope)


def sv_convergence_table(P: SVPerturbation, taus: Sequence[float]) -> SVConvergenceTable:
    """
    Para cada τ: σ₁(τ), …, |σⱼ(τ) − √z_{j−1}| (j ≥ 2) y la pendiente log-log
    por índice. En la rama que se anula (B cuadrada, u*B⁻¹v = 0) agrega σₙ(τ)·τ.

    Raises:
        InvalidInput: grilla vacía, con negativos o no creciente.
    """
    taus = np.asarray(list(taus), dtype=float)
    if taus.size == 0 or np.any(taus < 0) or np.any(np.diff(taus) <= 0):
        raise InvalidInput("La grilla de τ debe ser no negativa y estrictamente creciente")

    _, limits = sv_limit_polynomial(P)
    lim = np.asarray(limits.finite_limits)

    rows, dists = [], []
    for tau in taus:
        sv = singular_values(P.with_tau(tau))
        rows.append([float(x) for x in sv])
        k = min(sv.size - 1, lim.size)
        dists.append([float(abs(sv[j + 1] - lim[j])) for j in range(k)])

    width = min(len(d) for d in dists)
    dist_arr = np.array([d[:width] for d in dists])
    slopes = [loglog_slope(taus, dist_arr[:, j]) for j in range(width)]

    scaled = None
    m, n = P.B.shape
    if m == n:
        try:
            branch = smallest_sv_asymptotics(P.B, P.u, P.v)
        except SingularB:
            branch = None
        if isinstance(branch, VanishesLinearly):
            scaled = [row[-1] * tau for row, tau in zip(rows, taus)]

    logger.info(f"[SINGVALS] Tabla con {taus.size} valores de τ; pendientes {slopes}")
    return SVConvergenceTable(
        taus=[float(t) for t in taus],
        singular_values=rows,
        limits=[float(x) for x in lim],
        compression_gap=limits.compression_gap,
        distances=dists,
        slopes=slopes,
        scaled_smallest=scaled,
    )
