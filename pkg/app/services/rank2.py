# path: app/services/rank2.py
"""
Perturbaciones de rango dos A_{s,t} = A − s·uw* − t·gh*.

- Polinomio característico det(z−A)·R_{s,t}(z) armado en forma polinomial.
- Función de Weyl perturbada Q_u^{s,t} (fórmula general, formas
  antidiagonal/diagonal y sus especializaciones autoadjuntas).
- Polinomio límite q y asintótica para parámetros grandes.
- Condición suficiente de entrelazado y verificación del entrelazado.
- Test de transición de fase para parámetros pequeños sobre una cadena de Jordan.

Convención: Q_{x,y}(z) = y*(z−A)⁻¹x.
"""

import logging
from dataclasses import dataclass, replace
from typing import Literal, Sequence

import numpy as np
from numpy.typing import ArrayLike

from app.core.config import (
    AXIS_TOL,
    EXTRAPOLATION_RTOL,
    GENERICITY_TOL,
    INTERLACE_TIE_TOL,
    JORDAN_TOL,
    PHASE_EPS_SCHEDULE,
    POLE_MASK_RADIUS,
    POLE_TOL,
    POLY_STRIP_TOL,
    REAL_SPECTRUM_TOL,
    ROOT_CLUSTER_TOL,
    SELF_ADJOINT_TOL,
    SIMPLICITY_TOL,
)
from app.core.errors import (
    ComplexSpectrum,
    DegenerateDirections,
    DegenerateSpectrum,
    HypothesisViolated,
    InconsistentExtrapolation,
    InvalidInput,
    NoJordanChain,
    NotSelfAdjoint,
    PoleHit,
)
from app.models.rank2 import AsymptoticSpectrum, InterlacingReport, PhaseTransitionReport
from app.services.numcore import (
    CMatrix,
    CPoly,
    CVector,
    as_cmatrix,
    as_cvector,
    char_poly,
    cluster_roots,
    eigenvalues_dense,
    inner,
    is_self_adjoint,
    outer,
    poly_roots,
)
from app.services.weyl import moment, resolvent_apply, weyl_partial_fractions

logger = logging.getLogger(__name__)

Shape = Literal["general", "antidiagonal", "diagonal"]


# ------------------------------------------------------------------------------------
# TIPOS
# ------------------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Rank2Perturbation:
    """
    A − s·uw* − t·gh*.

    Formas:
        general       vectores arbitrarios
        antidiagonal  A − s·u(Au)* − t·(Au)u*   (w = g = Au, h = u)
        diagonal      A − s·uu* − t·(Au)(Au)*   (w = u, g = h = Au)
    """

    A: CMatrix
    u: CVector
    w: CVector
    g: CVector
    h: CVector
    s: complex = 0.0
    t: complex = 0.0
    shape: Shape = "general"

    @classmethod
    def general(cls, A, u, w, g, h, s=0.0, t=0.0) -> "Rank2Perturbation":
        A = as_cmatrix(A, name="A")
        n = A.shape[0]
        return cls(
            A=A,
            u=as_cvector(u, size=n, name="u"),
            w=as_cvector(w, size=n, name="w"),
            g=as_cvector(g, size=n, name="g"),
            h=as_cvector(h, size=n, name="h"),
            s=complex(s),
            t=complex(t),
        )

    @classmethod
    def antidiagonal(cls, A, u, s=0.0, t=0.0) -> "Rank2Perturbation":
        A = as_cmatrix(A, name="A")
        u = as_cvector(u, size=A.shape[0], name="u")
        au = as_cvector(A @ u)
        return cls(A=A, u=u, w=au, g=au, h=u, s=complex(s), t=complex(t), shape="antidiagonal")

    @classmethod
    def diagonal(cls, A, u, s=0.0, t=0.0) -> "Rank2Perturbation":
        A = as_cmatrix(A, name="A")
        u = as_cvector(u, size=A.shape[0], name="u")
        au = as_cvector(A @ u)
        return cls(A=A, u=u, w=u, g=au, h=au, s=complex(s), t=complex(t), shape="diagonal")

    @property
    def n(self) -> int:
        return self.A.shape[0]

    def with_params(self, s: complex, t: complex) -> "Rank2Perturbation":
        return replace(self, s=complex(s), t=complex(t))

    def matrix(self) -> CMatrix:
        return self.A - self.s * outer(self.u, self.w) - self.t * outer(self.g, self.h)


@dataclass(frozen=True, eq=False)
class RFactor:
    """R_{s,t}(z) = numerator(z) / det(z−A)."""

    numerator: CPoly
    denominator: CPoly

    def __call__(self, z):
        return self.numerator(z) / self.denominator(z)


@dataclass(frozen=True, eq=False)
class LimitPolynomial:
    poly: CPoly
    roots: CVector
    simple: bool

    @property
    def degree(self) -> int:
        return self.poly.degree


@dataclass(frozen=True, eq=False)
class Rank2Polys:
    base: CPoly  # det(z−A)
    uw: CPoly  # det(z−A)·Q_{u,w}
    gh: CPoly  # det(z−A)·Q_{g,h}
    q: CPoly  # det(z−A)·(Q_uw·Q_gh − Q_gw·Q_uh)
    scale: float


def rank2_polys(P: Rank2Perturbation) -> Rank2Polys:
    X = outer(P.u, P.w)
    Y = outer(P.g, P.h)
    base = char_poly(P.A)
    with_x = char_poly(P.A - X)
    with_y = char_poly(P.A - Y)
    with_xy = char_poly(P.A - X - Y)
    scale = max(float(np.max(np.abs(p.coeffs))) for p in (base, with_x, with_y, with_xy))
    return Rank2Polys(
        base=base,
        uw=with_x - base,
        gh=with_y - base,
        q=with_xy - with_x - with_y + base,
        scale=scale,
    )


def strip_to_scale(p: CPoly, scale: float, tol: float = POLY_STRIP_TOL) -> CPoly:
    """Elimina coeficientes finales despreciables frente a una escala externa."""
    c = p.coeffs
    keep = np.flatnonzero(np.abs(c) > tol * scale)
    if keep.size == 0:
        return CPoly([0.0])
    return CPoly(c[: keep[-1] + 1])


# ------------------------------------------------------------------------------------
# POLINOMIO CARACTERÍSTICO Y FACTOR R
# ------------------------------------------------------------------------------------

def perturbed_char_poly(P: Rank2Perturbation) -> CPoly:
    """
    det(z−A)·R_{s,t}(z) = det(z−A) + s·det(z−A)Q_uw + t·det(z−A)Q_gh
                          + st·det(z−A)(Q_uwQ_gh − Q_gwQ_uh)

    Cada término se obtiene por inclusión–exclusión de polinomios
    característicos, sin divisiones polinomiales. Grado exactamente n.
    """
    polys = rank2_polys(P)
    s, t = P.s, P.t
    result = polys.base + s * polys.uw + t * polys.gh + (s * t) * strip_to_scale(polys.q, polys.scale)
    return strip_to_scale(result, polys.scale)


def perturbed_matrix(P: Rank2Perturbation) -> CMatrix:
    """Matriz densa A − s·uw* − t·gh* (oráculo para los autovalores)."""
    return as_cmatrix(P.matrix(), name="A_st")


def r_factor(P: Rank2Perturbation) -> RFactor:
    polys = rank2_polys(P)
    return RFactor(numerator=perturbed_char_poly(P), denominator=polys.base)


def _weyl_values(P: Rank2Perturbation, z: complex) -> dict[str, complex]:
    x = resolvent_apply(P.A, z, P.u)
    y = resolvent_apply(P.A, z, P.g)
    return {
        "u": inner(x, P.u),
        "uw": inner(x, P.w),
        "uh": inner(x, P.h),
        "gw": inner(y, P.w),
        "gh": inner(y, P.h),
        "gu": inner(y, P.u),
    }


def spectrum_criterion(P: Rank2Perturbation, z: complex) -> complex:
    """
    R_{s,t}(z) = 1 + sQ_uw + tQ_gh + st(Q_uwQ_gh − Q_gwQ_uh).

    Para z fuera de σ(A), z es autovalor de A_{s,t} si y solo si R_{s,t}(z) = 0.
    """
    q = _weyl_values(P, complex(z))
    s, t = P.s, P.t
    return 1 + s * q["uw"] + t * q["gh"] + s * t * (q["uw"] * q["gh"] - q["gw"] * q["uh"])


# ------------------------------------------------------------------------------------
# FUNCIÓN DE WEYL PERTURBADA
# ------------------------------------------------------------------------------------

def _checked_ratio(num: complex, den: complex, z: complex) -> complex:
    if abs(den) <= POLE_TOL * max(1.0, abs(num)):
        raise PoleHit("z es autovalor de la matriz perturbada", {"z": z})
    return num / den


def _weyl_general(P: Rank2Perturbation, z: complex) -> complex:
    q = _weyl_values(P, z)
    s, t = P.s, P.t
    R = 1 + s * q["uw"] + t * q["gh"] + s * t * (q["uw"] * q["gh"] - q["gw"] * q["uh"])
    num = q["u"] + t * (q["u"] * q["gh"] - q["gu"] * q["uh"])
    return _checked_ratio(num, R, z)


def _weyl_paired(P: Rank2Perturbation, z: complex) -> complex:
    au = P.A @ P.u
    x = resolvent_apply(P.A, z, P.u)
    q_u = inner(x, P.u)
    q_u_au = inner(x, au)
    q_au_u = z * q_u - 1.0
    q_au_au = inner(resolvent_apply(P.A, z, au), au)
    s, t = P.s, P.t

    if P.shape == "antidiagonal":
        R = 1 + s * q_u_au + t * q_au_u + s * t * (q_u_au * q_au_u - q_u * q_au_au)
        return _checked_ratio(q_u, R, z)

    num = q_u * (1 + t * q_au_au) - t * q_u_au * q_au_u
    R = (1 + s * q_u) * (1 + t * q_au_au) - s * t * q_u_au * q_au_u
    return _checked_ratio(num, R, z)


def _weyl_self_adjoint(P: Rank2Perturbation, z: complex) -> complex:
    q_u = inner(resolvent_apply(P.A, z, P.u), P.u)
    m = moment(P.A, P.u).m
    s, t = P.s, P.t

    if P.shape == "antidiagonal":
        inv = (1 - s) * (1 - t) / q_u + (s - s * t + t) * z + s * t * m
    else:
        den = (1 - t * m + t * z) * q_u - t
        if abs(den) <= POLE_TOL:
            raise PoleHit("Denominador nulo en la fórmula diagonal", {"z": z})
        inv = s + (1 + t * (z * z * q_u - m - z)) / den
    return _checked_ratio(1.0, inv, z)


def weyl_perturbed(
    P: Rank2Perturbation,
    z: complex,
    *,
    formula: Literal["auto", "general", "paired", "self_adjoint"] = "auto",
) -> complex:
    """
    Q_u^{s,t}(z) = ⟨(z − A_{s,t})⁻¹u, u⟩ por fórmula cerrada.

    Con formula="auto" se usa la especialización más fuerte disponible
    según la forma y si A es autoadjunta con ‖u‖ = 1.

    Raises:
        PoleHit: z en σ(A) o raíz del polinomio característico perturbado.
        InvalidInput: fórmula incompatible con la forma.
    """
    z = complex(z)
    self_adjoint = (
        P.shape != "general"
        and is_self_adjoint(P.A, SELF_ADJOINT_TOL)
        and abs(np.linalg.norm(P.u) - 1.0) <= 1e-10
    )
    if formula == "auto":
        formula = "self_adjoint" if self_adjoint else ("general" if P.shape == "general" else "paired")

    if formula == "general":
        return _weyl_general(P, z)
    if P.shape == "general":
        raise InvalidInput(f"La fórmula '{formula}' requiere forma antidiagonal o diagonal")
    if formula == "paired":
        return _weyl_paired(P, z)
    if not self_adjoint:
        raise NotSelfAdjoint("La fórmula autoadjunta requiere A = A* y ‖u‖ = 1")
    return _weyl_self_adjoint(P, z)


# ------------------------------------------------------------------------------------
# ASINTÓTICA PARA PARÁMETROS GRANDES
# ------------------------------------------------------------------------------------

def limit_polynomial_q(P: Rank2Perturbation, *, cluster_tol: float = ROOT_CLUSTER_TOL) -> LimitPolynomial:
    """
    q(z) = det(z−A)·(Q_uw·Q_gh − Q_gw·Q_uh), de grado n−2 para vectores genéricos.

    Raises:
        DegenerateDirections: q idénticamente nulo.
    """
    if P.n < 2:
        raise InvalidInput("limit_polynomial_q requiere n ≥ 2")
    polys = rank2_polys(P)
    q = strip_to_scale(polys.q, polys.scale)
    if q.is_zero:
        raise DegenerateDirections("q es idénticamente nulo (direcciones no genéricas)")
    if q.degree != P.n - 2:
        logger.warning(f"[RANK2] q tiene grado {q.degree} (esperado {P.n - 2}): vectores no genéricos")

    roots = poly_roots(q) if q.degree >= 1 else np.zeros(0, dtype=np.complex128)
    simple = all(mult == 1 for _, mult in cluster_roots(roots, tol=cluster_tol))
    return LimitPolynomial(poly=q, roots=roots, simple=simple)


def asymptotic_spectrum(
    P: Rank2Perturbation,
    alpha: complex,
    beta: complex,
    *,
    tol: float = GENERICITY_TOL,
    allow_degenerate: bool = False,
) -> AsymptoticSpectrum:
    """
    Autovalores de A − (αr)uw* − (βr)gh* para r → ∞: dos divergen como rλᵢ,
    con λᵢ = −(autovalores no nulos de αuw* + βgh*), calculados sobre el
    problema reducido 2×2 diag(α, β)·[w h]*[u g]; los n−2 restantes tienden
    a los ceros de q.

    Raises:
        InvalidInput: α o β nulos.
        DegenerateDirections: rank(αuw* + βgh*) < 2 (salvo allow_degenerate).
    """
    alpha, beta = complex(alpha), complex(beta)
    if alpha == 0 or beta == 0:
        raise InvalidInput("α y β deben ser no nulos")

    reduced = np.array(
        [
            [alpha * inner(P.u, P.w), alpha * inner(P.g, P.w)],
            [beta * inner(P.u, P.h), beta * inner(P.g, P.h)],
        ]
    )
    pert_eigs = np.sort_complex(np.linalg.eigvals(reduced))
    scale = max(abs(alpha), abs(beta)) * max(
        1.0, *(float(np.linalg.norm(v)) ** 2 for v in (P.u, P.w, P.g, P.h))
    )
    degenerate = bool(np.min(np.abs(pert_eigs)) <= tol * scale)
    if degenerate and not allow_degenerate:
        raise DegenerateDirections(
            "αuw* + βgh* tiene rango menor que 2",
            {"eigenvalues": [complex(e) for e in pert_eigs]},
        )

    scaled = replace(P, s=alpha, t=beta)
    try:
        limits = limit_polynomial_q(scaled)
        finite, simple = limits.roots, limits.simple
    except DegenerateDirections:
        if not allow_degenerate:
            raise
        finite, simple = np.zeros(0, dtype=np.complex128), False

    return AsymptoticSpectrum(
        divergent=[complex(-e) for e in pert_eigs],
        perturbation_eigenvalues=[complex(e) for e in pert_eigs],
        finite_limits=[complex(r) for r in finite],
        degenerate=degenerate,
        q_simple_roots=simple,
    )


# ------------------------------------------------------------------------------------
# ENTRELAZADO
# ------------------------------------------------------------------------------------

def interlacing_condition(
    A: ArrayLike,
    u: ArrayLike,
    s: float,
    t: float,
    *,
    simplicity_tol: float = SIMPLICITY_TOL,
    genericity_tol: float = GENERICITY_TOL,
) -> InterlacingReport:
    """
    Condición suficiente para que A − s·u(Au)* − t·(Au)u* tenga espectro real
    que entrelaza el de A: el polo x₀ = stm/(st − s − t) de la hipérbola
    −(1−s)(1−t)/((s+t−st)x + stm) cae fuera de [min λⱼ, max λⱼ].

    Raises:
        NotSelfAdjoint, HypothesisViolated
    """
    A = as_cmatrix(A, name="A")
    u = as_cvector(u, size=A.shape[0], name="u")
    if not is_self_adjoint(A, SELF_ADJOINT_TOL):
        raise NotSelfAdjoint("interlacing_condition requiere A = A*")
    if abs(np.linalg.norm(u) - 1.0) > 1e-10:
        raise HypothesisViolated("interlacing_condition requiere ‖u‖ = 1")

    s, t = float(s), float(t)
    denom = s * t - s - t
    if abs(denom) <= genericity_tol * max(1.0, abs(s * t)):
        raise HypothesisViolated("st = s + t: la hipérbola degenera", {"s": s, "t": t})

    try:
        Q = weyl_partial_fractions(A, u, simplicity_tol=simplicity_tol, genericity_tol=genericity_tol)
    except DegenerateSpectrum as exc:
        raise HypothesisViolated("A debe tener espectro simple", exc.detail) from exc
    if not Q.generic:
        raise HypothesisViolated("u no es genérico: algún c_j es nulo")

    m = float(moment(A, u).m.real)
    lam = Q.poles.real
    x0 = s * t * m / denom
    applies = bool(x0 < lam.min() or x0 > lam.max())
    logger.debug(f"[RANK2] x0={x0:.6g} en [{lam.min():.6g}, {lam.max():.6g}] -> aplica={applies}")

    return InterlacingReport(
        applies=applies,
        x0=x0,
        lambda_min=float(lam.min()),
        lambda_max=float(lam.max()),
        m=m,
        s=s,
        t=t,
        realness_guaranteed=(1 - s) * (1 - t) > 0,
    )


def real_spectrum(values: ArrayLike, *, tol: float = REAL_SPECTRUM_TOL) -> np.ndarray:
    """
    Devuelve las partes reales ordenadas.

    Raises:
        ComplexSpectrum: algún |Im λ| ≥ tol·(1 + |λ|).
    """
    values = np.asarray(values, dtype=np.complex128)
    bad = np.abs(values.imag) >= tol * (1.0 + np.abs(values))
    if np.any(bad):
        raise ComplexSpectrum(
            "Espectro no real",
            {"max_imag": float(np.max(np.abs(values.imag)))},
        )
    return np.sort(values.real)


def verify_interlacing(
    spectrum_a: ArrayLike,
    spectrum_p: ArrayLike,
    *,
    real_tol: float = REAL_SPECTRUM_TOL,
    tie_tol: float = INTERLACE_TIE_TOL,
) -> bool:
    """
    True si entre dos valores consecutivos de cualquiera de las listas hay
    exactamente uno de la otra (equivale a que alternen al fusionarlas).

    Raises:
        ComplexSpectrum: partes imaginarias fuera de tolerancia.
        DegenerateSpectrum: valores a distancia < tie_tol (no se fusionan).
    """
    a = real_spectrum(spectrum_a, tol=real_tol)
    p = real_spectrum(spectrum_p, tol=real_tol)

    merged = np.concatenate([a, p])
    labels = np.concatenate([np.zeros(a.size, dtype=int), np.ones(p.size, dtype=int)])
    order = np.argsort(merged, kind="stable")
    merged, labels = merged[order], labels[order]

    if merged.size > 1 and np.min(np.diff(merged)) < tie_tol:
        raise DegenerateSpectrum("Valores coincidentes en el entrelazado", {"min_gap": float(np.min(np.diff(merged)))})
    return bool(np.all(labels[1:] != labels[:-1]))


def interlacing_curves(
    A: ArrayLike,
    u: ArrayLike,
    s: float,
    t: float,
    xs: ArrayLike,
    *,
    mask_radius: float = POLE_MASK_RADIUS,
) -> dict[str, np.ndarray]:
    """
    Muestras de ambos lados de Σ cⱼ/(x−λⱼ) = −(1−s)(1−t)/((s+t−st)x + stm).

    Los puntos a menos de mask_radius de un polo quedan en NaN. Si la
    hipérbola degenera (s+t−st = 0 y stm = 0) el lado derecho se informa en
    forma multiplicada, la constante −(1−s)(1−t).
    """
    A = as_cmatrix(A, name="A")
    u = as_cvector(u, size=A.shape[0], name="u")
    xs = np.asarray(xs, dtype=float)
    Q = weyl_partial_fractions(A, u)
    m = float(moment(A, u).m.real)
    lam = Q.poles.real
    s, t = float(s), float(t)

    near_pole = np.min(np.abs(xs[:, None] - lam[None, :]), axis=1) < mask_radius
    with np.errstate(divide="ignore", invalid="ignore"):
        lhs = np.sum(Q.weights.real / (xs[:, None] - lam[None, :]), axis=1)
    lhs = np.where(near_pole, np.nan, lhs)

    slope, offset = s + t - s * t, s * t * m
    if abs(slope) <= GENERICITY_TOL and abs(offset) <= GENERICITY_TOL:
        rhs = np.full(xs.shape, -(1 - s) * (1 - t))
        hyperbola_pole = np.nan
    else:
        denom = slope * xs + offset
        with np.errstate(divide="ignore", invalid="ignore"):
            rhs = -(1 - s) * (1 - t) / denom
        hyperbola_pole = -offset / slope if slope != 0 else np.nan
        rhs = np.where(np.abs(denom) < mask_radius * max(1.0, abs(slope)), np.nan, rhs)

    return {"x": xs, "lhs": lhs, "rhs": rhs, "x0": np.float64(hyperbola_pole), "poles": lam}


# ------------------------------------------------------------------------------------
# TRANSICIÓN DE FASE PARA PARÁMETROS PEQUEÑOS
# ------------------------------------------------------------------------------------

def _jordan_pair(A: CMatrix, lam0: complex, tol: float) -> np.ndarray:
    eigs = eigenvalues_dense(A)
    close = eigs[np.abs(eigs - lam0) <= tol * max(1.0, abs(lam0))]
    if close.size < 2:
        raise NoJordanChain("λ₀ no es autovalor doble de A", {"lambda0": lam0, "found": close.size})

    sv = np.linalg.svd(A - lam0 * np.eye(A.shape[0]), compute_uv=False)
    norm = max(1.0, float(sv[0]))
    if sv[-1] > tol * norm:
        raise NoJordanChain("A − λ₀ no es singular", {"sigma_min": float(sv[-1])})
    if sv.size > 1 and sv[-2] <= tol * norm:
        raise NoJordanChain("λ₀ es semisimple: no hay cadena de Jordan", {"sigma_2": float(sv[-2])})
    return close


def phase_transition_check(
    A: ArrayLike,
    u: ArrayLike,
    w: ArrayLike,
    g: ArrayLike,
    h: ArrayLike,
    lam0: complex,
    eps_schedule: Sequence[float] = PHASE_EPS_SCHEDULE,
    *,
    jordan_tol: float = JORDAN_TOL,
    axis_tol: float = AXIS_TOL,
    rtol: float = EXTRAPOLATION_RTOL,
) -> PhaseTransitionReport:
    """
    Para λ₀ con cadena de Jordan de longitud 2 y s → 0⁺, los autovalores de
    A − s(uw* + gh*) cercanos a λ₀ se separan como λ₀ ± √(−s·a₋₂), siendo a₋₂
    el coeficiente de (λ₀ − z)⁻² en Q_uw + Q_gh. El par permanece sobre la
    recta λ₀ + iℝ si y solo si a₋₂ es real y no negativo.

    a₋₂ se estima como −ε²·[Q_uw + Q_gh](λ₀ + iε) y se extrapola linealmente
    en ε; las extrapolaciones de pares consecutivos deben coincidir.

    Raises:
        NoJordanChain, InconsistentExtrapolation
    """
    P = Rank2Perturbation.general(A, u, w, g, h)
    lam0 = complex(lam0)
    eps = np.sort(np.asarray(eps_schedule, dtype=float))[::-1]
    if eps.size < 3 or np.any(eps <= 0):
        raise InvalidInput("Se requieren al menos tres ε positivos", {"eps": list(eps)})

    pair = _jordan_pair(P.A, lam0, jordan_tol)

    def f(z: complex) -> complex:
        q = _weyl_values(P, z)
        return q["uw"] + q["gh"]

    estimates = np.array([-(e**2) * f(lam0 + 1j * e) for e in eps])
    extrap = np.array(
        [
            (eps[k] * estimates[k + 1] - eps[k + 1] * estimates[k]) / (eps[k] - eps[k + 1])
            for k in range(eps.size - 1)
        ]
    )
    a_m2 = complex(extrap[-1])
    spread_ = float(np.max(np.abs(np.diff(extrap))))
    floor = rtol * max(float(np.max(np.abs(estimates))), abs(a_m2)) + 1e-12
    if spread_ > floor:
        raise InconsistentExtrapolation(
            "Las extrapolaciones de a₋₂ no coinciden",
            {"extrapolations": [complex(e) for e in extrap], "spread": spread_},
        )

    e_min = float(eps[-1])
    up, down = f(lam0 + 1j * e_min), f(lam0 - 1j * e_min)
    direct_real = bool(
        abs(up.imag) <= rtol * max(abs(up), 1.0) and abs(down.imag) <= rtol * max(abs(down), 1.0)
    )

    scale = max(1.0, float(np.max(np.abs(estimates))))
    degenerate = abs(a_m2) <= axis_tol * scale
    real_nonneg = abs(a_m2.imag) <= axis_tol * max(1.0, abs(a_m2)) and a_m2.real >= -axis_tol * scale
    verdict = "stays" if degenerate or real_nonneg else "leaves"
    logger.info(f"[RANK2] a₋₂ ≈ {a_m2:.6g} -> {verdict}{' (frontera)' if degenerate else ''}")

    return PhaseTransitionReport(
        verdict=verdict,
        a_minus2=a_m2,
        eps_schedule=[float(e) for e in eps],
        estimates=[complex(e) for e in estimates],
        extrapolations=[complex(e) for e in extrap],
        split_coefficient=complex(np.sqrt(-a_m2)),
        direct_test_real=direct_real,
        degenerate=degenerate,
        jordan_pair=[complex(p) for p in pair],
        note="a₋₂ ≈ 0: se requieren términos de orden superior" if degenerate else None,
    )
