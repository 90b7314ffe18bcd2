# path: app/services/weyl.py
"""
Funciones de Weyl Q_{u,w}(z) = ⟨(z−A)⁻¹u, w⟩ = w*(z−A)⁻¹u.

Dos representaciones:
- Directa: se resuelve (z−A)x = u en cada punto.
- Fracciones parciales: Σ cⱼ/(z−λⱼ) a partir de la descomposición espectral.

Incluye las identidades algebraicas que usa el resto del paquete
(Q_{Au,u} = zQ_u − 1 y, para A autoadjunta, Q_{Au} = z²Q_u − z − m), la
fórmula de inversión de rango uno y el numerador polinomial det(z−A)·Q_{x,y}.
"""

import logging
from dataclasses import dataclass
from typing import Literal, Optional

import numpy as np
import scipy.linalg
from numpy.typing import ArrayLike

from app.core.config import GENERICITY_TOL, POLE_TOL, SELF_ADJOINT_TOL, SIMPLICITY_TOL
from app.core.errors import (
    DegenerateSpectrum,
    InvalidInput,
    NotSelfAdjoint,
    PoleHit,
    SingularMatrix,
)
from app.models.weyl import MomentData
from app.services.numcore import (
    CMatrix,
    CPoly,
    CVector,
    as_cmatrix,
    as_cvector,
    char_poly,
    inner,
    is_self_adjoint,
    outer,
    solve_linear,
    spread,
)

logger = logging.getLogger(__name__)


# ------------------------------------------------------------------------------------
# REPRESENTACIÓN
# ------------------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class WeylFn:
    """
    Función de Weyl en modo directo (A, u, w) o de fracciones parciales
    (polos λⱼ, pesos cⱼ). `generic` indica que todos los |cⱼ| superan la
    tolerancia de genericidad.
    """

    mode: Literal["direct", "partial_fractions"]
    A: Optional[CMatrix] = None
    u: Optional[CVector] = None
    w: Optional[CVector] = None
    poles: Optional[CVector] = None
    weights: Optional[CVector] = None
    generic: bool = True

    @classmethod
    def direct(cls, A: ArrayLike, u: ArrayLike, w: ArrayLike | None = None) -> "WeylFn":
        A = as_cmatrix(A, name="A")
        u = as_cvector(u, size=A.shape[0], name="u")
        w = u if w is None else as_cvector(w, size=A.shape[0], name="w")
        return cls(mode="direct", A=A, u=u, w=w)

    def __call__(self, z: complex) -> complex:
        return weyl_eval(self, z)

    def on_grid(self, zs: ArrayLike, *, pole_tol: float = POLE_TOL) -> np.ndarray:
        """Evalúa en una grilla; los puntos sobre un polo quedan en NaN."""
        zs = np.asarray(zs, dtype=np.complex128)
        if self.mode == "partial_fractions":
            diff = zs[..., None] - self.poles
            hit = np.min(np.abs(diff), axis=-1) <= pole_tol * np.maximum(1.0, np.abs(zs))
            with np.errstate(divide="ignore", invalid="ignore"):
                values = np.sum(self.weights / diff, axis=-1)
            return np.where(hit, np.nan + 0j, values)

        out = np.empty(zs.shape, dtype=np.complex128)
        for idx, z in np.ndenumerate(zs):
            try:
                out[idx] = weyl_eval(self, complex(z))
            except PoleHit:
                out[idx] = np.nan
        return out


def resolvent_apply(A: CMatrix, z: complex, x: CVector) -> CVector:
    """(z−A)⁻¹x; un pivote nulo se informa como PoleHit."""
    n = A.shape[0]
    try:
        return solve_linear(z * np.eye(n) - A, x)
    except SingularMatrix as exc:
        raise PoleHit("z está en el espectro de A", {"z": z}) from exc


def weyl_eval(Q: WeylFn, z: complex, *, pole_tol: float = POLE_TOL) -> complex:
    """
    Evalúa ⟨(z−A)⁻¹u, w⟩.

    Raises:
        PoleHit: z sobre un polo (modo fracciones) o sistema singular (modo directo).
    """
    z = complex(z)
    if Q.mode == "direct":
        return inner(resolvent_apply(Q.A, z, Q.u), Q.w)

    gaps = np.abs(z - Q.poles)
    if gaps.min() <= pole_tol * max(1.0, abs(z)):
        raise PoleHit("z coincide con un polo de la función de Weyl", {"z": z, "gap": float(gaps.min())})
    return complex(np.sum(Q.weights / (z - Q.poles)))


def weyl_partial_fractions(
    A: ArrayLike,
    u: ArrayLike,
    w: ArrayLike | None = None,
    *,
    simplicity_tol: float = SIMPLICITY_TOL,
    genericity_tol: float = GENERICITY_TOL,
) -> WeylFn:
    """
    Construye Σ cⱼ/(z−λⱼ) con cⱼ = (w* rⱼ)(ℓⱼ u), siendo rⱼ los autovectores
    a derecha y ℓⱼ las filas de la inversa de la matriz de autovectores.

    Raises:
        DegenerateSpectrum: autovalores con separación ≤ simplicity_tol·spread.
    """
    A = as_cmatrix(A, name="A")
    u = as_cvector(u, size=A.shape[0], name="u")
    w = u if w is None else as_cvector(w, size=A.shape[0], name="w")
    hermitian = is_self_adjoint(A, SELF_ADJOINT_TOL)

    if hermitian:
        vals, R = scipy.linalg.eigh(A)
        vals = vals.astype(np.complex128)
        Rinv = R.conj().T
    else:
        vals, R = scipy.linalg.eig(A)

    n = len(vals)
    if n > 1:
        gaps = np.abs(vals[:, None] - vals[None, :]) + np.diag(np.full(n, np.inf))
        min_gap = float(gaps.min())
        if min_gap <= simplicity_tol * spread(vals):
            raise DegenerateSpectrum(
                "Autovalores múltiples o demasiado próximos",
                {"min_gap": min_gap, "threshold": simplicity_tol * spread(vals)},
            )

    if not hermitian:
        try:
            Rinv = np.linalg.inv(R)
        except np.linalg.LinAlgError as exc:
            raise DegenerateSpectrum("La matriz de autovectores es singular") from exc

    weights = (np.conj(w) @ R) * (Rinv @ u)
    if hermitian and np.array_equal(u, w):
        weights = weights.real.astype(np.complex128)

    order = np.lexsort((vals.imag, vals.real))
    poles, weights = vals[order], weights[order]
    generic = bool(np.all(np.abs(weights) > genericity_tol))
    if not generic:
        logger.info(f"[WEYL] Coeficientes c_j bajo la tolerancia de genericidad ({genericity_tol:g})")

    return WeylFn(
        mode="partial_fractions",
        poles=as_cvector(poles),
        weights=as_cvector(weights),
        generic=generic,
    )


# ------------------------------------------------------------------------------------
# MOMENTO E IDENTIDADES
# ------------------------------------------------------------------------------------

def moment(A: ArrayLike, u: ArrayLike, *, tol: float = SELF_ADJOINT_TOL) -> MomentData:
    """m = ⟨u, Au⟩."""
    A = as_cmatrix(A, name="A")
    u = as_cvector(u, size=A.shape[0], name="u")
    m = inner(u, A @ u)
    hermitian = is_self_adjoint(A, tol)
    if hermitian:
        m = complex(m.real, 0.0)
    return MomentData(m=m, self_adjoint=hermitian)


def _require_unit(u: CVector, tol: float = 1e-10) -> None:
    norm = float(np.linalg.norm(u))
    if abs(norm - 1.0) > tol:
        raise InvalidInput("Se requiere ‖u‖ = 1", {"norm": norm})


def identity_QAu_u(A: ArrayLike, u: ArrayLike, z: complex) -> float:
    """Residuo |Q_{Au,u}(z) − (z·Q_u(z) − 1)| (requiere ‖u‖ = 1)."""
    A = as_cmatrix(A, name="A")
    u = as_cvector(u, size=A.shape[0], name="u")
    _require_unit(u)
    x = resolvent_apply(A, complex(z), u)
    q_u = inner(x, u)
    q_au_u = inner(resolvent_apply(A, complex(z), A @ u), u)
    return abs(q_au_u - (z * q_u - 1.0))


def identity_QAu(A: ArrayLike, u: ArrayLike, z: complex) -> float:
    """
    Residuo |Q_{Au}(z) − (z²Q_u(z) − z − m)| para A autoadjunta y ‖u‖ = 1.

    Raises:
        NotSelfAdjoint, PoleHit
    """
    A = as_cmatrix(A, name="A")
    u = as_cvector(u, size=A.shape[0], name="u")
    if not is_self_adjoint(A, SELF_ADJOINT_TOL):
        raise NotSelfAdjoint("identity_QAu requiere A = A*")
    _require_unit(u)
    z = complex(z)
    m = moment(A, u).m
    au = A @ u
    q_u = inner(resolvent_apply(A, z, u), u)
    q_au = inner(resolvent_apply(A, z, au), au)
    return abs(q_au - (z * z * q_u - z - m))


# ------------------------------------------------------------------------------------
# INVERSAS DE BAJO RANGO Y NUMERADORES
# ------------------------------------------------------------------------------------

def rank_one_inverse(M: ArrayLike, x: ArrayLike, y: ArrayLike) -> CMatrix:
    """
    (M + x y*)⁻¹ = M⁻¹ − M⁻¹x y*M⁻¹ / (1 + y*M⁻¹x).

    Raises:
        SingularMatrix: si M es singular o 1 + y*M⁻¹x = 0.
    """
    M = as_cmatrix(M, name="M")
    x = as_cvector(x, size=M.shape[0], name="x")
    y = as_cvector(y, size=M.shape[0], name="y")
    n = M.shape[0]
    Minv = np.column_stack([solve_linear(M, e) for e in np.eye(n, dtype=np.complex128)])
    Minv_x = Minv @ x
    denom = 1.0 + inner(Minv_x, y)
    if abs(denom) <= POLE_TOL * max(1.0, float(np.abs(Minv_x).max()) * float(np.abs(y).max())):
        raise SingularMatrix("M + xy* es singular", {"denominator": denom})
    return Minv - np.outer(Minv_x, np.conj(y) @ Minv) / denom


def woodbury_resolvent(
    A: ArrayLike,
    U: ArrayLike,
    W: ArrayLike,
    D: ArrayLike,
    z: complex,
) -> CMatrix:
    """
    (z − (A − U D W*))⁻¹ por la fórmula de Woodbury:

        R − R U D (I + W* R U D)⁻¹ W* R,   R = (z−A)⁻¹

    Se usa como oráculo independiente para la función de Weyl perturbada.
    """
    A = as_cmatrix(A, name="A")
    U = np.asarray(U, dtype=np.complex128)
    W = np.asarray(W, dtype=np.complex128)
    D = np.asarray(D, dtype=np.complex128)
    n, k = U.shape
    z = complex(z)
    R = np.column_stack([resolvent_apply(A, z, e) for e in np.eye(n, dtype=np.complex128)])
    core = np.eye(k) + W.conj().T @ R @ U @ D
    try:
        middle = np.linalg.solve(core, W.conj().T @ R)
    except np.linalg.LinAlgError as exc:
        raise PoleHit("z es autovalor de la matriz perturbada", {"z": z}) from exc
    return R - R @ U @ D @ middle


def weyl_numerator(A: ArrayLike, x: ArrayLike, y: ArrayLike) -> CPoly:
    """
    Polinomio det(z−A)·Q_{x,y}(z) (grado ≤ n−1), obtenido como
    det(z − A + xy*) − det(z − A).
    """
    A = as_cmatrix(A, name="A")
    x = as_cvector(x, size=A.shape[0], name="x")
    y = as_cvector(y, size=A.shape[0], name="y")
    return char_poly(A - outer(x, y)) - char_poly(A)
