# path: app/services/measures.py
"""
Medidas de probabilidad sobre ℝ y sus transformadas de Cauchy
G_μ(z) = ∫ dμ(x)/(z − x).

- Evaluadores: átomos, fracción continua de Jacobi, semicírculo cerrado.
- Transformaciones definidas por ecuaciones sobre 1/G: U^{p,q}, t_τ y W^{s,t}.
- Modelos de operador: deformaciones antidiagonal y diagonal de la matriz de
  Jacobi truncada y su resolvente en el vector vacío.
- Inversión de Stieltjes a densidad con detección de átomos.

Los evaluadores vectoriales devuelven NaN en los puntos donde la ecuación no
define un valor y lo registran en el log; la evaluación escalar levanta la
excepción correspondiente.
"""

import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np
import scipy.integrate
import scipy.linalg
import scipy.optimize
from numpy.typing import ArrayLike
from pydantic import ValidationError

from app.core.config import (
    ATOM_MASS_TOL,
    DENSITY_RTOL,
    JACOBI_TRUNCATION,
    POLE_MASK_RADIUS,
    STIELTJES_EPS_SCHEDULE,
)
from app.core.errors import (
    DenominatorVanishes,
    InvalidInput,
    InvalidParams,
    NonConvergentExtrapolation,
    PoleHit,
    SpectralError,
    UnsupportedRegion,
)
from app.models.measures import Atom, JacobiData, SpectralMeasure, StieltjesResult, TransformParams

logger = logging.getLogger(__name__)


# ------------------------------------------------------------------------------------
# EVALUADORES
# ------------------------------------------------------------------------------------

class CauchyTransform(ABC):
    """
    Evaluador de una transformada de Cauchy.

    Subclases implementan `_evaluate` sobre arrays (NaN donde no hay valor)
    y `extends_to` para decidir si un punto real está fuera del soporte.
    """

    name: str = "cauchy"
    first_moment: float = 0.0
    jacobi: Optional[JacobiData] = None
    undefined_error: type[SpectralError] = PoleHit

    @abstractmethod
    def _evaluate(self, zs: np.ndarray) -> np.ndarray: ...

    @abstractmethod
    def extends_to(self, x: float) -> bool: ...

    def evaluate(self, zs: ArrayLike) -> np.ndarray:
        zs = np.asarray(zs, dtype=np.complex128)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            values = self._evaluate(zs)
        values = np.where(np.isfinite(values), values, np.nan + 0j)
        bad = np.isnan(values)
        if bad.any():
            logger.warning(f"[MEASURES] {self.name}: {int(bad.sum())} puntos sin valor definido")
        return values

    def __call__(self, z: complex) -> complex:
        z = complex(z)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            value = complex(self._evaluate(np.array([z]))[0])
        if not np.isfinite(value):
            raise self.undefined_error(f"{self.name} no está definida en z", {"z": z})
        return value

    def bad_points(self, zs: ArrayLike) -> np.ndarray:
        """Máscara booleana de los puntos sin valor definido."""
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            return ~np.isfinite(self._evaluate(np.asarray(zs, dtype=np.complex128)))


class AtomicCauchy(CauchyTransform):
    def __init__(self, atoms: Sequence[Atom], name: str = "atoms"):
        self.atoms = list(atoms)
        self.name = name
        self._loc = np.array([a.location for a in self.atoms], dtype=float)
        self._mass = np.array([a.mass for a in self.atoms], dtype=float)
        self.first_moment = float(np.sum(self._loc * self._mass))

    def _evaluate(self, zs):
        return np.sum(self._mass / (zs[..., None] - self._loc), axis=-1)

    def extends_to(self, x: float) -> bool:
        return bool(np.all(self._loc != x))


def semicircle_cauchy(w: np.ndarray, variance: float) -> np.ndarray:
    """
    2 / (w + √(w−2√b)·√(w+2√b)): rama que decae como 1/w y cae en ℂ⁻
    para Im w > 0. Con b = 0 se reduce a 1/w. Es la forma racionalizada de
    (w − √(w−2√b)·√(w+2√b)) / (2b), sin cancelación para |w| grande.
    """
    if variance == 0:
        return 1.0 / w
    r = np.sqrt(variance)
    return 2.0 / (w + np.sqrt(w - 2 * r) * np.sqrt(w + 2 * r))


class SemicircleCauchy(CauchyTransform):
    """Semicírculo centrado en `center` con varianza `variance` (Wigner: 0, 1)."""

    def __init__(self, center: float = 0.0, variance: float = 1.0, name: str = "wigner"):
        if variance < 0:
            raise InvalidParams("La varianza del semicírculo debe ser no negativa")
        self.center = float(center)
        self.variance = float(variance)
        self.name = name
        self.first_moment = self.center
        self.jacobi = JacobiData(a=[self.center], b=[float(np.sqrt(self.variance))])

    def _evaluate(self, zs):
        return semicircle_cauchy(zs - self.center, self.variance)

    def extends_to(self, x: float) -> bool:
        return abs(x - self.center) > 2 * np.sqrt(self.variance)


class JacobiCauchy(CauchyTransform):
    """
    Fracción continua 1/(z − a₀ − b₀²/(z − a₁ − b₁²/(…))) evaluada de abajo
    hacia arriba desde el nivel N con terminador 0.
    """

    def __init__(self, data: JacobiData, N: int = JACOBI_TRUNCATION, name: str = "jacobi"):
        if N < 1:
            raise InvalidInput("La truncación N debe ser positiva", {"N": N})
        self.jacobi = data
        self.N = N
        self.name = name
        self.first_moment = float(data.a[0])
        self._a, self._b = data.coefficients(N)

    def _evaluate(self, zs):
        G = np.zeros(zs.shape, dtype=np.complex128)
        for k in range(self.N - 1, -1, -1):
            tail = self._b[k] ** 2 * G if k < self.N - 1 else 0.0
            G = 1.0 / (zs - self._a[k] - tail)
        return G

    def extends_to(self, x: float) -> bool:
        bound = float(np.max(np.abs(self._a))) + 2 * float(np.max(self._b, initial=0.0))
        return abs(x) > bound


class ClosedFormCauchy(CauchyTransform):
    """Envuelve una función vectorial z ↦ G(z) dada en forma cerrada."""

    def __init__(
        self,
        fn: Callable[[np.ndarray], np.ndarray],
        *,
        name: str,
        first_moment: float,
        support: tuple[float, float],
        jacobi: Optional[JacobiData] = None,
    ):
        self._fn = fn
        self.name = name
        self.first_moment = float(first_moment)
        self.support = support
        self.jacobi = jacobi

    def _evaluate(self, zs):
        return self._fn(zs)

    def extends_to(self, x: float) -> bool:
        return not (self.support[0] <= x <= self.support[1]) and not self.bad_points(np.array([x + 0j]))[0]


# ------------------------------------------------------------------------------------
# TRANSFORMACIONES
# ------------------------------------------------------------------------------------

def _with_corner(data: JacobiData, a0: float, b0: float, a1: Optional[float] = None) -> JacobiData:
    # se materializa un nivel extra para que la cola constante no cambie
    a, b = data.coefficients(max(len(data.a), len(data.b) + 1) + 2)
    a, b = [float(x) for x in a], [float(x) for x in b]
    a[0] = float(a0)
    if a1 is not None:
        a[1] = float(a1)
    b[0] = abs(float(b0))
    return JacobiData(a=a, b=b)


class UTransform(CauchyTransform):
    """1/G_{U^{p,q}(μ)}(z) = q/G_μ(z) + (1−q)z + (q−p)m."""

    def __init__(self, base: CauchyTransform, p: float, q: float, m: Optional[float] = None):
        if q < 0:
            raise InvalidParams("U^{p,q} requiere q ≥ 0", {"q": q})
        self.base = base
        self.p, self.q = float(p), float(q)
        self.m = base.first_moment if m is None else float(m)
        self.name = f"U[{self.p:g},{self.q:g}]({base.name})"
        self.first_moment = self.p * self.m
        if base.jacobi is not None and np.isclose(self.m, base.jacobi.a[0]):
            self.jacobi = _with_corner(base.jacobi, self.p * base.jacobi.a[0], np.sqrt(self.q) * base.jacobi.b[0])

    def inverse_value(self, g: np.ndarray, zs: np.ndarray) -> np.ndarray:
        return self.q / g + (1 - self.q) * zs + (self.q - self.p) * self.m

    def _evaluate(self, zs):
        if self.q == 0:
            return 1.0 / (zs - self.p * self.m)
        return 1.0 / self.inverse_value(self.base._evaluate(zs), zs)

    def extends_to(self, x: float) -> bool:
        return self.base.extends_to(x) and not self.bad_points(np.array([x + 0j]))[0]


class TTransform(UTransform):
    """1/G_{μ_τ}(z) = τ/G_μ(z) + (1−τ)z: la U con p = q = τ."""

    def __init__(self, base: CauchyTransform, tau: float):
        super().__init__(base, tau, tau)
        self.tau = float(tau)
        self.name = f"t[{self.tau:g}]({base.name})"


class WTransform(CauchyTransform):
    """1/G_{W^{s,t}(μ)}(z) = s + (1 + t(z²G_μ − m − z)) / ((1 − tm + tz)G_μ − t)."""

    undefined_error = DenominatorVanishes

    def __init__(self, base: CauchyTransform, s: float, t: float, m: Optional[float] = None):
        self.base = base
        self.s, self.t = float(s), float(t)
        self.m = base.first_moment if m is None else float(m)
        self.name = f"W[{self.s:g},{self.t:g}]({base.name})"
        self.first_moment = self.m * (1 - self.t * self.m) - self.s
        if base.jacobi is not None and np.isclose(self.m, base.jacobi.a[0]):
            a, b = base.jacobi.coefficients(2)
            self.jacobi = _with_corner(
                base.jacobi,
                self.first_moment,
                b[0] * (1 - self.t * self.m),
                a[1] - self.t * b[0] ** 2,
            )

    def inverse_value(self, g: np.ndarray, zs: np.ndarray) -> np.ndarray:
        s, t, m = self.s, self.t, self.m
        den = (1 - t * m + t * zs) * g - t
        return s + (1 + t * (zs * zs * g - m - zs)) / den

    def _evaluate(self, zs):
        return 1.0 / self.inverse_value(self.base._evaluate(zs), zs)

    def extends_to(self, x: float) -> bool:
        return self.base.extends_to(x) and not self.bad_points(np.array([x + 0j]))[0]


def u_transform(G: CauchyTransform, p: float, q: float, m: Optional[float] = None) -> UTransform:
    """
    Raises:
        InvalidParams: q < 0.

    Ejemplo:
        u_transform(G, 0, 1) evalúa igual que G; u_transform(G, p, 0) es δ_{pm}.
    """
    return UTransform(G, p, q, m)


def t_transform(G: CauchyTransform, tau: float) -> TTransform:
    return TTransform(G, tau)


def w_transform(G: CauchyTransform, s: float, t: float, m: Optional[float] = None) -> WTransform:
    return WTransform(G, s, t, m)


def apply_transform(G: CauchyTransform, params: TransformParams) -> CauchyTransform:
    """
    Despacha a u_transform, t_transform o w_transform según `params.kind`.

    Ejemplo:
        apply_transform(G, TransformParams.from_deformation(s, t))
    """
    if params.kind == "U":
        return u_transform(G, params.p, params.q, params.m)
    if params.kind == "T":
        return t_transform(G, params.tau)
    return w_transform(G, params.s, params.t, params.m)


def cauchy_eval(mu: SpectralMeasure | CauchyTransform, z: complex) -> complex:
    """
    G_μ(z) para Im z > 0, o z real fuera del soporte cuando el evaluador se
    extiende analíticamente.

    Raises:
        UnsupportedRegion: Im z < 0 o z real dentro del soporte.
    """
    G = measure_cauchy(mu) if isinstance(mu, SpectralMeasure) else mu
    z = complex(z)
    if z.imag < 0:
        raise UnsupportedRegion("Se requiere Im z ≥ 0", {"z": z})
    if z.imag == 0 and not G.extends_to(z.real):
        raise UnsupportedRegion("z real dentro del soporte", {"z": z})
    return G(z)


# ------------------------------------------------------------------------------------
# MEDIDAS CON NOMBRE
# ------------------------------------------------------------------------------------

def semicircle_density(x: ArrayLike, center: float = 0.0, variance: float = 1.0) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    inside = np.clip(4 * variance - (x - center) ** 2, 0.0, None)
    return np.sqrt(inside) / (2 * np.pi * variance)


def wigner() -> SpectralMeasure:
    return SpectralMeasure(
        name="wigner",
        support=(-2.0, 2.0),
        density=semicircle_density,
        jacobi=JacobiData(a=[0.0], b=[1.0]),
        cauchy=SemicircleCauchy(),
        first_moment=0.0,
    )


def bernoulli() -> SpectralMeasure:
    return SpectralMeasure(name="bernoulli", atoms=[Atom(location=-1.0, mass=0.5), Atom(location=1.0, mass=0.5)])


def delta(a: float) -> SpectralMeasure:
    return SpectralMeasure(name=f"delta({a:g})", atoms=[Atom(location=float(a), mass=1.0)], first_moment=float(a))


def from_jacobi(a: Sequence[float], b: Sequence[float], name: str = "jacobi") -> SpectralMeasure:
    try:
        data = JacobiData(a=list(a), b=list(b))
    except ValidationError as exc:
        raise InvalidParams("Coeficientes de Jacobi inválidos", {"errors": exc.errors()}) from exc
    return SpectralMeasure(name=name, jacobi=data, first_moment=float(data.a[0]))


def meixner(gamma: float, a: float, b: float, c: float) -> SpectralMeasure:
    """Medida de la clase de Meixner libre μ_(γ,a,b,c)."""
    from app.services.meixner import meixner_measure, meixner_params

    return meixner_measure(meixner_params(gamma, a, b, c))


def measure_cauchy(mu: SpectralMeasure, *, N: int = JACOBI_TRUNCATION) -> CauchyTransform:
    """Evaluador de G_μ: forma cerrada si existe, luego Jacobi, luego átomos."""
    if mu.cauchy is not None:
        return mu.cauchy
    if mu.jacobi is not None:
        return JacobiCauchy(mu.jacobi, N, name=mu.name)
    if mu.density is None:
        return AtomicCauchy(mu.atoms, name=mu.name)
    raise InvalidInput("La medida no tiene una representación evaluable", {"name": mu.name})


def total_mass(mu: SpectralMeasure) -> float:
    """Σ masas atómicas + ∫ densidad sobre el soporte (scipy.integrate.quad)."""
    mass = sum(atom.mass for atom in mu.atoms)
    if mu.density is not None and mu.support is not None:
        lo, hi = mu.support
        integral, _ = scipy.integrate.quad(lambda x: float(mu.density(np.array([x]))[0]), lo, hi, limit=200)
        mass += integral
    return float(mass)


# ------------------------------------------------------------------------------------
# FORMAS CERRADAS PARA EL SEMICÍRCULO
# ------------------------------------------------------------------------------------

def wigner_u_density(x: ArrayLike, s: float, t: float) -> np.ndarray:
    """τ√(4−x²) / (2π((1−τ)x² + τ²)), τ = (1−s)(1−t)."""
    x = np.asarray(x, dtype=float)
    tau = (1 - s) * (1 - t)
    root = np.sqrt(np.clip(4 - x * x, 0.0, None))
    return tau * root / (2 * np.pi * ((1 - tau) * x * x + tau * tau))


def wigner_u_atoms(s: float, t: float) -> list[Atom]:
    """Átomos ±τ/√(τ−1) de masa (τ−2)/(2(τ−1)), presentes solo para τ > 2."""
    tau = (1 - s) * (1 - t)
    if tau <= 2:
        return []
    x = tau / np.sqrt(tau - 1)
    mass = (tau - 2) / (2 * (tau - 1))
    return [Atom(location=-x, mass=mass), Atom(location=x, mass=mass)]


def wigner_w_density(x: ArrayLike, s: float, t: float) -> np.ndarray:
    """
    √(4−x²) / (2π·(tx³ + (t²+2st)x² + (s²t+2st²+s−2t)x + (st−1)² + s²)).
    """
    x = np.asarray(x, dtype=float)
    root = np.sqrt(np.clip(4 - x * x, 0.0, None))
    cubic = (
        t * x**3
        + (t * t + 2 * s * t) * x**2
        + (s * s * t + 2 * s * t * t + s - 2 * t) * x
        + (s * t - 1) ** 2
        + s * s
    )
    return root / (2 * np.pi * cubic)


# ------------------------------------------------------------------------------------
# MODELOS DE OPERADOR
# ------------------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Tridiagonal:
    """Matriz tridiagonal: diag[i] = T[i,i], upper[i] = T[i,i+1], lower[i] = T[i+1,i]."""

    diag: np.ndarray
    upper: np.ndarray
    lower: np.ndarray

    @property
    def N(self) -> int:
        return self.diag.size

    @property
    def symmetric(self) -> bool:
        return bool(np.array_equal(self.upper, self.lower))

    def to_dense(self) -> np.ndarray:
        return np.diag(self.diag) + np.diag(self.upper, 1) + np.diag(self.lower, -1)


def jacobi_matrix(data: JacobiData, N: int = JACOBI_TRUNCATION) -> Tridiagonal:
    a, b = data.coefficients(N)
    return Tridiagonal(diag=a, upper=b.copy(), lower=b.copy())


def jacobi_deform_antidiagonal(data: JacobiData, s: float, t: float, N: int = JACOBI_TRUNCATION) -> Tridiagonal:
    """
    J − s·e₀(Je₀)* − t·(Je₀)e₀*: solo cambia el bloque de la esquina,
    [(1−s−t)a₀, (1−s)b₀; (1−t)b₀, a₁]. No simétrica si s ≠ t.
    """
    J = jacobi_matrix(data, N)
    diag, upper, lower = J.diag.copy(), J.upper.copy(), J.lower.copy()
    diag[0] *= 1 - s - t
    if N > 1:
        upper[0] *= 1 - s
        lower[0] *= 1 - t
    return Tridiagonal(diag, upper, lower)


def jacobi_deform_diagonal(data: JacobiData, s: float, t: float, N: int = JACOBI_TRUNCATION) -> Tridiagonal:
    """
    J − s·e₀e₀* − t·(Je₀)(Je₀)*: esquina [m(1−tm)−s, b₀(1−tm); b₀(1−tm), a₁−tb₀²]
    con m = a₀.
    """
    J = jacobi_matrix(data, N)
    diag, upper, lower = J.diag.copy(), J.upper.copy(), J.lower.copy()
    m = diag[0]
    diag[0] = m * (1 - t * m) - s
    if N > 1:
        b0 = upper[0]
        upper[0] = lower[0] = b0 * (1 - t * m)
        diag[1] -= t * b0 * b0
    return Tridiagonal(diag, upper, lower)


def jacobi_resolvent(T: Tridiagonal, z: complex) -> complex:
    """
    ⟨(z − T)⁻¹e₀, e₀⟩ por LU de banda (scipy.linalg.solve_banded).

    Raises:
        PoleHit: z − T singular.
    """
    N = T.N
    ab = np.zeros((3, N), dtype=np.complex128)
    ab[1] = complex(z) - T.diag
    if N > 1:
        ab[0, 1:] = -T.upper[: N - 1]
        ab[2, :-1] = -T.lower[: N - 1]
    rhs = np.zeros(N, dtype=np.complex128)
    rhs[0] = 1.0
    try:
        x = scipy.linalg.solve_banded((1, 1), ab, rhs)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise PoleHit("z − T es singular", {"z": z}) from exc
    if not np.isfinite(x[0]):
        raise PoleHit("z − T es singular", {"z": z})
    return complex(x[0])


# ------------------------------------------------------------------------------------
# INVERSIÓN DE STIELTJES
# ------------------------------------------------------------------------------------

def _detect_atoms(
    G: CauchyTransform,
    xs: np.ndarray,
    eps_hi: float,
    eps_lo: float,
    mass_tol: float,
) -> list[Atom]:
    def f(x: float) -> float:
        return float(np.real(1.0 / G(x + 1j * eps_lo)))

    with np.errstate(divide="ignore", invalid="ignore"):
        values = np.real(1.0 / G.evaluate(xs + 1j * eps_lo))

    candidates: list[float] = []
    for k in range(xs.size - 1):
        lo, hi = values[k], values[k + 1]
        if not (np.isfinite(lo) and np.isfinite(hi)):
            continue
        if lo == 0:
            candidates.append(float(xs[k]))
        elif lo * hi < 0:
            try:
                candidates.append(scipy.optimize.brentq(f, xs[k], xs[k + 1], xtol=1e-14))
            except (ValueError, SpectralError):
                continue

    atoms: list[Atom] = []
    for x0 in candidates:
        try:
            m_hi = -eps_hi * G(x0 + 1j * eps_hi).imag
            m_lo = -eps_lo * G(x0 + 1j * eps_lo).imag
        except SpectralError:
            continue
        stable = abs(m_hi - m_lo) <= 1e-3 * max(abs(m_hi), abs(m_lo)) + mass_tol
        if m_lo > mass_tol and m_hi > mass_tol and stable:
            if not any(abs(x0 - a.location) < 1e-9 for a in atoms):
                atoms.append(Atom(location=float(x0), mass=float(m_lo)))
    return atoms


def stieltjes_invert(
    G: CauchyTransform,
    xs: ArrayLike,
    eps_schedule: Sequence[float] = STIELTJES_EPS_SCHEDULE,
    *,
    mass_tol: float = ATOM_MASS_TOL,
    mask_radius: float = POLE_MASK_RADIUS,
    rtol: float = DENSITY_RTOL,
) -> StieltjesResult:
    """
    Densidad −(1/π)·Im G(x + iε) extrapolada linealmente a ε → 0 con los dos
    ε más chicos, y átomos en los cambios de signo de Re(1/G(x + iε)) cuya
    masa −ε·Im G(x₀ + iε) es estable entre ε consecutivos.

    Los puntos a menos de mask_radius de un átomo quedan enmascarados; los
    puntos donde la extrapolación no converge quedan marcados, ambos con NaN.

    Raises:
        InvalidInput: menos de dos ε o grilla vacía.
        NonConvergentExtrapolation: ningún punto de la grilla converge.
    """
    xs = np.asarray(xs, dtype=float)
    eps = np.sort(np.asarray(list(eps_schedule), dtype=float))[::-1]
    if eps.size < 2 or np.any(eps <= 0) or xs.size == 0:
        raise InvalidInput("Se requieren al menos dos ε positivos y una grilla no vacía")

    e_hi, e_lo = float(eps[-2]), float(eps[-1])
    d_hi = -G.evaluate(xs + 1j * e_hi).imag / np.pi
    d_lo = -G.evaluate(xs + 1j * e_lo).imag / np.pi
    density = (e_hi * d_lo - e_lo * d_hi) / (e_hi - e_lo)

    flagged = ~np.isfinite(density) | (np.abs(density - d_lo) > rtol * np.maximum(1.0, np.abs(d_lo)))
    if flagged.all():
        raise NonConvergentExtrapolation("La extrapolación no converge en ningún punto", {"n": xs.size})

    atoms = _detect_atoms(G, xs, e_hi, e_lo, mass_tol)
    masked = np.zeros(xs.shape, dtype=bool)
    for atom in atoms:
        masked |= np.abs(xs - atom.location) < mask_radius

    density = np.where(flagged | masked, np.nan, np.clip(density, 0.0, None))
    if flagged.any():
        logger.info(f"[MEASURES] {int(flagged.sum())} puntos con extrapolación no convergente")

    finite = np.nan_to_num(density, nan=0.0)
    mass = sum(a.mass for a in atoms)
    if xs.size > 1:
        mass += float(scipy.integrate.trapezoid(finite, xs))
    logger.debug(f"[MEASURES] {G.name}: {len(atoms)} átomos, masa total {mass:.6f}")

    return StieltjesResult(
        x=xs,
        density=density,
        flagged=flagged,
        masked=masked,
        atoms=atoms,
        eps_schedule=[float(e) for e in eps],
        total_mass=mass,
    )
