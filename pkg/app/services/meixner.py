# path: app/services/meixner.py
"""
Clase de Meixner libre μ_u, u = (γ, a, b, c).

Coeficientes de Jacobi: a₀ = γ, b₀ = √(bc) y aₙ = a, bₙ = √b para n ≥ 1, de
modo que G(z) = 1/(z − γ − bc·T(z)) con T la transformada del semicírculo de
centro a y varianza b.

La transformación U^{s,t} (p = 1−s−t, q = (1−s)(1−t)) actúa como
(γ, a, b, c) ↦ (pγ, a, b, qc). Para s = t el número de átomos de μ_{u_s} se
decide con

    D(s) = ((1−2s)γ − a)² − 4b(1 − c(1−s)²)
         = 4(γ²+bc)s² − 4(γ²−aγ+2bc)s + (γ−a)² − 4b(1−c)

y las transiciones 1→2, 0→1 y 0→2 se leen de los ceros de D.
"""

import logging
import math
from typing import Optional

import numpy as np
import scipy.integrate
from numpy.typing import ArrayLike
from pydantic import ValidationError

from app.core.config import ATOM_MASS_TOL, MEIXNER_TOL
from app.core.errors import DensityPole, HypothesisViolated, InvalidParams, UndefinedRange
from app.models.measures import Atom, JacobiData, SpectralMeasure
from app.models.meixner import MeixnerClassification, MeixnerParams, MeixnerTransitionReport, SRange
from app.services.measures import ClosedFormCauchy, semicircle_cauchy

logger = logging.getLogger(__name__)

WIGNER = MeixnerParams(gamma=0.0, a=0.0, b=1.0, c=1.0)


def marchenko_pastur(alpha: float, lam: float) -> MeixnerParams:
    """(αλ, α(1+λ), α²λ, 1)."""
    return meixner_params(alpha * lam, alpha * (1 + lam), alpha * alpha * lam, 1.0)


def meixner_params(gamma: float, a: float, b: float, c: float) -> MeixnerParams:
    try:
        return MeixnerParams(gamma=gamma, a=a, b=b, c=c)
    except ValidationError as exc:
        raise InvalidParams("Parámetros de Meixner inválidos", {"errors": exc.errors()}) from exc


def _close(x: float, y: float, tol: float = MEIXNER_TOL) -> bool:
    return abs(x - y) <= tol * max(1.0, abs(x), abs(y))


# ------------------------------------------------------------------------------------
# DENSIDAD Y TRANSFORMADA
# ------------------------------------------------------------------------------------

def f_poly(u: MeixnerParams, x: ArrayLike) -> np.ndarray:
    """f(x) = (1−c)(x−a)² + (c−2)(γ−a)(x−a) + (γ−a)² + bc²."""
    y = np.asarray(x, dtype=float) - u.a
    d = u.gamma - u.a
    return (1 - u.c) * y * y + (u.c - 2) * d * y + d * d + u.b * u.c * u.c


def meixner_density(u: MeixnerParams, x: ArrayLike, *, tol: float = MEIXNER_TOL) -> np.ndarray:
    """
    c·√(4b − (x−a)²) / (2π·f(x)) en [a−2√b, a+2√b], 0 fuera del soporte.

    Raises:
        InvalidParams: b = 0.
        DensityPole: f se anula dentro del soporte.
    """
    if u.b <= 0:
        raise InvalidParams("La densidad requiere b > 0", {"b": u.b})
    x = np.asarray(x, dtype=float)
    lo, hi = u.support
    inside = (x > lo) & (x < hi)
    f = f_poly(u, x)
    if np.any(inside & (np.abs(f) <= tol)):
        raise DensityPole("f se anula dentro del soporte", {"params": u.as_tuple()})
    root = np.sqrt(np.clip(4 * u.b - (x - u.a) ** 2, 0.0, None))
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(inside, u.c * root / (2 * np.pi * f), 0.0)


def _jacobi_data(u: MeixnerParams) -> JacobiData:
    """a₀ = γ, b₀ = √(bc), aₙ = a, bₙ = √b."""
    return JacobiData(a=[u.gamma, u.a], b=[math.sqrt(u.b * u.c), math.sqrt(u.b)])


def meixner_cauchy(u: MeixnerParams) -> ClosedFormCauchy:
    """G(z) = 1/(z − γ − bc·T(z)), T(z) = 2/(w + √(w−2√b)√(w+2√b)), w = z − a."""

    def fn(zs: np.ndarray) -> np.ndarray:
        return 1.0 / (zs - u.gamma - u.b * u.c * semicircle_cauchy(zs - u.a, u.b))

    return ClosedFormCauchy(
        fn,
        name=f"meixner({u.gamma:g},{u.a:g},{u.b:g},{u.c:g})",
        first_moment=u.gamma,
        support=u.support,
        jacobi=_jacobi_data(u),
    )


def _physical_atom(u: MeixnerParams, x: float) -> Atom:
    """Masa 1/(1 − bc·T′(x)) si x es polo de G en la hoja física; si no, átomo virtual."""
    lo, hi = u.support
    w = complex(x - u.a)
    if lo - MEIXNER_TOL <= x <= hi + MEIXNER_TOL and u.b > 0:
        return Atom(location=x, mass=0.0, virtual=True)
    T = complex(semicircle_cauchy(np.array([w]), u.b)[0])
    residual = abs(x - u.gamma - u.b * u.c * T)
    if residual > 1e-8 * max(1.0, abs(x)):
        return Atom(location=x, mass=0.0, virtual=True)
    dT = T / (2 * u.b * T - w)
    mass = float(np.real(1.0 / (1.0 - u.b * u.c * dT)))
    return Atom(location=x, mass=max(mass, 0.0), virtual=mass <= ATOM_MASS_TOL)


# ------------------------------------------------------------------------------------
# CLASIFICACIÓN DE ÁTOMOS
# ------------------------------------------------------------------------------------

def classify_atoms(u: MeixnerParams, *, tol: float = MEIXNER_TOL) -> MeixnerClassification:
    """
    Reglas de conteo:
        c = 0              δ_γ (un átomo)
        c = 1, γ ≠ a       un átomo en x₀ = γ + bc²/(γ−a)
        c = 1, γ = a       ninguno
        c ≠ 1, Δ_g > 0     dos átomos en los ceros de f
        en otro caso       ninguno

    Ejemplo:
        classify_atoms(MeixnerParams(gamma=1, a=0, b=1, c=1)).atom_locations -> [2.0]
    """
    d = u.gamma - u.a
    disc = u.c * u.c * (d * d - 4 * u.b * (1 - u.c))
    coeffs = [d * d + u.b * u.c * u.c, (u.c - 2) * d, 1 - u.c]

    if u.c <= tol:
        atom = Atom(location=u.gamma, mass=1.0)
        return MeixnerClassification(
            atom_count=1, atom_locations=[u.gamma], discriminant=disc, f_coeffs=coeffs, atoms=[atom], delta=True
        )

    if _close(u.c, 1.0, tol):
        if abs(d) <= tol * max(1.0, abs(u.gamma)):
            locations = []
        else:
            locations = [u.gamma + u.b * u.c * u.c / d]
    elif disc > tol:
        # ceros de f en y = x − a
        ys = np.roots([coeffs[2], coeffs[1], coeffs[0]])
        locations = sorted(float(np.real(y)) + u.a for y in ys)
    else:
        locations = []

    atoms = [_physical_atom(u, x) for x in locations]
    logger.debug(f"[MEIXNER] u={u.as_tuple()} -> {len(locations)} átomos, Δ_g={disc:.6g}")
    return MeixnerClassification(
        atom_count=len(locations),
        atom_locations=locations,
        discriminant=disc,
        f_coeffs=coeffs,
        atoms=atoms,
    )


def meixner_measure(u: MeixnerParams) -> SpectralMeasure:
    """μ_u como SpectralMeasure (átomos físicos, densidad, Jacobi y forma cerrada)."""
    name = f"meixner({u.gamma:g},{u.a:g},{u.b:g},{u.c:g})"
    if u.c <= MEIXNER_TOL or u.b <= 0:
        return SpectralMeasure(name=name, atoms=[Atom(location=u.gamma, mass=1.0)], first_moment=u.gamma)
    atoms = [atom for atom in classify_atoms(u).atoms if not atom.virtual]
    return SpectralMeasure(
        name=name,
        atoms=atoms,
        support=u.support,
        density=lambda x: meixner_density(u, x),
        jacobi=_jacobi_data(u),
        cauchy=meixner_cauchy(u),
        first_moment=u.gamma,
    )


def meixner_total_mass(u: MeixnerParams) -> float:
    """∫ densidad (cuadratura con peso √((x−A)(B−x))) + masas de los átomos físicos."""
    if u.c <= MEIXNER_TOL or u.b <= 0:
        return 1.0
    mass = sum(atom.mass for atom in classify_atoms(u).atoms if not atom.virtual)
    lo, hi = u.support
    # DensityPole si f se anula dentro del soporte
    meixner_density(u, np.linspace(lo, hi, 401))
    integral, _ = scipy.integrate.quad(
        lambda x: u.c / (2 * np.pi * float(f_poly(u, x))),
        lo,
        hi,
        weight="alg",
        wvar=(0.5, 0.5),
        limit=200,
    )
    return float(mass + integral)


# ------------------------------------------------------------------------------------
# MAPA DE PARÁMETROS
# ------------------------------------------------------------------------------------

def u_transform_params(u: MeixnerParams, s: float, t: Optional[float] = None) -> MeixnerParams:
    """
    (γ, a, b, c) ↦ ((1−s−t)γ, a, b, c(1−s)(1−t)). Con (1−s)(1−t) = 0 el
    resultado es δ_{(1−s−t)γ} (c = 0).

    Raises:
        InvalidParams: (1−s)(1−t) < 0.
    """
    t = s if t is None else t
    q = (1 - s) * (1 - t)
    if q < 0:
        raise InvalidParams("U^{s,t} requiere (1−s)(1−t) ≥ 0", {"s": s, "t": t})
    return meixner_params((1 - s - t) * u.gamma, u.a, u.b, u.c * q)


def u_transform_params_inverse(u: MeixnerParams, s: float, t: Optional[float] = None) -> MeixnerParams:
    """
    Inversa (γ/(1−s−t), a, b, c/((1−s)(1−t))); para s = t, (γ/(1−2s), a, b, c/(1−s)²).

    Raises:
        InvalidParams: 1−s−t = 0 o (1−s)(1−t) ≤ 0.
    """
    t = s if t is None else t
    p, q = 1 - s - t, (1 - s) * (1 - t)
    if abs(p) <= MEIXNER_TOL or q <= 0:
        raise InvalidParams("La transformación no es invertible", {"s": s, "t": t})
    return meixner_params(u.gamma / p, u.a, u.b, u.c / q)


def discriminant_polynomial(u: MeixnerParams) -> np.ndarray:
    """Coeficientes (grado descendente) de D(s) = 4(γ²+bc)s² − 4(γ²−aγ+2bc)s + (γ−a)² − 4b(1−c)."""
    g, a, b, c = u.as_tuple()
    return np.array([4 * (g * g + b * c), -4 * (g * g - a * g + 2 * b * c), (g - a) ** 2 - 4 * b * (1 - c)])


def discriminant_at(u: MeixnerParams, s: float) -> float:
    """((1−2s)γ − a)² − 4b(1 − c(1−s)²): signo de Δ_g de los parámetros transformados."""
    return ((1 - 2 * s) * u.gamma - u.a) ** 2 - 4 * u.b * (1 - u.c * (1 - s) ** 2)


def _unit_c_points(u: MeixnerParams) -> list[float]:
    """s con c(1−s)² = 1."""
    r = 1.0 / math.sqrt(u.c)
    return [1 - r, 1 + r]


def _range_outside(lo_root: float, hi_root: float, excluded: list[float]) -> SRange:
    intervals = [(-math.inf, lo_root), (hi_root, math.inf)]
    return SRange(intervals=intervals, excluded=sorted(e for e in excluded if e < lo_root or e > hi_root))


# ------------------------------------------------------------------------------------
# TRANSICIONES DE FASE
# ------------------------------------------------------------------------------------

def phase_transition_1to2(u: MeixnerParams, *, tol: float = MEIXNER_TOL) -> MeixnerTransitionReport:
    """
    μ_u con un átomo (c = 1, γ ≠ a): U^s(μ_u) tiene dos átomos donde
    φ(s) = 4(b+γ²)s² − 4(γ²−aγ+2b)s + (γ−a)² > 0, salvo s ∈ {0, 1, 2}.

    La posición relativa de P_u = (a/γ, b/γ²) respecto de la cónica
    x² + 2x − 4y − 3 = 0 decide el signo del discriminante de φ:
    adentro (x² + 2x − 4y − 3 > 0) → s ∈ ℝ∖{0,1,2}; sobre ella → además se
    excluye el cero doble s₀; afuera → s < s₁ o s > s₂.

    Raises:
        HypothesisViolated: μ_u no tiene exactamente un átomo por la regla c = 1, γ ≠ a.
    """
    if not _close(u.c, 1.0, tol) or abs(u.gamma - u.a) <= tol * max(1.0, abs(u.gamma)):
        raise HypothesisViolated("La transición 1→2 requiere c = 1 y γ ≠ a", {"params": u.as_tuple()})

    g, a, b = u.gamma, u.a, u.b
    phi = np.array([4 * (b + g * g), -4 * (g * g - a * g + 2 * b), (g - a) ** 2])
    disc = phi[1] ** 2 - 4 * phi[0] * phi[2]
    scale = max(1.0, phi[1] ** 2, abs(4 * phi[0] * phi[2]))
    exceptional = [0.0, 1.0, 2.0]

    details: dict = {"phi": phi.tolist(), "phi_discriminant": float(disc)}
    if g != 0:
        x, y = a / g, b / (g * g)
        details["P_u"] = (x, y)
        details["conic_value"] = x * x + 2 * x - 4 * y - 3

    if abs(disc) <= tol * scale:
        s0 = float(-phi[1] / (2 * phi[0]))
        case, srange = "on", SRange(intervals=[(-math.inf, math.inf)], excluded=sorted(set(exceptional + [s0])))
        details["s0"] = s0
    elif disc < 0:
        case, srange = "inside", SRange(intervals=[(-math.inf, math.inf)], excluded=exceptional)
    else:
        s1, s2 = sorted(float(np.real(r)) for r in np.roots(phi))
        case, srange = "outside", _range_outside(s1, s2, exceptional)
        details.update(s1=s1, s2=s2)

    logger.info(f"[MEIXNER] 1→2 para u={u.as_tuple()}: caso {case}, s ∈ {srange.describe()}")
    return MeixnerTransitionReport(transition="1to2", target=2, case=case, params=u, range=srange, details=details)


def _require_zero_atoms(u: MeixnerParams, tol: float) -> MeixnerClassification:
    cls = classify_atoms(u, tol=tol)
    if cls.atom_count != 0 or cls.delta:
        raise HypothesisViolated("Se requiere una medida sin átomos", {"params": u.as_tuple(), "atoms": cls.atom_count})
    if u.b <= 0:
        raise HypothesisViolated("Se requiere b > 0", {"params": u.as_tuple()})
    return cls


def phase_transition_0to1(u: MeixnerParams, *, tol: float = MEIXNER_TOL) -> MeixnerTransitionReport:
    """
    μ_u sin átomos: U^s(μ_u) tiene exactamente un átomo solo en puntos
    aislados, s = 1 (medida degenerada δ) y s = 1 ± c^{−1/2} con (1−2s)γ ≠ a.

    Caso (1a) c = 1, γ = a: queda s = 2 (si γ ≠ 0). Caso (1b) c ≠ 1: además
    se informan las cotas envolventes 1 ± (1−r²)^{−1/2}, r² = (γ−a)²/(4b).

    Raises:
        HypothesisViolated, UndefinedRange
    """
    _require_zero_atoms(u, tol)
    points = []
    for s in _unit_c_points(u):
        if abs((1 - 2 * s) * u.gamma - u.a) > tol * max(1.0, abs(u.a)):
            points.append(s)

    details: dict = {"exact_points": list(points)}
    if _close(u.c, 1.0, tol):
        case = "1a"
        note = None if points else "γ = a = 0: en s = 2 el parámetro transformado cumple γ_s = a y no hay átomo"
    else:
        case = "1b"
        r2 = (u.gamma - u.a) ** 2 / (4 * u.b)
        if 1 - r2 <= 0:
            raise UndefinedRange("1 − r² ≤ 0: las cotas envolventes no están definidas", {"r2": r2})
        k = (1 - r2) ** -0.5
        details.update(r2=r2, envelope=(1 - k, 1 + k))
        note = "el conjunto exacto de un átomo es finito; las cotas envolventes se informan aparte"

    srange = SRange(points=sorted(points + [1.0]))
    logger.info(f"[MEIXNER] 0→1 para u={u.as_tuple()}: caso {case}, s ∈ {srange.describe()}")
    return MeixnerTransitionReport(
        transition="0to1", target=1, case=case, params=u, range=srange, details=details, note=note
    )


def phase_transition_0to2(u: MeixnerParams, *, tol: float = MEIXNER_TOL) -> MeixnerTransitionReport:
    """
    μ_u sin átomos: U^s(μ_u) tiene dos átomos donde D(s) > 0, s ≠ 1 y
    c(1−s)² ≠ 1.

        (2a) c = 1, γ = a:      s < 0 o s > 2b/(a²+b)
        (2b) (γ−a)² < 4b(1−c):  s < s₁ o s > s₂ (ceros de D, s₁ < 0 < s₂)
        (2c) igualdad y γ² − aγ + 2bc = 0:  s ≠ 0
        (2d) igualdad, en otro caso:  s fuera de [min(0, s₂), max(0, s₂)],
             s₂ = (γ²−aγ+2bc)/(γ²+bc)

    Raises:
        HypothesisViolated
    """
    _require_zero_atoms(u, tol)
    g, a, b, c = u.as_tuple()
    exceptional = [1.0] + _unit_c_points(u)
    details: dict = {"D": discriminant_polynomial(u).tolist()}

    if _close(c, 1.0, tol):
        threshold = 2 * b / (a * a + b)
        case, srange = "2a", _range_outside(0.0, threshold, exceptional)
        details["threshold"] = threshold
    else:
        gap = (g - a) ** 2 - 4 * b * (1 - c)
        if gap < -tol * max(1.0, 4 * b):
            s1, s2 = sorted(float(np.real(r)) for r in np.roots(discriminant_polynomial(u)))
            case, srange = "2b", _range_outside(s1, s2, exceptional)
            details.update(s1=s1, s2=s2)
        else:
            linear = g * g - a * g + 2 * b * c
            if abs(linear) <= tol * max(1.0, g * g + 2 * b * c):
                case, srange = "2c", _range_outside(0.0, 0.0, exceptional)
            else:
                s2 = linear / (g * g + b * c)
                case, srange = "2d", _range_outside(min(0.0, s2), max(0.0, s2), exceptional)
                details["s2"] = s2

    logger.info(f"[MEIXNER] 0→2 para u={u.as_tuple()}: caso {case}, s ∈ {srange.describe()}")
    return MeixnerTransitionReport(transition="0to2", target=2, case=case, params=u, range=srange, details=details)


def predicted_atom_count(u: MeixnerParams, s: float, *, tol: float = MEIXNER_TOL) -> tuple[int, bool]:
    """
    Número de átomos de U^s(μ_u) según las transiciones, y si s cae sobre
    una frontera (D(s) ≈ 0) donde el conteo es sensible al redondeo.

    Raises:
        HypothesisViolated: μ_u con dos átomos o δ.
    """
    count = classify_atoms(u, tol=tol).atom_count
    scale = max(1.0, float(np.max(np.abs(discriminant_polynomial(u)))) * max(1.0, s * s))
    d_s = discriminant_at(u, s)
    c_s = u.c * (1 - s) ** 2
    # cerca de s = 1 el Δ_g transformado es c_s²·D(s) y cae bajo la tolerancia
    flagged = abs(d_s) <= 1e3 * tol * scale or c_s * c_s * abs(d_s) <= 10 * tol

    if count == 1 and not classify_atoms(u, tol=tol).delta:
        report = phase_transition_1to2(u, tol=tol)
        if report.range.contains(s):
            return 2, flagged
        if any(abs(s - e) <= 1e-10 for e in (0.0, 2.0)):
            return (1 if abs((1 - 2 * s) * u.gamma - u.a) > tol * max(1.0, abs(u.a)) else 0), flagged
        if abs(s - 1.0) <= 1e-10:
            return 1, flagged
        return 0, flagged

    if count == 0:
        if phase_transition_0to2(u, tol=tol).range.contains(s):
            return 2, flagged
        if phase_transition_0to1(u, tol=tol).range.contains(s):
            return 1, flagged
        return 0, flagged

    raise HypothesisViolated("Las transiciones cubren medidas con cero o un átomo", {"params": u.as_tuple()})
