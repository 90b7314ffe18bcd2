# path: app/services/numcore.py
"""
Núcleo numérico denso: validación de matrices y vectores complejos,
resolución de sistemas, autovalores densos (oráculo de todo el resto),
polinomio característico y raíces de polinomios (Aberth–Ehrlich).

Todos los objetos devueltos son inmutables (arrays de solo lectura o
dataclasses congeladas); las funciones son puras y seguras entre threads.
"""

import logging
import warnings
from dataclasses import dataclass
from typing import Iterable, Union

import numpy as np
import scipy.linalg
from numpy.polynomial import polynomial as npoly
from numpy.typing import ArrayLike, NDArray

from app.core.config import (
    MAX_DENSE_SIZE,
    PIVOT_TOL,
    POLY_STRIP_TOL,
    ROOT_CLUSTER_TOL,
    ROOT_MAX_ITER,
    ROOT_TOL,
)
from app.core.errors import InvalidInput, NoConvergence, SingularMatrix

logger = logging.getLogger(__name__)

CMatrix = NDArray[np.complex128]
CVector = NDArray[np.complex128]
Scalar = Union[complex, float, int]

_EPS = np.finfo(float).eps


# ------------------------------------------------------------------------------------
# VALIDACIÓN DE ENTRADAS
# ------------------------------------------------------------------------------------

def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, dtype=np.complex128, copy=True)
    arr.setflags(write=False)
    return arr


def as_cmatrix(M: ArrayLike, *, square: bool = True, name: str = "M") -> CMatrix:
    """
    Convierte la entrada en una CMatrix (complex128, solo lectura).

    Raises:
        InvalidInput: si no es 2-D, no es cuadrada (cuando se pide), excede
            el tamaño máximo o tiene entradas no finitas.
    """
    arr = np.asarray(M, dtype=np.complex128)
    if arr.ndim != 2:
        raise InvalidInput(f"{name} debe ser una matriz 2-D", {"ndim": arr.ndim})
    if square and arr.shape[0] != arr.shape[1]:
        raise InvalidInput(f"{name} debe ser cuadrada", {"shape": arr.shape})
    if max(arr.shape) > MAX_DENSE_SIZE:
        raise InvalidInput(f"{name} excede el tamaño denso máximo", {"shape": arr.shape, "max": MAX_DENSE_SIZE})
    if arr.size == 0:
        raise InvalidInput(f"{name} está vacía")
    if not np.all(np.isfinite(arr)):
        raise InvalidInput(f"{name} tiene entradas no finitas")
    return _frozen(arr)


def as_cvector(v: ArrayLike, *, size: int | None = None, name: str = "v") -> CVector:
    arr = np.asarray(v, dtype=np.complex128)
    if arr.ndim != 1:
        raise InvalidInput(f"{name} debe ser un vector 1-D", {"ndim": arr.ndim})
    if size is not None and arr.shape[0] != size:
        raise InvalidInput(f"{name} tiene dimensión inconsistente", {"expected": size, "got": arr.shape[0]})
    if not np.all(np.isfinite(arr)):
        raise InvalidInput(f"{name} tiene entradas no finitas")
    return _frozen(arr)


def inner(x: ArrayLike, y: ArrayLike) -> complex:
    """⟨x, y⟩ = Σ xᵢ·conj(yᵢ): lineal en el primer argumento."""
    return complex(np.vdot(y, x))


def outer(x: ArrayLike, y: ArrayLike) -> CMatrix:
    """x y* (la matriz de f ↦ ⟨f, y⟩ x)."""
    return np.outer(x, np.conj(y))


def is_self_adjoint(M: ArrayLike, tol: float = 1e-12) -> bool:
    M = np.asarray(M)
    scale = max(1.0, float(np.max(np.abs(M))))
    return bool(np.max(np.abs(M - M.conj().T)) <= tol * scale)


# ------------------------------------------------------------------------------------
# POLINOMIOS
# ------------------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class CPoly:
    """
    Polinomio complejo con coeficientes en orden ascendente.

    Los ceros finales exactos se eliminan al construir; la eliminación con
    tolerancia es explícita (`strip`). El polinomio cero tiene grado -1.
    """

    coeffs: CVector

    def __post_init__(self):
        c = np.atleast_1d(np.asarray(self.coeffs, dtype=np.complex128))
        if c.ndim != 1:
            raise InvalidInput("Los coeficientes deben formar un vector 1-D")
        if not np.all(np.isfinite(c)):
            raise InvalidInput("Coeficientes no finitos en el polinomio")
        nz = np.flatnonzero(c)
        c = c[: nz[-1] + 1] if nz.size else np.zeros(1, dtype=np.complex128)
        object.__setattr__(self, "coeffs", _frozen(c))

    # -- construcción -------------------------------------------------------------
    @classmethod
    def from_roots(cls, roots: Iterable[Scalar]) -> "CPoly":
        return cls(npoly.polyfromroots(np.asarray(list(roots), dtype=np.complex128)))

    @classmethod
    def constant(cls, value: Scalar) -> "CPoly":
        return cls(np.array([value], dtype=np.complex128))

    # -- propiedades --------------------------------------------------------------
    @property
    def is_zero(self) -> bool:
        return not np.any(self.coeffs)

    @property
    def degree(self) -> int:
        return -1 if self.is_zero else len(self.coeffs) - 1

    @property
    def leading(self) -> complex:
        return complex(self.coeffs[-1])

    def strip(self, tol: float = POLY_STRIP_TOL) -> "CPoly":
        """Elimina coeficientes finales con |c| ≤ tol·max|c|."""
        absc = np.abs(self.coeffs)
        big = absc.max()
        if big == 0:
            return self
        keep = np.flatnonzero(absc > tol * big)
        return CPoly(self.coeffs[: keep[-1] + 1])

    def scale(self, z: ArrayLike) -> np.ndarray:
        """Σ |cᵢ|·|z|ⁱ: escala de referencia para el error hacia atrás."""
        return npoly.polyval(np.abs(z), np.abs(self.coeffs))

    def derivative(self) -> "CPoly":
        return CPoly(npoly.polyder(self.coeffs))

    def roots(self, **kwargs) -> CVector:
        return poly_roots(self, **kwargs)

    # -- aritmética ---------------------------------------------------------------
    def __call__(self, z):
        return npoly.polyval(z, self.coeffs)

    def _coerce(self, other) -> np.ndarray:
        if isinstance(other, CPoly):
            return other.coeffs
        return np.array([other], dtype=np.complex128)

    def __add__(self, other) -> "CPoly":
        return CPoly(npoly.polyadd(self.coeffs, self._coerce(other)))

    __radd__ = __add__

    def __sub__(self, other) -> "CPoly":
        return CPoly(npoly.polysub(self.coeffs, self._coerce(other)))

    def __rsub__(self, other) -> "CPoly":
        return CPoly(npoly.polysub(self._coerce(other), self.coeffs))

    def __mul__(self, other) -> "CPoly":
        return CPoly(npoly.polymul(self.coeffs, self._coerce(other)))

    __rmul__ = __mul__

    def __neg__(self) -> "CPoly":
        return CPoly(-self.coeffs)

    def __repr__(self) -> str:
        return f"CPoly(degree={self.degree}, coeffs={np.array2string(self.coeffs, precision=6)})"


# ------------------------------------------------------------------------------------
# SISTEMAS LINEALES Y AUTOVALORES
# ------------------------------------------------------------------------------------

def solve_linear(M: ArrayLike, b: ArrayLike, *, pivot_tol: float = PIVOT_TOL) -> CVector:
    """
    Resuelve Mx = b por eliminación con pivoteo parcial (LAPACK getrf/getrs).

    Raises:
        SingularMatrix: si algún pivote cae bajo pivot_tol·(máxima norma de fila).
    """
    M = as_cmatrix(M)
    b = as_cvector(b, size=M.shape[0], name="b")

    row_norm = float(np.max(np.sum(np.abs(M), axis=1)))
    if row_norm == 0.0:
        raise SingularMatrix("Matriz nula")

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        lu, piv = scipy.linalg.lu_factor(M, check_finite=False)

    smallest_pivot = float(np.min(np.abs(np.diag(lu))))
    if smallest_pivot <= pivot_tol * row_norm:
        raise SingularMatrix(
            "Pivote por debajo de la tolerancia",
            {"pivot": smallest_pivot, "threshold": pivot_tol * row_norm},
        )
    return scipy.linalg.lu_solve((lu, piv), b, check_finite=False)


def eigenvalues_dense(M: ArrayLike) -> CVector:
    """
    Autovalores con multiplicidad (Hessenberg + QR con shifts de LAPACK),
    ordenados por parte real y luego imaginaria.

    Raises:
        NoConvergence: si el QR no converge.
    """
    M = as_cmatrix(M)
    try:
        vals = np.linalg.eigvals(M)
    except np.linalg.LinAlgError as exc:
        raise NoConvergence("El algoritmo QR no convergió", {"n": M.shape[0]}) from exc
    return np.sort_complex(vals)


def eigenvalues_hermitian(M: ArrayLike) -> np.ndarray:
    """Autovalores reales ascendentes de una matriz hermítica."""
    M = as_cmatrix(M)
    try:
        return np.linalg.eigvalsh(M)
    except np.linalg.LinAlgError as exc:
        raise NoConvergence("eigvalsh no convergió", {"n": M.shape[0]}) from exc


def char_poly(M: ArrayLike) -> CPoly:
    """
    Coeficientes de det(z·I − M).

    Reduce M a forma de Hessenberg superior H (transformaciones unitarias) y
    expande det(z·I − H) con la recurrencia de La Budde sobre los menores
    principales líderes:

        p_k = (z − h_kk)·p_{k−1} − Σ_{i<k} h_ik·(h_{i+1,i}···h_{k,k−1})·p_{i−1}

    Ejemplo:
        char_poly(np.diag([1, 2])) -> CPoly([2, -3, 1])
    """
    M = as_cmatrix(M)
    H = scipy.linalg.hessenberg(M)
    n = H.shape[0]

    minors = [np.array([1.0 + 0j])]
    for k in range(1, n + 1):
        pk = npoly.polysub(npoly.polymulx(minors[k - 1]), H[k - 1, k - 1] * minors[k - 1])
        chain = 1.0 + 0j
        for i in range(k - 1, 0, -1):
            chain *= H[i, i - 1]
            if chain == 0:
                break
            pk = npoly.polysub(pk, H[i - 1, k - 1] * chain * minors[i - 1])
        minors.append(pk)
    return CPoly(minors[n])


# ------------------------------------------------------------------------------------
# RAÍCES DE POLINOMIOS
# ------------------------------------------------------------------------------------

def _backward_error(p: CPoly, z: np.ndarray) -> np.ndarray:
    ref = p.scale(z)
    return np.abs(p(z)) / np.where(ref > 0, ref, 1.0)


def _residual_error(p: CPoly, z: np.ndarray) -> np.ndarray:
    """Menor entre el error hacia atrás y |p(z)|/max|cᵢ|."""
    absolute = np.abs(p(z)) / np.max(np.abs(p.coeffs))
    return np.minimum(_backward_error(p, z), absolute)


def _aberth(p: CPoly, max_iter: int) -> tuple[np.ndarray, int]:
    coeffs = p.coeffs
    n = p.degree
    dp = p.derivative()
    lead = abs(coeffs[-1])
    radius = max(abs(coeffs[k] / lead) ** (1.0 / (n - k)) for k in range(n))
    z = radius * np.exp(1j * (2 * np.pi * np.arange(n) / n + 0.4))

    active = np.ones(n, dtype=bool)
    for iteration in range(1, max_iter + 1):
        pz = p(z)
        dpz = dp(z)

        done = _backward_error(p, z) <= 4 * n * _EPS
        active &= ~done
        if not active.any():
            return z, iteration

        diff = z[:, None] - z[None, :]
        np.fill_diagonal(diff, 1.0)
        repulsion = 1.0 / diff
        np.fill_diagonal(repulsion, 0.0)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = pz / dpz
            step = ratio / (1.0 - ratio * repulsion.sum(axis=1))
        if not np.all(np.isfinite(step[active])):
            raise FloatingPointError("paso de Aberth no finito")

        z = np.where(active, z - step, z)
        active &= np.abs(step) > 4 * _EPS * np.maximum(np.abs(z), 1.0)
        if not active.any():
            return z, iteration
    return z, max_iter


def poly_roots(
    p: CPoly,
    *,
    tol: float = ROOT_TOL,
    max_iter: int = ROOT_MAX_ITER,
) -> CVector:
    """
    Todas las raíces (con multiplicidad) por iteración de Aberth–Ehrlich;
    si no converge se recurre a los autovalores de la matriz compañera.

    Cada raíz r cumple |p(r)| ≤ tol·max|cᵢ| o bien |p(r)| ≤ tol·Σ|cᵢ||r|ⁱ.

    Raises:
        InvalidInput: grado < 1.
        NoConvergence: ni Aberth ni la matriz compañera alcanzan la tolerancia.
    """
    if p.degree < 1:
        raise InvalidInput("poly_roots requiere grado ≥ 1", {"degree": p.degree})

    zero_roots = int(np.flatnonzero(p.coeffs)[0])
    reduced = CPoly(p.coeffs[zero_roots:])
    coeffs = reduced.coeffs
    roots = [np.zeros(zero_roots, dtype=np.complex128)]

    if len(coeffs) == 2:
        roots.append(np.array([-coeffs[0] / coeffs[1]]))
    elif len(coeffs) > 2:
        found = None
        try:
            z, iterations = _aberth(reduced, max_iter)
            if np.all(_residual_error(reduced, z) <= tol):
                found = z
                logger.debug(f"[NUMCORE] Aberth convergió en {iterations} iteraciones (grado {len(coeffs) - 1})")
            else:
                logger.info(f"[NUMCORE] Aberth no alcanzó la tolerancia tras {iterations} iteraciones, usando matriz compañera")
        except FloatingPointError as exc:
            logger.info(f"[NUMCORE] Aberth abortado ({exc}), usando matriz compañera")

        if found is None:
            found = eigenvalues_dense(npoly.polycompanion(coeffs))
            worst = float(np.max(_residual_error(reduced, found)))
            if worst > tol:
                raise NoConvergence(
                    "No se pudieron aislar las raíces del polinomio",
                    {"degree": len(coeffs) - 1, "backward_error": worst},
                )
        roots.append(found)

    return np.sort_complex(np.concatenate(roots))


def cluster_roots(
    roots: ArrayLike, *, tol: float = ROOT_CLUSTER_TOL
) -> list[tuple[complex, int]]:
    """
    Agrupa raíces a distancia ≤ tol·max(1, max|r|) y devuelve
    (centro, multiplicidad) por grupo. El centro es el promedio del grupo.
    """
    roots = np.asarray(roots, dtype=np.complex128)
    if roots.size == 0:
        return []
    radius = tol * max(1.0, float(np.max(np.abs(roots))))
    clusters: list[list[complex]] = []
    for r in np.sort_complex(roots):
        for group in clusters:
            if abs(r - group[0]) <= radius:
                group.append(r)
                break
        else:
            clusters.append([r])
    return [(complex(np.mean(group)), len(group)) for group in clusters]


def match_roots(a: ArrayLike, b: ArrayLike) -> tuple[list[tuple[int, int]], float]:
    """
    Emparejamiento greedy por vecino más cercano entre dos multiconjuntos.

    Returns:
        (pares (i, j), máxima distancia emparejada)
    """
    a = np.asarray(a, dtype=np.complex128)
    b = np.asarray(b, dtype=np.complex128)
    if a.shape != b.shape:
        raise InvalidInput("Los multiconjuntos deben tener el mismo tamaño", {"a": a.shape, "b": b.shape})
    if a.size == 0:
        return [], 0.0

    dist = np.abs(a[:, None] - b[None, :])
    pairs = []
    worst = 0.0
    for _ in range(a.size):
        i, j = np.unravel_index(np.argmin(dist), dist.shape)
        worst = max(worst, float(dist[i, j]))
        pairs.append((int(i), int(j)))
        dist[i, :] = np.inf
        dist[:, j] = np.inf
    return sorted(pairs), worst


def spread(values: ArrayLike) -> float:
    """Diámetro de un conjunto de números complejos (al menos 1)."""
    values = np.asarray(values, dtype=np.complex128)
    if values.size < 2:
        return 1.0
    return max(1.0, float(np.max(np.abs(values[:, None] - values[None, :]))))
