# app/core/errors.py
"""
Jerarquía de excepciones del proyecto.

Dos ramas:
- InputError: entradas o hipótesis inválidas (la CLI termina con código 2).
- NumericalError: fallas del cálculo numérico (la CLI termina con código 3).

Cada excepción acepta un `detail` opcional con diagnósticos (tolerancias,
valores observados) que la CLI vuelca a stderr.
"""

from typing import Any, Optional


class SpectralError(Exception):
    """Base de todas las excepciones del proyecto."""

    exit_code = 3

    def __init__(self, message: str, detail: Optional[dict[str, Any]] = None):
        super().__init__(message)
        self.message = message
        self.detail = detail or {}

    def __str__(self) -> str:
        if not self.detail:
            return self.message
        extra = ", ".join(f"{k}={v}" for k, v in self.detail.items())
        return f"{self.message} ({extra})"


# ------------------------------------------------------------------------------------
# ENTRADAS E HIPÓTESIS
# ------------------------------------------------------------------------------------

class InputError(SpectralError):
    exit_code = 2


class InvalidInput(InputError):
    """Dimensiones inconsistentes, valores no finitos o formato ilegible."""


class GridParseError(InputError):
    pass


class InvalidParams(InputError):
    pass


class HypothesisViolated(InputError):
    """Las hipótesis del resultado que se quiere aplicar no se cumplen."""


class NotSelfAdjoint(InputError):
    pass


class ScalarMultipleCase(InputError):
    """B*v es paralelo a u: el caso se trata con teoría de perturbaciones usual."""


class UnsupportedRegion(InputError):
    pass


class UndefinedRange(InputError):
    pass


# ------------------------------------------------------------------------------------
# FALLAS NUMÉRICAS
# ------------------------------------------------------------------------------------

class NumericalError(SpectralError):
    exit_code = 3


class SingularMatrix(NumericalError):
    pass


class SingularB(SingularMatrix):
    pass


class NoConvergence(NumericalError):
    pass


class PoleHit(NumericalError):
    pass


class DegenerateSpectrum(NumericalError):
    pass


class DegenerateDirections(NumericalError):
    pass


class ComplexSpectrum(NumericalError):
    pass


class NoJordanChain(NumericalError):
    pass


class InconsistentExtrapolation(NumericalError):
    pass


class DenominatorVanishes(NumericalError):
    pass


class NonConvergentExtrapolation(NumericalError):
    pass


class DensityPole(NumericalError):
    pass
