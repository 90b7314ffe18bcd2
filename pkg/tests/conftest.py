# tests/conftest.py

import numpy as np
import pytest

from app.core.config import DEFAULT_SEED


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(DEFAULT_SEED)


@pytest.fixture
def diag4():
    """A = diag(1,2,3,4), u = ½(1,1,1,1)."""
    return np.diag([1.0, 2.0, 3.0, 4.0]), np.full(4, 0.5)


def random_complex(rng: np.random.Generator, *shape: int) -> np.ndarray:
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def random_hermitian(rng: np.random.Generator, n: int) -> np.ndarray:
    X = random_complex(rng, n, n)
    return (X + X.conj().T) / 2


def random_unit(rng: np.random.Generator, n: int, complex_: bool = True) -> np.ndarray:
    v = random_complex(rng, n) if complex_ else rng.standard_normal(n)
    return v / np.linalg.norm(v)
