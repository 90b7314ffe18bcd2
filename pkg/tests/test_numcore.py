import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from app.core.errors import InvalidInput, SingularMatrix
from app.services.numcore import (
    CPoly,
    as_cmatrix,
    as_cvector,
    char_poly,
    cluster_roots,
    eigenvalues_dense,
    inner,
    match_roots,
    poly_roots,
    solve_linear,
)
from tests.conftest import random_complex


def test_as_cmatrix_rejects_bad_shapes():
    with pytest.raises(InvalidInput):
        as_cmatrix(np.ones((2, 3)))
    with pytest.raises(InvalidInput):
        as_cmatrix(np.array([[1.0, np.nan], [0.0, 1.0]]))
    with pytest.raises(InvalidInput):
        as_cvector(np.ones(3), size=4)


def test_as_cmatrix_is_read_only():
    M = as_cmatrix(np.eye(2))
    assert M.dtype == np.complex128
    with pytest.raises(ValueError):
        M[0, 0] = 2


def test_inner_is_linear_in_first_argument():
    x = np.array([1j, 0])
    y = np.array([1, 0])
    assert inner(x, y) == 1j
    assert inner(y, x) == -1j


def test_solve_linear_identity_and_singular():
    b = np.array([1.0, 2.0, 3.0])
    assert_allclose(solve_linear(np.eye(3), b), b)
    with pytest.raises(SingularMatrix):
        solve_linear(np.array([[1.0, 2.0], [2.0, 4.0]]), np.array([1.0, 0.0]))


def test_eigenvalues_dense_diagonal():
    assert_allclose(eigenvalues_dense(np.diag([3.0, 1.0, 2.0])), [1, 2, 3])


def test_eigenvalues_dense_rotation_is_complex():
    vals = eigenvalues_dense(np.array([[0.0, -1.0], [1.0, 0.0]]))
    assert_allclose(sorted(vals.imag), [-1, 1], atol=1e-14)


def test_char_poly_small_examples():
    assert_allclose(char_poly(np.diag([1.0, 2.0])).coeffs, [2, -3, 1])
    assert_allclose(char_poly(np.array([[0.0, 1.0], [0.0, 0.0]])).coeffs, [0, 0, 1], atol=1e-15)


def test_char_poly_matches_numpy(rng):
    for n in range(1, 9):
        M = random_complex(rng, n, n)
        expected = np.poly(M)[::-1]
        assert_allclose(char_poly(M).coeffs, expected, rtol=1e-9, atol=1e-9)


def test_poly_roots_quadratic_and_double_root():
    roots = poly_roots(CPoly([2, -3, 1]))
    assert_allclose(roots, [1, 2])
    double = poly_roots(CPoly([1, -2, 1]))
    assert_allclose(double, [1, 1], atol=1e-7)


def test_poly_roots_zero_roots_are_exact():
    roots = poly_roots(CPoly([0, 0, -1, 1]))
    assert np.count_nonzero(roots == 0) == 2
    assert_allclose(roots[-1], 1)


def test_poly_roots_tiny_root_next_to_unit_root():
    tiny = 1.7252384199812781e-106
    p = CPoly.from_roots([1.0, tiny])
    found = poly_roots(p)
    assert len(found) == 2
    assert_allclose(found[-1], 1.0)
    assert abs(found[0]) < 1e-12
    for r in found:
        assert abs(p(r)) <= 1e-10 * np.max(np.abs(p.coeffs))


def test_poly_roots_rejects_constants():
    with pytest.raises(InvalidInput):
        poly_roots(CPoly([3.0]))


@settings(max_examples=50, deadline=None)
@given(st.lists(st.complex_numbers(max_magnitude=5, allow_nan=False, allow_infinity=False), min_size=1, max_size=8))
def test_poly_roots_round_trip(roots):
    p = CPoly.from_roots(roots)
    found = poly_roots(p)
    for r in found:
        assert abs(p(r)) <= 1e-8 * max(1.0, float(p.scale(r)), float(np.max(np.abs(p.coeffs))))


def test_cpoly_strip_and_degree():
    p = CPoly([1.0, 2.0, 1e-20])
    assert p.degree == 2
    assert p.strip().degree == 1
    assert CPoly([0.0]).degree == -1


def test_cpoly_arithmetic():
    p = CPoly([1, 1])
    q = p * p - CPoly([1, 2, 1])
    assert q.is_zero
    assert (p + 1).coeffs[0] == 2


def test_cluster_roots_counts_multiplicity():
    clusters = cluster_roots([1.0, 1.0 + 1e-9, 2.0])
    assert [m for _, m in clusters] == [2, 1]


def test_match_roots_reports_worst_distance():
    pairs, worst = match_roots([0, 1, 2], [2.1, 0, 1])
    assert len(pairs) == 3
    assert worst == pytest.approx(0.1)
    with pytest.raises(InvalidInput):
        match_roots([0, 1], [0])
