import numpy as np
import pytest
from numpy.testing import assert_allclose

from app.core.errors import (
    ComplexSpectrum,
    DegenerateDirections,
    DegenerateSpectrum,
    HypothesisViolated,
    InvalidInput,
    NoJordanChain,
    NotSelfAdjoint,
)
from app.services.numcore import eigenvalues_dense, match_roots
from app.services.rank2 import (
    Rank2Perturbation,
    asymptotic_spectrum,
    interlacing_condition,
    interlacing_curves,
    limit_polynomial_q,
    perturbed_char_poly,
    perturbed_matrix,
    phase_transition_check,
    r_factor,
    spectrum_criterion,
    verify_interlacing,
    weyl_perturbed,
)
from tests.conftest import random_complex, random_hermitian, random_unit


def _direct_weyl(P: Rank2Perturbation, z: complex) -> complex:
    x = np.linalg.solve(z * np.eye(P.n) - perturbed_matrix(P), P.u)
    return complex(np.vdot(P.u, x))


# ------------------------------------------------------------------------------------
# Ejemplo diag(1,2,3,4)
# ------------------------------------------------------------------------------------

@pytest.mark.parametrize(
    "s, t, expected, x0, applies, interlaces",
    [
        (1.1, 1.2, [-3.25, 1.38, 2.50, 3.61], -3.37, True, True),
        (-2.0, -3.0, [0.86, 2.16, 3.38, 16.10], 1.36, False, False),
    ],
)
def test_diag4_example(diag4, s, t, expected, x0, applies, interlaces):
    A, u = diag4
    P = Rank2Perturbation.antidiagonal(A, u, s, t)
    eigs = eigenvalues_dense(perturbed_matrix(P))
    assert np.max(np.abs(eigs.imag)) < 1e-8
    assert_allclose(np.sort(eigs.real), expected, atol=0.01)

    report = interlacing_condition(A, u, s, t)
    assert report.x0 == pytest.approx(x0, abs=0.01)
    assert report.applies is applies
    assert report.m == pytest.approx(2.5)
    assert verify_interlacing(np.diag(A), eigs) is interlaces


def test_diag4_condition_applies_for_mixed_signs(diag4):
    A, u = diag4
    report = interlacing_condition(A, u, 1.1, 0.9)
    assert report.x0 == pytest.approx(-2.45, abs=0.01)
    assert report.applies


def test_zero_parameters_give_spectrum_of_A(diag4):
    A, u = diag4
    roots = perturbed_char_poly(Rank2Perturbation.antidiagonal(A, u)).roots()
    assert_allclose(np.sort(roots.real), [1, 2, 3, 4], atol=1e-10)


# ------------------------------------------------------------------------------------
# Factorización
# ------------------------------------------------------------------------------------

def test_factorization_oracle(rng):
    worst = 0.0
    for _ in range(100):
        n = int(rng.integers(2, 9))
        A = random_complex(rng, n, n)
        u, w, g, h = (random_complex(rng, n) for _ in range(4))
        s, t = rng.uniform(-2, 2, size=2)
        P = Rank2Perturbation.general(A, u, w, g, h, s, t)
        roots = perturbed_char_poly(P).roots()
        _, dist = match_roots(roots, eigenvalues_dense(perturbed_matrix(P)))
        worst = max(worst, dist)
    assert worst < 1e-7


def test_perturbed_char_poly_is_monic_of_degree_n(rng):
    A = random_complex(rng, 5, 5)
    P = Rank2Perturbation.general(A, *(random_complex(rng, 5) for _ in range(4)), 0.7, -1.1)
    p = perturbed_char_poly(P)
    assert p.degree == 5
    assert p.leading == pytest.approx(1.0)


def test_spectrum_criterion_vanishes_on_perturbed_spectrum(rng):
    A = random_hermitian(rng, 4)
    u = random_unit(rng, 4)
    P = Rank2Perturbation.antidiagonal(A, u, 0.6, -0.4)
    R = r_factor(P)
    for lam in eigenvalues_dense(perturbed_matrix(P)):
        assert abs(spectrum_criterion(P, lam)) < 1e-8
        assert abs(R(lam)) < 1e-7
    z = 0.5 + 1j
    assert R(z) == pytest.approx(spectrum_criterion(P, z), rel=1e-9)


# ------------------------------------------------------------------------------------
# Función de Weyl perturbada
# ------------------------------------------------------------------------------------

def test_weyl_general_matches_resolvent(rng):
    A = random_complex(rng, 5, 5)
    P = Rank2Perturbation.general(A, *(random_complex(rng, 5) for _ in range(4)), 0.8, 1.3)
    for _ in range(10):
        z = complex(rng.uniform(-3, 3), rng.uniform(0.5, 3))
        assert weyl_perturbed(P, z, formula="general") == pytest.approx(_direct_weyl(P, z), abs=1e-9)


@pytest.mark.parametrize("shape", ["antidiagonal", "diagonal"])
def test_weyl_paired_shapes(rng, shape):
    A = random_complex(rng, 5, 5)
    u = random_unit(rng, 5)
    P = getattr(Rank2Perturbation, shape)(A, u, 0.4, -0.9)
    for _ in range(10):
        z = complex(rng.uniform(-3, 3), rng.uniform(0.5, 3))
        assert weyl_perturbed(P, z, formula="paired") == pytest.approx(_direct_weyl(P, z), abs=1e-9)


@pytest.mark.parametrize("shape", ["antidiagonal", "diagonal"])
def test_weyl_self_adjoint_shapes(rng, shape):
    A = random_hermitian(rng, 6)
    u = random_unit(rng, 6)
    P = getattr(Rank2Perturbation, shape)(A, u, 1.7, -0.3)
    for _ in range(10):
        z = complex(rng.uniform(-3, 3), rng.uniform(0.5, 3))
        assert weyl_perturbed(P, z) == pytest.approx(_direct_weyl(P, z), abs=1e-9)
        assert weyl_perturbed(P, z, formula="self_adjoint") == pytest.approx(_direct_weyl(P, z), abs=1e-9)


def test_weyl_formula_shape_mismatch(rng):
    P = Rank2Perturbation.general(np.eye(2), *(random_complex(rng, 2) for _ in range(4)))
    with pytest.raises(InvalidInput):
        weyl_perturbed(P, 1j, formula="paired")
    Q = Rank2Perturbation.antidiagonal(random_complex(rng, 3, 3), random_unit(rng, 3))
    with pytest.raises(NotSelfAdjoint):
        weyl_perturbed(Q, 1j, formula="self_adjoint")


# ------------------------------------------------------------------------------------
# Asintótica para parámetros grandes
# ------------------------------------------------------------------------------------

def test_asymptotic_spectrum_matches_large_parameters(rng):
    n = 5
    A = random_complex(rng, n, n)
    P = Rank2Perturbation.general(A, *(random_complex(rng, n) for _ in range(4)))
    alpha, beta = 1.0, -0.5
    result = asymptotic_spectrum(P, alpha, beta)
    assert len(result.finite_limits) == n - 2

    r = 1e7
    eigs = eigenvalues_dense(perturbed_matrix(P.with_params(alpha * r, beta * r)))
    order = np.argsort(np.abs(eigs))
    _, d_finite = match_roots(eigs[order[: n - 2]], result.finite_limits)
    _, d_div = match_roots(eigs[order[n - 2 :]] / r, result.divergent)
    assert d_finite < 1e-4
    assert d_div < 1e-5


def test_limit_polynomial_degree(rng):
    n = 6
    P = Rank2Perturbation.general(random_complex(rng, n, n), *(random_complex(rng, n) for _ in range(4)))
    q = limit_polynomial_q(P)
    assert q.degree == n - 2
    assert q.roots.size == n - 2


def test_degenerate_directions(rng):
    A = random_complex(rng, 4, 4)
    u, w = random_complex(rng, 4), random_complex(rng, 4)
    P = Rank2Perturbation.general(A, u, w, u, w)
    with pytest.raises(DegenerateDirections):
        limit_polynomial_q(P)
    with pytest.raises(DegenerateDirections):
        asymptotic_spectrum(P, 1.0, 2.0)
    report = asymptotic_spectrum(P, 1.0, 2.0, allow_degenerate=True)
    assert report.degenerate


def test_asymptotic_spectrum_rejects_zero_scale(rng):
    P = Rank2Perturbation.general(np.eye(2), *(random_complex(rng, 2) for _ in range(4)))
    with pytest.raises(InvalidInput):
        asymptotic_spectrum(P, 0.0, 1.0)


# ------------------------------------------------------------------------------------
# Entrelazado
# ------------------------------------------------------------------------------------

def test_interlacing_theorem_on_random_hermitian(rng):
    found = 0
    for _ in range(5000):
        if found == 500:
            break
        n = int(rng.integers(2, 7))
        A = random_hermitian(rng, n)
        u = random_unit(rng, n)
        s, t = rng.uniform(-3, 3, size=2)
        try:
            report = interlacing_condition(A, u, s, t)
        except HypothesisViolated:
            continue
        if not report.applies:
            continue
        found += 1
        eigs = eigenvalues_dense(perturbed_matrix(Rank2Perturbation.antidiagonal(A, u, s, t)))
        assert np.max(np.abs(eigs.imag)) < 1e-8
        assert verify_interlacing(np.linalg.eigvalsh(A), eigs)
    assert found == 500


def test_interlacing_condition_hypotheses(rng, diag4):
    A, u = diag4
    with pytest.raises(NotSelfAdjoint):
        interlacing_condition(random_complex(rng, 4, 4), u, 1.1, 1.2)
    with pytest.raises(HypothesisViolated):
        interlacing_condition(A, 2 * u, 1.1, 1.2)
    with pytest.raises(HypothesisViolated):
        interlacing_condition(A, u, 2.0, 2.0)
    with pytest.raises(HypothesisViolated):
        interlacing_condition(A, np.array([1.0, 0, 0, 0]), 1.1, 1.2)


def test_verify_interlacing_cases():
    assert verify_interlacing([1, 2, 3], [0.5, 1.5, 2.5])
    assert not verify_interlacing([1, 2, 3], [1.2, 1.5, 2.5])
    with pytest.raises(ComplexSpectrum):
        verify_interlacing([1, 2], [1.5, 2 + 1j])
    with pytest.raises(DegenerateSpectrum):
        verify_interlacing([1, 2], [1, 2.5])


def test_interlacing_curves_degenerate_hyperbola(diag4):
    A, u = diag4
    xs = np.linspace(0, 5, 501)
    curves = interlacing_curves(A, u, 0.0, 0.0, xs)
    assert_allclose(curves["rhs"], -1.0)
    assert np.isnan(curves["lhs"][100])
    assert np.isnan(curves["x0"])


def test_interlacing_curves_cross_at_eigenvalues(diag4):
    A, u = diag4
    s, t = 1.1, 1.2
    curves = interlacing_curves(A, u, s, t, np.array([-3.0, 0.0]))
    assert curves["x0"] == pytest.approx(-3.37, abs=0.01)
    eigs = np.sort(eigenvalues_dense(perturbed_matrix(Rank2Perturbation.antidiagonal(A, u, s, t))).real)
    at_eigs = interlacing_curves(A, u, s, t, eigs)
    assert_allclose(at_eigs["lhs"], at_eigs["rhs"], atol=1e-8)


# ------------------------------------------------------------------------------------
# Transición de fase
# ------------------------------------------------------------------------------------

def _jordan_blocks() -> np.ndarray:
    A = np.zeros((4, 4), dtype=complex)
    A[0, 0] = A[1, 1] = 1j
    A[2, 2] = A[3, 3] = -1j
    A[0, 1] = A[2, 3] = 1.0
    return A


@pytest.mark.parametrize("sign, verdict", [(-1.0, "leaves"), (1.0, "stays")])
def test_phase_transition_verdicts(sign, verdict):
    A = _jordan_blocks()
    e = np.eye(4)
    report = phase_transition_check(A, e[1], sign * e[0], e[3], e[2], 1j)
    assert report.verdict == verdict
    assert report.a_minus2 == pytest.approx(sign, abs=1e-6)
    assert report.direct_test_real
    assert not report.degenerate

    # los autovalores cerca de i se separan como i ± √(−s·a₋₂)
    s = 1e-6
    M = A - s * (np.outer(e[1], sign * e[0]) + np.outer(e[3], e[2]))
    near = [lam for lam in np.linalg.eigvals(M) if abs(lam - 1j) < 0.1]
    on_axis = all(abs(lam.real) < 1e-9 for lam in near)
    assert on_axis is (verdict == "stays")


def test_phase_transition_nilpotent_block_is_degenerate():
    # Q_uw = Q_gh = 1/z: cada estimación vale 2iε y la extrapolación da 0
    A = np.array([[0.0, 1.0], [0.0, 0.0]])
    e1 = np.array([1.0, 0.0])
    report = phase_transition_check(A, e1, e1, e1, e1, 0.0)
    assert report.verdict == "stays"
    assert report.degenerate
    assert abs(report.a_minus2) < 1e-12
    assert_allclose(report.estimates, [2j * e for e in report.eps_schedule], atol=1e-15)
    assert report.note is not None
    assert_allclose(report.jordan_pair, [0, 0], atol=1e-15)


def test_phase_transition_requires_jordan_chain():
    e = np.eye(4)
    A = np.diag([1j, 1j, -1j, -1j])
    with pytest.raises(NoJordanChain):
        phase_transition_check(A, e[1], e[0], e[3], e[2], 1j)
    with pytest.raises(NoJordanChain):
        phase_transition_check(_jordan_blocks(), e[1], e[0], e[3], e[2], 2j)
