import numpy as np
import pytest
from numpy.testing import assert_allclose

from app.core.errors import HypothesisViolated, InvalidParams
from app.models.meixner import SRange
from app.services import measures
from app.services.measures import JacobiCauchy, measure_cauchy
from app.services.meixner import (
    WIGNER,
    classify_atoms,
    discriminant_at,
    discriminant_polynomial,
    marchenko_pastur,
    meixner_cauchy,
    meixner_density,
    meixner_params,
    meixner_total_mass,
    phase_transition_0to1,
    phase_transition_0to2,
    phase_transition_1to2,
    predicted_atom_count,
    u_transform_params,
    u_transform_params_inverse,
)


# ------------------------------------------------------------------------------------
# Parámetros y densidad
# ------------------------------------------------------------------------------------

def test_named_instances():
    assert WIGNER.as_tuple() == (0.0, 0.0, 1.0, 1.0)
    assert marchenko_pastur(2.0, 0.5).as_tuple() == (1.0, 3.0, 2.0, 1.0)
    with pytest.raises(InvalidParams):
        meixner_params(0.0, 0.0, -1.0, 1.0)


def test_wigner_density_is_semicircle():
    xs = np.linspace(-2.5, 2.5, 101)
    assert_allclose(meixner_density(WIGNER, xs), measures.semicircle_density(xs), atol=1e-14)
    assert meixner_density(WIGNER, 3.0) == 0.0


def test_density_requires_positive_variance():
    with pytest.raises(InvalidParams):
        meixner_density(meixner_params(0.0, 0.0, 0.0, 1.0), 0.0)


def test_cauchy_transform_matches_jacobi_model():
    u = meixner_params(0.3, -0.2, 1.0, 0.5)
    G = meixner_cauchy(u)
    J = JacobiCauchy(G.jacobi, 500)
    for z in (0.4 + 0.7j, -1.5 + 0.3j, 2.0 + 2.0j):
        assert abs(G(z) - J(z)) < 1e-8
    assert G.first_moment == pytest.approx(0.3)


@pytest.mark.parametrize(
    "params",
    [(0.3, 0.0, 1.0, 1.0), (2.0, 0.0, 1.0, 1.0), (0.0, 0.0, 1.0, 3.0), (1.5, 0.0, 1.0, 2.0), (0.5, 0.0, 1.0, 0.5)],
)
def test_total_mass_is_one(params):
    assert meixner_total_mass(meixner_params(*params)) == pytest.approx(1.0, abs=1e-6)


# ------------------------------------------------------------------------------------
# Clasificación de átomos
# ------------------------------------------------------------------------------------

def test_wigner_has_no_atoms():
    cls = classify_atoms(WIGNER)
    assert cls.atom_count == 0
    assert cls.atoms == []


def test_single_atom_rule_and_virtual_location():
    # x₀ = 1 + 1/(1 − 0) = 2 cae en el borde del soporte: no es polo de G
    cls = classify_atoms(meixner_params(1.0, 0.0, 1.0, 1.0))
    assert cls.atom_count == 1
    assert cls.atom_locations == [pytest.approx(2.0)]
    assert cls.atoms[0].virtual


def test_single_physical_atom_mass():
    cls = classify_atoms(meixner_params(2.0, 0.0, 1.0, 1.0))
    assert cls.atom_locations == [pytest.approx(2.5)]
    atom = cls.atoms[0]
    assert not atom.virtual
    assert atom.mass == pytest.approx(0.75)


def test_two_atoms_at_roots_of_f():
    cls = classify_atoms(meixner_params(0.0, 0.0, 1.0, 3.0))
    assert cls.atom_count == 2
    assert cls.discriminant > 0
    assert_allclose(cls.atom_locations, [-3 / np.sqrt(2), 3 / np.sqrt(2)])
    assert_allclose([a.mass for a in cls.atoms], [0.25, 0.25])


def test_zero_c_is_delta():
    cls = classify_atoms(meixner_params(0.7, 0.0, 1.0, 0.0))
    assert cls.delta
    assert cls.atom_locations == [0.7]
    assert cls.atoms[0].mass == 1.0


# ------------------------------------------------------------------------------------
# Mapa de parámetros
# ------------------------------------------------------------------------------------

def test_u_transform_params():
    u = meixner_params(0.3, -0.2, 1.0, 0.5)
    assert u_transform_params(u, 0.0, 0.0) == u
    assert u_transform_params(WIGNER, 0.5, 0.25).as_tuple() == (0.0, 0.0, 1.0, 0.375)
    with pytest.raises(InvalidParams):
        u_transform_params(u, 2.0, 0.0)


def test_u_transform_params_degenerate_is_delta():
    u = u_transform_params(meixner_params(1.0, 0.0, 1.0, 1.0), 1.0, 0.5)
    assert u.c == 0.0
    assert classify_atoms(u).delta


def test_u_transform_params_inverse_round_trip():
    u = meixner_params(0.3, -0.2, 1.0, 0.5)
    for s in (-1.0, 0.3, 2.5):
        back = u_transform_params_inverse(u_transform_params(u, s), s)
        assert_allclose(back.as_tuple(), u.as_tuple(), atol=1e-14)
    with pytest.raises(InvalidParams):
        u_transform_params_inverse(u, 0.5)
    with pytest.raises(InvalidParams):
        u_transform_params_inverse(u, 1.0)


def test_wigner_u_transform_density_closed_form():
    tau = 0.36
    u = u_transform_params(WIGNER, 0.4)
    assert u.c == pytest.approx(tau)
    xs = np.linspace(-1.9, 1.9, 41)
    expected = tau * np.sqrt(4 - xs**2) / ((1 - tau) * xs**2 + tau**2) / (2 * np.pi)
    assert_allclose(meixner_density(u, xs), expected, rtol=1e-12)


def test_discriminant_polynomial_agrees_with_transformed_parameters(rng):
    for _ in range(20):
        u = meixner_params(rng.normal(), rng.normal(), rng.uniform(0.1, 2), rng.uniform(0.1, 2))
        s = float(rng.uniform(-3, 3))
        assert np.polyval(discriminant_polynomial(u), s) == pytest.approx(discriminant_at(u, s), abs=1e-10)
        transformed = classify_atoms(u_transform_params(u, s))
        assert np.sign(transformed.discriminant) == np.sign(discriminant_at(u, s))


# ------------------------------------------------------------------------------------
# Transiciones de fase
# ------------------------------------------------------------------------------------

def test_one_to_two_inside_conic():
    u = meixner_params(1.0, 2.0, 0.5, 1.0)
    report = phase_transition_1to2(u)
    assert report.case == "inside"
    assert report.details["conic_value"] > 0
    assert report.details["phi_discriminant"] < 0
    for s in (-1.0, 0.4, 3.0):
        assert report.range.contains(s)
        assert classify_atoms(u_transform_params(u, s)).atom_count == 2
    assert not report.range.contains(0.0)


def test_one_to_two_outside_conic():
    u = meixner_params(1.0, 0.0, 1.0, 1.0)
    report = phase_transition_1to2(u)
    assert report.case == "outside"
    assert report.details["conic_value"] == pytest.approx(-7.0)
    s1, s2 = report.details["s1"], report.details["s2"]
    assert s1 < s2
    assert discriminant_at(u, s1) == pytest.approx(0.0, abs=1e-8)
    assert discriminant_at(u, s2) == pytest.approx(0.0, abs=1e-8)
    assert not report.range.contains((s1 + s2) / 2)
    assert classify_atoms(u_transform_params(u, (s1 + s2) / 2)).atom_count == 0


def test_one_to_two_zero_gamma():
    report = phase_transition_1to2(meixner_params(0.0, 1.0, 1.0, 1.0))
    assert "P_u" not in report.details
    assert report.range.contains(-1.0)
    assert report.range.contains(3.0)


def test_one_to_two_requires_single_atom():
    with pytest.raises(HypothesisViolated):
        phase_transition_1to2(WIGNER)


def test_zero_to_one_wigner():
    report = phase_transition_0to1(WIGNER)
    assert report.case == "1a"
    assert report.range.points == [1.0]
    assert report.note
    assert classify_atoms(u_transform_params(WIGNER, 2.0)).atom_count == 0


def test_zero_to_one_shifted_wigner():
    u = meixner_params(1.0, 1.0, 1.0, 1.0)
    report = phase_transition_0to1(u)
    assert report.range.points == [1.0, 2.0]
    assert classify_atoms(u_transform_params(u, 2.0)).atom_count == 1
    assert predicted_atom_count(u, 2.0) == (1, False)


def test_zero_to_one_envelope():
    report = phase_transition_0to1(meixner_params(1.0, 0.0, 1.0, 0.5))
    assert report.case == "1b"
    assert report.details["r2"] == pytest.approx(0.25)
    lo, hi = report.details["envelope"]
    assert lo == pytest.approx(1 - 0.75**-0.5)
    assert hi == pytest.approx(1 + 0.75**-0.5)
    assert 1.0 in report.range.points
    assert len(report.range.points) == 3


def test_zero_to_one_requires_no_atoms():
    with pytest.raises(HypothesisViolated):
        phase_transition_0to1(meixner_params(0.0, 0.0, 1.0, 3.0))


def test_zero_to_two_case_2a():
    report = phase_transition_0to2(meixner_params(1.0, 1.0, 1.0, 1.0))
    assert report.case == "2a"
    assert report.details["threshold"] == pytest.approx(1.0)
    assert report.range.contains(1.5)
    assert report.range.contains(-0.5)
    assert not report.range.contains(2.0)
    assert not report.range.contains(0.5)


def test_zero_to_two_case_2b():
    u = meixner_params(0.5, 0.0, 1.0, 0.5)
    report = phase_transition_0to2(u)
    assert report.case == "2b"
    s1, s2 = report.details["s1"], report.details["s2"]
    assert s1 < 0 < s2
    assert discriminant_at(u, s1) == pytest.approx(0.0, abs=1e-8)
    assert discriminant_at(u, s2) == pytest.approx(0.0, abs=1e-8)
    assert not report.range.contains(0.0)


def test_zero_to_two_equality_cases():
    r = np.sqrt(2.0)
    gamma = -1 / r
    report = phase_transition_0to2(meixner_params(gamma, gamma - r, 1.0, 0.5))
    assert report.case == "2c"
    assert report.range.contains(0.3)
    assert not report.range.contains(0.0)

    report = phase_transition_0to2(meixner_params(1.0, 1.0 - r, 1.0, 0.5))
    assert report.case == "2d"
    assert report.details["s2"] == pytest.approx((1 + r) / 1.5)


def test_consistency_of_predicted_counts():
    rng = np.random.default_rng(7)
    params = []
    for _ in range(17):
        g = rng.normal()
        params.append(meixner_params(g, g, rng.uniform(0.3, 2.0), 1.0))
    for _ in range(17):
        b, c = rng.uniform(0.3, 2.0), rng.uniform(0.1, 0.9)
        d = rng.uniform(-0.9, 0.9) * np.sqrt(4 * b * (1 - c))
        a = rng.normal()
        params.append(meixner_params(a + d, a, b, c))
    for _ in range(16):
        a, d = rng.normal(), rng.choice([-1, 1]) * rng.uniform(0.2, 2.0)
        params.append(meixner_params(a + d, a, rng.uniform(0.3, 2.0), 1.0))

    total = flagged_count = 0
    for u in params:
        for s in np.linspace(-3, 3, 50):
            predicted, flagged = predicted_atom_count(u, float(s))
            observed = classify_atoms(u_transform_params(u, float(s))).atom_count
            total += 1
            flagged_count += flagged
            if not flagged:
                assert predicted == observed, (u.as_tuple(), s)
    assert total == 2500
    assert flagged_count < 0.01 * total


def test_predicted_count_rejects_two_atoms():
    with pytest.raises(HypothesisViolated):
        predicted_atom_count(meixner_params(0.0, 0.0, 1.0, 3.0), 0.5)


def test_class_is_not_closed_under_w_transform():
    # Meixner: √(4−x²)/(2π·densidad) es cuadrático en x; para W^{½,½}(Wigner) es cúbico
    xs = np.linspace(-1.8, 1.8, 61)
    ratio = np.sqrt(4 - xs**2) / (2 * np.pi * measures.wigner_w_density(xs, 0.5, 0.5))
    cubic = np.polyfit(xs, ratio, 3)
    assert cubic[0] == pytest.approx(0.5, abs=1e-8)
    quadratic = np.polyfit(xs, ratio, 2)
    assert np.max(np.abs(np.polyval(quadratic, xs) - ratio)) > 0.05

    u = meixner_params(0.3, 0.0, 1.0, 0.5)
    ratio = np.sqrt(4 - xs**2) / (2 * np.pi * meixner_density(u, xs))
    quadratic = np.polyfit(xs, ratio, 2)
    assert np.max(np.abs(np.polyval(quadratic, xs) - ratio)) < 1e-10


def test_srange_describe():
    srange = SRange(intervals=[(-np.inf, 0.0)], points=[1.0], excluded=[-1.0])
    assert srange.contains(1.0)
    assert not srange.contains(-1.0)
    assert srange.contains(-2.0)
    assert "∖" in srange.describe()
