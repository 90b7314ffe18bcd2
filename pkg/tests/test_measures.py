import numpy as np
import pytest
from numpy.testing import assert_allclose
from pydantic import ValidationError

from app.core.errors import DenominatorVanishes, InvalidParams, PoleHit, UnsupportedRegion
from app.models.measures import Atom, JacobiData, SpectralMeasure, TransformParams
from app.services import measures
from app.services.measures import (
    JacobiCauchy,
    apply_transform,
    cauchy_eval,
    jacobi_deform_antidiagonal,
    jacobi_deform_diagonal,
    jacobi_matrix,
    jacobi_resolvent,
    measure_cauchy,
    semicircle_cauchy,
    stieltjes_invert,
    t_transform,
    u_transform,
    w_transform,
)


def _upper_half_plane(rng, k=20):
    return rng.uniform(-3, 3, k) + 1j * rng.uniform(0.05, 3, k)


def _bases():
    return [
        measures.wigner(),
        measures.bernoulli(),
        measures.delta(0.7),
        measures.meixner(0.3, -0.2, 1.0, 0.5),
        measures.meixner(1.0, 0.5, 2.0, 1.5),
    ]


# ------------------------------------------------------------------------------------
# Evaluadores
# ------------------------------------------------------------------------------------

def test_named_measures_are_herglotz(rng):
    zs = _upper_half_plane(rng)
    for mu in _bases():
        values = measure_cauchy(mu).evaluate(zs)
        assert np.all(values.imag < 0), mu.name
        # G(z) ~ 1/z
        big = measure_cauchy(mu)(1e6j)
        assert big * 1e6j == pytest.approx(1.0, abs=1e-5)


@pytest.mark.parametrize("z", [1e6j, -1e6 + 1j, 1e8 + 1e8j])
def test_closed_forms_decay_like_one_over_z_far_away(z):
    assert semicircle_cauchy(np.array([z]), 1.0)[0] * z == pytest.approx(1.0, abs=1e-10)
    for mu in (measures.wigner(), measures.meixner(0.3, -0.2, 1.0, 0.5)):
        assert measure_cauchy(mu)(z) * z == pytest.approx(1.0, abs=1e-5)


def test_wigner_closed_form_matches_jacobi_fraction(rng):
    G = measure_cauchy(measures.wigner())
    J = JacobiCauchy(JacobiData(a=[0.0], b=[1.0]), N=500)
    for z in _upper_half_plane(rng, 10) + 0.5j:
        assert abs(G(z) - J(z)) < 1e-10


def test_bernoulli_and_delta_closed_forms():
    z = 0.4 + 0.9j
    assert measure_cauchy(measures.bernoulli())(z) == pytest.approx(z / (z * z - 1))
    assert measure_cauchy(measures.delta(2.0))(z) == pytest.approx(1 / (z - 2.0))


def test_cauchy_eval_regions():
    G = measure_cauchy(measures.wigner())
    assert cauchy_eval(G, 3.0) == pytest.approx((3 - np.sqrt(5)) / 2)
    with pytest.raises(UnsupportedRegion):
        cauchy_eval(G, 1 - 1j)
    with pytest.raises(UnsupportedRegion):
        cauchy_eval(measures.wigner(), 0.5)


def test_atomic_measure_mass_is_validated():
    with pytest.raises(ValidationError):
        SpectralMeasure(name="bad", atoms=[Atom(location=0.0, mass=0.4)])


def test_total_mass_of_named_measures():
    assert measures.total_mass(measures.wigner()) == pytest.approx(1.0, abs=1e-8)
    assert measures.total_mass(measures.bernoulli()) == pytest.approx(1.0)


def test_pole_hit_on_atom():
    with pytest.raises(PoleHit):
        measure_cauchy(measures.delta(1.0))(1.0)


# ------------------------------------------------------------------------------------
# Transformaciones
# ------------------------------------------------------------------------------------

def test_defining_equations(rng):
    zs = _upper_half_plane(rng)
    for mu in _bases():
        G = measure_cauchy(mu)
        g = G.evaluate(zs)
        m = G.first_moment

        U = u_transform(G, 0.3, 1.7)
        expected = 1.7 / g + (1 - 1.7) * zs + (1.7 - 0.3) * m
        assert np.max(np.abs(1 / U.evaluate(zs) - expected)) < 1e-10

        T = t_transform(G, 2.5)
        assert np.max(np.abs(1 / T.evaluate(zs) - (2.5 / g + (1 - 2.5) * zs))) < 1e-10

        s, t = 0.4, -0.6
        W = w_transform(G, s, t)
        den = (1 - t * m + t * zs) * g - t
        expected = s + (1 + t * (zs * zs * g - m - zs)) / den
        assert np.max(np.abs(1 / W.evaluate(zs) - expected)) < 1e-10


def test_identity_parameters(rng):
    G = measure_cauchy(measures.wigner())
    zs = _upper_half_plane(rng)
    assert_allclose(u_transform(G, 1, 1).evaluate(zs), G.evaluate(zs), atol=1e-14)
    assert_allclose(t_transform(G, 1).evaluate(zs), G.evaluate(zs), atol=1e-14)
    assert_allclose(w_transform(G, 0, 0).evaluate(zs), G.evaluate(zs), atol=1e-14)


def test_t_transform_is_u_with_equal_parameters(rng):
    G = measure_cauchy(measures.meixner(0.3, -0.2, 1.0, 0.5))
    zs = _upper_half_plane(rng)
    assert_allclose(t_transform(G, 1.8).evaluate(zs), u_transform(G, 1.8, 1.8).evaluate(zs), atol=1e-12)


def test_u_transform_degenerate_and_invalid():
    G = measure_cauchy(measures.delta(2.0))
    D = u_transform(G, 0.5, 0.0)
    assert D(1j) == pytest.approx(1 / (1j - 1.0))
    assert D.first_moment == pytest.approx(1.0)
    with pytest.raises(InvalidParams):
        u_transform(G, 1.0, -0.5)


def test_w_transform_first_moment():
    G = measure_cauchy(measures.delta(2.0))
    W = w_transform(G, 0.5, 0.25)
    assert W.first_moment == pytest.approx(2 * (1 - 0.5) - 0.5)


def test_w_transform_denominator_vanishes():
    # δ₀ con t = 0: 1/G_W(z) = s + z, nula en z = −s
    W = w_transform(measure_cauchy(measures.delta(0.0)), -1.0, 0.0)
    with pytest.raises(DenominatorVanishes):
        W(1.0)


def test_transform_params_model():
    params = TransformParams.from_deformation(0.5, 0.5)
    assert (params.p, params.q) == (0.0, 0.25)
    with pytest.raises(ValidationError):
        TransformParams(kind="U", p=1.0, q=-1.0)
    with pytest.raises(ValidationError):
        TransformParams(kind="W", s=1.0)


def test_apply_transform_dispatches_on_kind(rng):
    G = measure_cauchy(measures.wigner())
    zs = _upper_half_plane(rng)
    via_params = apply_transform(G, TransformParams.from_deformation(0.5, 0.5))
    assert_allclose(via_params.evaluate(zs), u_transform(G, 0.0, 0.25).evaluate(zs), atol=1e-14)
    assert_allclose(
        apply_transform(G, TransformParams(kind="T", tau=2.0)).evaluate(zs), t_transform(G, 2.0).evaluate(zs), atol=1e-14
    )
    assert_allclose(
        apply_transform(G, TransformParams(kind="W", s=0.4, t=-0.6)).evaluate(zs),
        w_transform(G, 0.4, -0.6).evaluate(zs),
        atol=1e-14,
    )


# ------------------------------------------------------------------------------------
# Modelos de operador
# ------------------------------------------------------------------------------------

@pytest.mark.parametrize("s, t", [(0.5, 0.5), (1.5, 1.2), (-1.0, -1.0)])
def test_antidiagonal_jacobi_model(s, t):
    data = JacobiData(a=[0.0], b=[1.0])
    U = u_transform(measure_cauchy(measures.wigner()), 1 - s - t, (1 - s) * (1 - t))
    zs = [0.3 + 0.5j, -1.2 + 0.8j, 2.5 + 1.0j]
    errors = []
    for N in (100, 250, 500):
        T = jacobi_deform_antidiagonal(data, s, t, N)
        errors.append(max(abs(jacobi_resolvent(T, z) - U(z)) for z in zs))
    assert errors[-1] < 1e-8
    assert errors[1] <= errors[0] + 1e-14
    assert errors[2] <= errors[1] + 1e-14


@pytest.mark.parametrize("s, t", [(0.5, 0.5), (-0.3, 0.8)])
def test_diagonal_jacobi_model(s, t):
    data = JacobiData(a=[0.0], b=[1.0])
    W = w_transform(measure_cauchy(measures.wigner()), s, t)
    T = jacobi_deform_diagonal(data, s, t, 500)
    assert T.symmetric
    for z in (0.3 + 0.5j, -1.2 + 0.8j, 2.5 + 1.0j):
        assert abs(jacobi_resolvent(T, z) - W(z)) < 1e-8


def test_jacobi_matrix_and_resolvent_pole():
    T = jacobi_matrix(JacobiData(a=[1.0], b=[0.0]), 3)
    assert_allclose(T.to_dense(), np.eye(3))
    with pytest.raises(PoleHit):
        jacobi_resolvent(T, 1.0)


def test_transformed_jacobi_data_follows_corner_map():
    U = u_transform(measure_cauchy(measures.wigner()), 0.2, 4.0)
    a, b = U.jacobi.coefficients(4)
    assert_allclose(b, [2.0, 1.0, 1.0])
    assert_allclose(a, 0.0, atol=1e-15)
    assert abs(JacobiCauchy(U.jacobi, 500)(0.4 + 0.7j) - U(0.4 + 0.7j)) < 1e-8


# ------------------------------------------------------------------------------------
# Inversión de Stieltjes
# ------------------------------------------------------------------------------------

def test_stieltjes_identity_transform_recovers_semicircle():
    xs = np.linspace(-3, 3, 500)
    G = t_transform(measure_cauchy(measures.wigner()), 1.0)
    result = stieltjes_invert(G, xs)
    ok = np.isfinite(result.density)
    assert ok.sum() > 450
    assert np.max(np.abs(result.density[ok] - measures.semicircle_density(xs[ok]))) < 1e-4
    assert result.atoms == []


def test_stieltjes_u_transform_without_atoms():
    xs = np.linspace(-3, 3, 500)
    G = u_transform(measure_cauchy(measures.wigner()), 0.0, 0.25)
    result = stieltjes_invert(G, xs)
    ok = np.isfinite(result.density)
    assert np.max(np.abs(result.density[ok] - measures.wigner_u_density(xs[ok], 0.5, 0.5))) < 1e-4
    assert result.atoms == []


def test_stieltjes_u_transform_with_atoms():
    s = t = -1.0
    tau = (1 - s) * (1 - t)
    xs = np.linspace(-3, 3, 4001)
    G = u_transform(measure_cauchy(measures.wigner()), 1 - s - t, tau)
    result = stieltjes_invert(G, xs)

    expected = measures.wigner_u_atoms(s, t)
    assert len(result.atoms) == 2
    for found, ref in zip(sorted(result.atoms, key=lambda a: a.location), expected):
        assert found.location == pytest.approx(ref.location, abs=1e-6)
        assert found.mass == pytest.approx(ref.mass, abs=1e-4)
    assert expected[1].location == pytest.approx(tau / np.sqrt(tau - 1))
    assert expected[1].mass == pytest.approx(1 / 3)

    ok = np.isfinite(result.density)
    assert np.max(np.abs(result.density[ok] - measures.wigner_u_density(xs[ok], s, t))) < 1e-4
    assert result.total_mass == pytest.approx(1.0, abs=5e-3)

    mu = SpectralMeasure(
        name="closed",
        atoms=expected,
        support=(-2.0, 2.0),
        density=lambda x: measures.wigner_u_density(x, s, t),
    )
    assert measures.total_mass(mu) == pytest.approx(1.0, abs=1e-4)


def test_stieltjes_w_transform_matches_closed_form():
    xs = np.linspace(-3, 3, 500)
    G = w_transform(measure_cauchy(measures.wigner()), 0.5, 0.5)
    result = stieltjes_invert(G, xs)
    ok = np.isfinite(result.density) & (np.abs(xs) < 2)
    assert np.max(np.abs(result.density[ok] - measures.wigner_w_density(xs[ok], 0.5, 0.5))) < 1e-4


def test_stieltjes_finds_bernoulli_atoms():
    xs = np.linspace(-2, 2, 401)
    result = stieltjes_invert(measure_cauchy(measures.bernoulli()), xs)
    assert [round(a.location, 6) for a in result.atoms] == [-1.0, 1.0]
    assert_allclose([a.mass for a in result.atoms], [0.5, 0.5], atol=1e-4)
    assert result.masked.any()


def test_wigner_u_atoms_threshold():
    assert measures.wigner_u_atoms(0.5, 0.5) == []
    assert measures.wigner_u_atoms(-0.2, -0.2) == []
