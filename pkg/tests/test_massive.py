import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from pcs import massive as mv
from pcs import numgeom as ng
from pcs import spinors as sp
from pcs.integrate import MCConfig, QuadratureSpec

from conftest import seeds

Q = QuadratureSpec(32)


def random_label(rng, spread=0.3):
    return mv.MassiveLabel.from_momentum(rng.normal(scale=spread, size=3), rng.normal(size=3), rng.normal(scale=0.5, size=4),
                                         rng.uniform(-1, 1))


@pytest.fixture(scope="module")
def kappa03():
    return mv.massive_coefficients(0.3, Q).kappa


def test_label_validation():
    with pytest.raises(ValueError):
        mv.MassiveLabel(np.zeros(4), np.array([1.0, 0.5, 0, 0]), np.array([0, 0, 1.0]))
    with pytest.raises(ValueError):
        mv.MassiveLabel(np.zeros(4), np.array([1.0, 0, 0, 0]), np.array([0, 0, 2.0]))
    with pytest.raises(ValueError):
        mv.MassiveRep(r=-1)
    with pytest.raises(ValueError):
        mv.MassiveRep(sigma=0)


@given(seeds)
def test_chart_round_trip(seed):
    z = random_label(np.random.default_rng(seed))
    back = mv.MassiveLabel.from_coordinates(z.coordinates())
    assert np.allclose(back.I, z.I) and np.allclose(back.m, z.m) and np.allclose(back.X, z.X)


def test_stereographic_chart():
    assert np.allclose(mv.stereo_from_sphere([0, 0, 1.0]), 0)
    with pytest.raises(ValueError):
        mv.stereo_from_sphere([0, 0, -1.0])
    w = np.array([0.3, -0.7])
    h = 1e-6
    num = np.stack([(mv.sphere_from_stereo(w + h * e) - mv.sphere_from_stereo(w - h * e)) / (2 * h) for e in np.eye(2)], axis=1)
    assert np.allclose(mv.sphere_jacobian(w), num, atol=1e-8)


@given(seeds)
def test_spin_vector_is_unit_spacelike_and_orthogonal(seed):
    rng = np.random.default_rng(seed)
    z = random_label(rng, 1.0)
    assert sp.minkowski(z.J, z.J) == pytest.approx(-1.0)
    assert abs(sp.minkowski(z.I, z.J)) < 1e-10


@given(seeds)
def test_mu_lam_spinor_assignment(seed):
    z = random_label(np.random.default_rng(seed), 1.0)
    assert np.allclose(sp.null_from_spinor(z.mu), z.I + z.J)
    assert np.allclose(sp.null_from_spinor(z.lam), z.I - z.J)
    assert sp.eps_product(z.lam, z.mu) == pytest.approx(-1.0)


@pytest.mark.parametrize("sigma,r", [(0.1, 0), (0.1, 2), (0.5, 0), (0.5, 2)])
def test_norm_is_one(sigma, r, rng):
    rep = mv.MassiveRep(1.0, r, sigma)
    for _ in range(3):
        est = mv.norm(rep, random_label(rng), Q)
        assert abs(est.value - 1) < 1e-8


@given(seeds)
@settings(max_examples=20)
def test_overlap_hermitian_and_bounded(seed):
    rng = np.random.default_rng(seed)
    rep = mv.MassiveRep(1.0, 2, 0.3)
    z1, z2 = random_label(rng), random_label(rng)
    a = mv.overlap(rep, z1, z2, Q).value
    b = mv.overlap(rep, z2, z1, Q).value
    assert a == pytest.approx(np.conj(b), abs=1e-9)
    assert abs(a) <= 1 + 1e-9


@given(seeds)
@settings(max_examples=20)
def test_overlap_modulus_is_poincare_invariant(seed):
    rng = np.random.default_rng(seed)
    rep = mv.MassiveRep(1.0, 2, 0.3)
    z1, z2 = random_label(rng), random_label(rng)
    L = sp.sl2c_to_lorentz(sp.random_sl2c(rng, 0.4))
    C = rng.normal(size=4)
    ref = abs(mv.overlap(rep, z1, z2, Q).value)
    moved = abs(mv.overlap(rep, mv.transform_label(z1, L, C), mv.transform_label(z2, L, C), Q).value)
    assert moved == pytest.approx(ref, abs=1e-6)


def test_transform_label_rejects_improper():
    z = mv.MassiveLabel.from_momentum([0, 0, 0])
    with pytest.raises(ValueError):
        mv.transform_label(z, np.diag([1.0, -1, 1, 1]))


def test_group_action_reproduces_labelled_state(rng):
    rep = mv.MassiveRep(1.0, 2, 0.3)
    z = random_label(rng)
    U = mv.group_action(rep, z.alpha, z.X, mv.reference_wavefunction(rep))
    xi = mv.on_shell(rng.normal(scale=0.3, size=(6, 3)))
    assert np.allclose(U(xi), mv.wavefunction(rep, z, xi), atol=1e-12)


@pytest.mark.parametrize("r", [0, 1, 3])
def test_gauge_rotation_is_a_phase(r, rng):
    rep = mv.MassiveRep(1.0, r, 0.3)
    z = random_label(rng)
    w = mv.overlap(rep, z, z.shifted(mv.tangent(dgauge=1.0), 0.4), Q).value
    assert w == pytest.approx(np.exp(1j * r * 0.4), abs=1e-10)


def test_coefficients(kappa03):
    c = mv.massive_coefficients(0.1, Q)
    assert c.omega == pytest.approx(mv.omega_closed_form(0.1), rel=1e-10)
    assert abs(c.omega - 0.5) < 0.01
    assert c.K_numeric == pytest.approx(c.K_numeric.T)
    # spatial momentum variance of the reference state is sigma^2/2
    assert c.K_numeric[1, 1] == pytest.approx(0.1**2 / 2, rel=1e-9)
    assert kappa03 > 1


def test_kappa_small_width_expansion():
    for s in (0.02, 0.05):
        k = mv.massive_coefficients(s, Q).kappa
        assert (k - 1) / s**2 == pytest.approx(0.75, rel=0.02)


def test_kappa_quadrature_matches_mc():
    q = mv.massive_coefficients(0.3, Q)
    m = mv.kappa_monte_carlo(0.3, MCConfig(seed=11, samples=400_000))
    assert abs(q.kappa - m.value) < 3 * np.hypot(m.error, q.errors["kappa"])


@given(seeds)
@settings(max_examples=10)
def test_connection_matches_overlap_oracle(seed):
    rng = np.random.default_rng(seed)
    rep = mv.MassiveRep(1.0, 2, 0.3)
    z = random_label(rng)
    v = rng.normal(size=mv.TANGENT_DIM)
    v /= np.linalg.norm(v)
    fd = ng.connection_numeric(rep, z, v, Q)
    assert fd.value == pytest.approx(mv.connection_analytic(rep, z, v), abs=1e-4)


@given(seeds)
@settings(max_examples=15)
def test_symplectic_is_curl_of_connection_and_degenerate(seed):
    rng = np.random.default_rng(seed)
    rep = mv.MassiveRep(1.0, 2, 0.3)
    z = random_label(rng)
    v, w = rng.normal(size=10), rng.normal(size=10)
    A = lambda zz, dq: mv.connection_analytic(rep, zz, dq, 1.1)
    assert ng.analytic_curl(A, z, v, w) == pytest.approx(mv.symplectic_analytic(rep, z, v, w, 1.1), rel=1e-6, abs=1e-6)
    assert abs(mv.symplectic_analytic(rep, z, mv.degenerate_direction(z), w, 1.1)) < 1e-12
    assert mv.symplectic_analytic(rep, z, v, w, 1.1) == pytest.approx(-mv.symplectic_analytic(rep, z, w, v, 1.1))


def test_symplectic_matches_plaquette_oracle(rng, kappa03):
    rep = mv.MassiveRep(1.0, 2, 0.3)
    z = random_label(rng)
    v, w = mv.tangent(dX=[0, 1, 0, 0]), mv.tangent(dI=[1, 0, 0])
    fd = ng.symplectic_numeric(rep, z, v, w, Q)
    assert fd.value == pytest.approx(mv.symplectic_analytic(rep, z, v, w, kappa03), abs=1e-6)
    s = mv.spin_tangent(z, [1.0, 0, 0])
    t = mv.spin_tangent(z, [0, 1.0, 0])
    fd = ng.symplectic_numeric(rep, z, s, t, Q)
    assert fd.value == pytest.approx(mv.symplectic_analytic(rep, z, s, t, kappa03), abs=1e-6)


def test_translation_metric_is_momentum_variance():
    rep = mv.MassiveRep(1.0, 0, 0.2)
    c = mv.massive_coefficients(0.2, Q)
    z = mv.MassiveLabel.from_momentum([0, 0, 0])
    for dX in ([0, 1.0, 0, 0], [1.0, 0, 0, 0], [0.5, 0.2, -0.3, 0.1]):
        fd = ng.metric_numeric(rep, z, mv.tangent(dX=dX), quad=Q)
        assert fd.value == pytest.approx(np.asarray(dX) @ c.K_numeric @ np.asarray(dX), rel=1e-6)


def test_spin_metric_rest_frame():
    # leading order in sigma: 1 - ((1 + cos t)/2)^r gives (r/4) |dm|^2
    rep = mv.MassiveRep(1.0, 3, 0.02)
    z = mv.MassiveLabel.from_momentum([0, 0, 0])
    v = mv.spin_tangent(z, [1.0, 0, 0])
    fd = ng.metric_numeric(rep, z, v, quad=Q)
    dm = mv.sphere_jacobian(mv.stereo_from_sphere(z.m)) @ v[7:9]
    assert fd.value == pytest.approx(rep.r / 4 * dm @ dm, rel=2e-3)


def test_metric_vanishes_on_gauge(rng):
    rep = mv.MassiveRep(1.0, 2, 0.3)
    fd = ng.metric_numeric(rep, random_label(rng), mv.tangent(dgauge=1.0), quad=Q)
    assert abs(fd.value) < 1e-8


def test_resolution_ratio_scalar():
    est = mv.resolution_check(mv.MassiveRep(1.0, 0, 0.3), mv.SurfaceLabel(), sp.REFERENCE_TIME, MCConfig(seed=5, samples=200_000))
    assert abs(est.value - 1) < max(0.02, 3 * est.error)


def test_quantize_constant_is_identity(rng):
    rep = mv.MassiveRep(1.0, 1, 0.3)
    z = random_label(rng, 0.2)
    est = mv.quantize(rep, mv.SurfaceLabel(), lambda x, p, m: np.ones(len(x)), z, z, MCConfig(seed=2, samples=1500))
    assert abs(est.value - 1) < 4 * est.error + 0.02
