"""Invariant suite and erratum ledger behind ``pcs selftest``.

Gating records carry ``passed=True/False``.  Records where a printed closed
form disagrees with an oracle are informational (``passed=None``): they
document the size of the disagreement without failing the run.
"""
from __future__ import annotations

import numpy as np

from . import massive as mv
from . import massless as ml
from . import numgeom as ng
from . import spinors as sp
from . import su2
from .integrate import MCConfig, QuadratureSpec, SphereUniform, GaussianProposal, mc_integrate
from .io import ResultRecord


def _rec(out, name, value, stderr, method, tol=None, ref="", params=None, info=False, passed=None):
    if passed is None and not info and tol is not None:
        passed = bool(abs(value) <= tol)
    out.append(ResultRecord(name, float(value), float(stderr), method, params or {}, ref, None if info else passed))


def _algebra(out, rng, n=200):
    h = two = boost = eta = 0.0
    for _ in range(n):
        a, b = sp.random_sl2c(rng), sp.random_sl2c(rng)
        La, Lb = sp.sl2c_to_lorentz(a), sp.sl2c_to_lorentz(b)
        h = max(h, np.abs(sp.sl2c_to_lorentz(a @ b) - La @ Lb).max() / max(1.0, np.abs(La @ Lb).max()))
        two = max(two, np.abs(sp.sl2c_to_lorentz(-a) - La).max())
        eta = max(eta, np.abs(La.T @ sp.ETA @ La - sp.ETA).max() / max(1.0, np.abs(La).max() ** 2))
        I = sp.random_unit_timelike(rng)
        boost = max(boost, np.abs(sp.sl2c_to_lorentz(sp.boost_spinor_matrix(I)) @ sp.REFERENCE_TIME - I).max())
    _rec(out, "spinor.homomorphism", h, 0, "analytic", 1e-11, "spinor_core")
    _rec(out, "spinor.two_to_one", two, 0, "analytic", 1e-11, "spinor_core")
    _rec(out, "spinor.eta_preserved", eta, 0, "analytic", 1e-11, "spinor_core")
    _rec(out, "spinor.boost_maps_n_to_I", boost, 0, "analytic", 1e-11, "spinor_core")


def _tetrads(out, rng, n=100):
    comp = orient = ortho = 0.0
    for _ in range(n):
        a = sp.random_sl2c(rng)
        t = sp.tetrad_from_spinors(a[:, 0], a[:, 1])
        comp = max(comp, t.completeness_residual())
        orient = max(orient, t.orientation_residual())
        ortho = max(ortho, t.orthonormality_residual())
    _rec(out, "tetrad.completeness", comp, 0, "analytic", 1e-11, "spinor_core")
    _rec(out, "tetrad.orientation", orient, 0, "analytic", 1e-11, "spinor_core")
    _rec(out, "tetrad.orthonormality", ortho, 0, "analytic", 1e-11, "spinor_core")


def _reps(out, rng, n=60):
    hom = law = hw = 0.0
    for k in range(n):
        r = k % 7
        a, b = sp.random_sl2c(rng, 0.5), sp.random_sl2c(rng, 0.5)
        D = su2.rep_matrix(a @ b, r)
        hom = max(hom, np.abs(D - su2.rep_matrix(a, r) @ su2.rep_matrix(b, r)).max() / max(1.0, np.abs(D).max()))
        v1, v2 = rng.normal(size=3), rng.normal(size=3)
        m1, m2 = v1 / np.linalg.norm(v1), v2 / np.linalg.norm(v2)
        brute = np.vdot(su2.su2_coherent(m1, r), su2.su2_coherent(m2, r))
        law = max(law, abs(brute - su2.su2_overlap(m1, m2, r)), abs(abs(brute) ** 2 - ((1 + m1 @ m2) / 2) ** r))
        beta = sp.random_sl2c(rng, 0.5)
        hw = max(hw, abs(su2.rep_matrix(beta, r)[0, 0] - beta[0, 0] ** r) / max(1.0, abs(beta[0, 0]) ** r))
    _rec(out, "su2.homomorphism", hom, 0, "analytic", 1e-10, "su2_reps")
    _rec(out, "su2.overlap_law", law, 0, "analytic", 1e-10, "su2_reps")
    _rec(out, "su2.highest_weight", hw, 0, "analytic", 1e-10, "su2_reps")


def _massive(out, rng, seed):
    rep = mv.MassiveRep(1.0, 2, 0.3)
    quad = QuadratureSpec(32)
    coeffs = mv.massive_coefficients(rep.sigma, QuadratureSpec(32))
    kappa = coeffs.kappa
    labels = [mv.MassiveLabel.from_momentum(rng.normal(scale=0.3, size=3), rng.normal(size=3), rng.normal(scale=0.5, size=4))
              for _ in range(3)]
    err = max(abs(mv.norm(rep, z, quad).value - 1) for z in labels)
    _rec(out, "massive.norm", err, 0, "quadrature", 1e-8, "massive_cs", {"sigma": 0.3, "r": 2})
    ref = abs(mv.overlap(rep, labels[0], labels[1], quad).value)
    worst = 0.0
    for _ in range(3):
        L = sp.sl2c_to_lorentz(sp.random_sl2c(rng, 0.3))
        C = rng.normal(size=4)
        z1 = mv.transform_label(labels[0], L, C)
        z2 = mv.transform_label(labels[1], L, C)
        worst = max(worst, abs(abs(mv.overlap(rep, z1, z2, quad).value) - ref))
    _rec(out, "massive.covariance", worst, 0, "quadrature", 1e-6, "massive_cs")

    z = labels[0]
    g = mv.tangent(dgauge=1.0)
    _rec(out, "massive.gauge_shift_analytic", mv.connection_analytic(rep, z, g, kappa) - rep.r, 0, "analytic", 1e-10, "massive_cs")
    fd = ng.connection_numeric(rep, z, g, quad)
    _rec(out, "massive.gauge_shift_numeric", fd.value - rep.r, fd.error, "finite-difference", 1e-4, "massive_cs")
    v = rng.normal(size=mv.TANGENT_DIM)
    v /= np.linalg.norm(v)
    fd = ng.connection_numeric(rep, z, v, quad)
    _rec(out, "massive.connection_vs_oracle", fd.value - mv.connection_analytic(rep, z, v, kappa), fd.error, "finite-difference", 1e-4, "massive_cs")
    d = mv.degenerate_direction(z)
    w = rng.normal(size=mv.TANGENT_DIM)
    _rec(out, "massive.degenerate_analytic", mv.symplectic_analytic(rep, z, d, w, kappa), 0, "analytic", 1e-12, "massive_cs")
    fd = ng.symplectic_numeric(rep, z, d, w, quad)
    _rec(out, "massive.degenerate_numeric", fd.value, fd.error, "finite-difference", 1e-6, "massive_cs")
    A = lambda zz, dq: mv.connection_analytic(rep, zz, dq, kappa)
    _rec(out, "massive.dA_equals_Omega", ng.analytic_curl(A, z, v, w, 1e-4) - mv.symplectic_analytic(rep, z, v, w, kappa), 0,
         "finite-difference", 1e-6, "massive_cs")

    km = mv.kappa_monte_carlo(0.2, MCConfig(seed=seed, samples=200_000))
    kq = mv.massive_coefficients(0.2, QuadratureSpec(32))
    diff = kq.kappa - km.value
    _rec(out, "massive.kappa_quadrature_vs_mc", diff, km.error, "mc", passed=abs(diff) <= 3 * np.hypot(km.error, kq.errors["kappa"]),
         ref="massive_cs", params={"sigma": 0.2})
    omega = mv.massive_coefficients(0.1, QuadratureSpec(32)).omega
    _rec(out, "massive.omega_sigma_0.1", omega - 0.5, 0, "quadrature", 0.01, "massive_cs")

    res = mv.resolution_check(mv.MassiveRep(1.0, 2, 0.3), mv.SurfaceLabel(), sp.REFERENCE_TIME,
                              MCConfig(seed=seed, samples=200_000), kappa)
    _rec(out, "massive.resolution_ratio_minus_1", res.value - 1, res.error, "mc", 0.02, "massive_cs", {"sigma": 0.3, "r": 2})

    # informational: closed forms that disagree with oracles
    _rec(out, "erratum.kappa_sigma2_coefficient", kappa_sigma2_fit(), 0, "quadrature", info=True, ref="kappa expansion; closed form gives 0.25")
    _rec(out, "erratum.K_numeric_minus_closed", float(np.abs(coeffs.K_difference).max()), 0, "quadrature", info=True, ref="momentum covariance")
    zr = mv.MassiveLabel.from_momentum([0, 0, 0])
    dI = mv.tangent(dI=[1, 0, 0])
    fd = ng.metric_numeric(mv.MassiveRep(1.0, 0, 0.05), zr, dI, steps=(1e-3, 5e-4, 2.5e-4))
    lead = mv.metric_leading(mv.MassiveRep(1.0, 0, 0.05), zr, dI)
    _rec(out, "erratum.massive_metric_dI_ratio", fd.value / lead, fd.error / lead, "finite-difference", info=True, ref="leading metric, dI entry")
    r0 = mv.MassiveRep(1.0, 0, 0.3)
    lit = mv.symplectic_literal(r0, zr, mv.tangent(dI=[1, 0, 0]), mv.tangent(dX=[0, 1, 0, 0]), 1.0)
    ana = mv.symplectic_analytic(r0, zr, mv.tangent(dI=[1, 0, 0]), mv.tangent(dX=[0, 1, 0, 0]), 1.0)
    _rec(out, "erratum.symplectic_dI1_dY1_printed_over_dA", lit / ana, 0, "analytic", info=True, ref="symplectic form sign")


def kappa_sigma2_fit(sigmas=(0.02, 0.04, 0.06, 0.08)) -> float:
    """Fitted ``a`` in ``kappa = 1 + a sigma^2 + b sigma^4``."""
    s = np.asarray(sigmas)
    k = np.array([mv.massive_coefficients(x, QuadratureSpec(32)).kappa for x in s])
    A = np.stack([s**2, s**4], axis=1)
    coef, *_ = np.linalg.lstsq(A, k - 1, rcond=None)
    return float(coef[0])


def v_scaling_exponent(sigmas=(0.2, 0.1, 0.05)) -> float:
    s = np.asarray(sigmas)
    v = np.array([abs(mv.massive_coefficients(x, QuadratureSpec(32)).v) for x in s])
    return float(np.polyfit(np.log(s), np.log(v), 1)[0])


def _spinor_errata(out, rng):
    I = sp.random_unit_timelike(rng)
    _rec(out, "erratum.printed_boost_determinant", float(np.linalg.det(sp.literal_boost_matrix(I))), 0, "analytic", info=True,
         ref="boost matrix as printed; proper boosts have +1")
    c, d = rng.normal(size=2) + 1j * rng.normal(size=2), rng.normal(size=2) + 1j * rng.normal(size=2)
    ratio = sp.minkowski(sp.null_from_spinor(c), sp.null_from_spinor(d)) / abs(sp.eps_product(c, d)) ** 2
    _rec(out, "erratum.IJ_over_eps_squared", ratio, 0, "analytic", info=True, ref="implemented 2; printed relation implies 1/2")
    m = rng.normal(size=3)
    m /= np.linalg.norm(m)
    _rec(out, "erratum.printed_J_minus_boosted_J", float(np.abs(mv.literal_spin_vector(I, m) - mv.pauli_lubanski_direction(I, m)).max()),
         0, "analytic", info=True, ref="component formula for J")
    z = mv.MassiveLabel.from_momentum(I[1:], m)
    _rec(out, "erratum.mu_null_minus_I_plus_J", float(np.abs(sp.null_from_spinor(z.mu) - (z.I + z.J)).max()), 0, "analytic", info=True,
         ref="mu <-> I+J assignment (0 means mu is the I+J spinor)")
    _rec(out, "erratum.lam_null_minus_I_minus_J", float(np.abs(sp.null_from_spinor(z.lam) - (z.I - z.J)).max()), 0, "analytic", info=True,
         ref="lam <-> I-J assignment")


def _massless(out, rng):
    worst = 0.0
    for N in range(0, 9):
        for deg in range(N + 1):
            coeffs = rng.normal(size=deg + 1)
            worst = max(worst, ml.reproduction_error(N, coeffs))
    _rec(out, "massless.legendre_reproduction", worst, 0, "quadrature", 1e-12, "massless_cs")
    norm = max(max(ml.normalisation_errors(ml.MasslessRep(sigma=s, smearing=k, N=4, eps=e)))
               for s in (0.05, 0.3) for k, e in (("legendre", 0.1), ("rational", 0.1), ("rational", 1e-3)))
    _rec(out, "massless.smearing_normalisation", norm, 0, "quadrature", 1e-10, "massless_cs")
    rep = ml.MasslessRep(r=2, sigma=0.1, eps=0.05)
    _rec(out, "massless.energy_expectation", ml.energy_expectation(rep) - rep.energy_factor, 0, "quadrature", 1e-8, "massless_cs")
    z = ml.random_label(rng, 0.4, 0.5)
    _rec(out, "massless.twistor_residual", ml.twistor_residual(rep, z), 0, "analytic", 1e-12, "massless_cs")
    _rec(out, "massless.twistor_constraint", ml.twistor_constraint(rep, z) - 1, 0, "analytic", 1e-12, "massless_cs")
    iota, zeta, _ = ml.zeta_reduction(rep, z)
    _rec(out, "massless.iota_eps_zeta", abs(sp.eps_product(iota, zeta) - 1), 0, "analytic", 1e-10, "massless_cs")
    quad = QuadratureSpec(32)
    _rec(out, "massless.norm", abs(ml.norm(rep, z, quad).value - 1), 0, "quadrature", 1e-8, "massless_cs")
    v, w = rng.normal(size=ml.TANGENT_DIM), rng.normal(size=ml.TANGENT_DIM)
    A = lambda zz, dq: ml.connection_analytic(rep, zz, dq)
    _rec(out, "massless.dA_equals_Omega", ng.analytic_curl(A, z, v, w, 1e-4) - ml.symplectic_analytic(rep, z, v, w), 0,
         "finite-difference", 1e-6, "massless_cs")
    g = ml.gauge_direction()
    _rec(out, "massless.gauge_degenerate", ml.symplectic_analytic(rep, z, g, w), 0, "analytic", 1e-12, "massless_cs")
    fd = ng.connection_numeric(rep, z, g, quad)
    _rec(out, "massless.gauge_numeric_vs_formula", fd.value - ml.connection_analytic(rep, z, g), fd.error, "finite-difference", 1e-4,
         "massless_cs")
    fd = ng.connection_numeric(rep, z, v / np.linalg.norm(v), quad)
    _rec(out, "massless.connection_exact_mean_vs_oracle", fd.value - ml.connection_exact(rep, z, v / np.linalg.norm(v)), fd.error,
         "finite-difference", 1e-4, "massless_cs")
    _rec(out, "erratum.massless_connection_printed_minus_oracle", fd.value - ml.connection_analytic(rep, z, v / np.linalg.norm(v)),
         fd.error, "finite-difference", info=True, ref="printed connection assumes <x> = 1")
    _rec(out, "erratum.massless_gauge_shift_per_r", ml.connection_analytic(rep, z, g) / rep.r, 0, "analytic", info=True,
         ref="printed shift is -1 per unit r")
    _rec(out, "erratum.rational_C_closed_form_rel", ml.rational_constant_closed_form(0.1) / ml.rational_constant(0.1) - 1, 0, "analytic",
         info=True, ref="normaliser closed form at eps=0.1")
    c = ml.massless_metric_coefficients(ml.MasslessRep(eps=1e-3))
    _rec(out, "erratum.c1_eps_1e-3", c.c1, c.errors["c1"], "quadrature", info=True, ref="closed form 4")
    _rec(out, "erratum.eps_c2_eps_1e-3", 1e-3 * c.c2, 1e-3 * c.errors["c2"], "quadrature", info=True, ref="closed form 8")
    _rec(out, "massless.F_asymptotic_ratio_minus_1", c.F / ml.rational_asymptotics(1e-3)["F"] - 1, c.errors["F"], "quadrature", 0.1,
         "massless_cs")


def _determinism(out, seed):
    dom = GaussianProposal(np.zeros(3), np.ones(3))
    f = lambda x: np.exp(-0.5 * (x**2).sum(axis=1)) / (2 * np.pi) ** 1.5
    a = mc_integrate(f, dom, MCConfig(seed=seed, samples=50_000, batch_size=4096))
    b = mc_integrate(f, dom, MCConfig(seed=seed, samples=50_000, batch_size=4096))
    _rec(out, "mc.bit_identical", 0.0 if a.value == b.value and a.error == b.error else 1.0, 0, "mc", 0.0, "numgeom")
    s = mc_integrate(lambda x: np.ones(len(x)), SphereUniform(), MCConfig(seed=seed, samples=10_000))
    _rec(out, "mc.sphere_area", s.value - 4 * np.pi, s.error, "mc", 1e-12, "numgeom")


def run(seed: int = 0) -> list[ResultRecord]:
    rng = np.random.default_rng(seed)
    out: list[ResultRecord] = []
    _algebra(out, rng)
    _tetrads(out, rng)
    _reps(out, rng)
    _spinor_errata(out, rng)
    _massive(out, rng, seed)
    _massless(out, rng)
    _determinism(out, seed)
    return out
