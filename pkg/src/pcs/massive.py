"""Coherent states of the massive Poincare representations.

A state is labelled by a spacetime point ``X``, a unit timelike momentum
direction ``I`` and a spin direction ``m`` (a unit 3-vector in the rest frame
of ``n = (1, 0, 0, 0)``).  An extra ``gauge`` angle selects the phase of the
SL(2,C) lift ``alpha = omega_I u(m) diag(e^{i theta}, e^{-i theta})``; it only
changes the overall phase of the state.

In momentum space the state is ``a(xi) |s(xi)>_r`` with a scalar Gaussian
amplitude ``a`` and a unit spinor ``s(xi) ~ omega_xi^{-1} mu``, where
``mu = alpha (1, 0)``.  All inner products reduce to ``conj(a1) a2 (s1^dagger s2)^r``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import erfcx

from . import spinors as sp
from .integrate import (
    Estimate,
    GaussianProposal,
    IntegrationError,
    MCConfig,
    ProductDomain,
    QuadratureSpec,
    SphereUniform,
    doubled,
    gauss_hermite,
    hermite_grid_3d,
    mc_integrate,
)
from .su2 import coherent_vector, rep_matrix, rotation_to

N_REF = sp.REFERENCE_TIME


@dataclass(frozen=True)
class MassiveRep:
    M: float = 1.0
    r: int = 0
    sigma: float = 0.1

    def __post_init__(self):
        if self.M <= 0 or self.sigma <= 0:
            raise ValueError("mass and width must be positive")
        if int(self.r) != self.r or self.r < 0:
            raise ValueError("r must be a non-negative integer")


@dataclass(frozen=True, eq=False)
class MassiveLabel:
    X: np.ndarray
    I: np.ndarray
    m: np.ndarray
    gauge: float = 0.0

    def __post_init__(self):
        X = np.asarray(self.X, dtype=float)
        I = np.asarray(self.I, dtype=float)
        m = np.asarray(self.m, dtype=float)
        if X.shape != (4,) or I.shape != (4,) or m.shape != (3,):
            raise ValueError("label needs X, I four-vectors and a 3-vector m")
        if abs(sp.minkowski(I, I) - 1) > 1e-10 * max(1.0, I[0] ** 2) or I[0] <= 0:
            raise ValueError("I must be a future unit timelike vector")
        if abs(np.linalg.norm(m) - 1) > 1e-10:
            raise ValueError("m must be a unit 3-vector")
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "I", I)
        object.__setattr__(self, "m", m)

    @classmethod
    def from_momentum(cls, p, m=(0.0, 0.0, 1.0), X=(0.0, 0.0, 0.0, 0.0), gauge: float = 0.0):
        p = np.asarray(p, dtype=float)
        m = np.asarray(m, dtype=float)
        return cls(np.asarray(X, float), np.concatenate([[np.sqrt(1 + p @ p)], p]), m / np.linalg.norm(m), gauge)

    def coordinates(self) -> np.ndarray:
        """Chart ``(X0..X3, I1..I3, w1, w2, gauge)`` with ``w`` the stereographic image of ``m``."""
        return np.concatenate([self.X, self.I[1:], stereo_from_sphere(self.m), [self.gauge]])

    @classmethod
    def from_coordinates(cls, q) -> "MassiveLabel":
        q = np.asarray(q, dtype=float)
        p = q[4:7]
        return cls(q[:4], np.concatenate([[np.sqrt(1 + p @ p)], p]), sphere_from_stereo(q[7:9]), float(q[9]))

    def shifted(self, dq, delta: float) -> "MassiveLabel":
        return MassiveLabel.from_coordinates(self.coordinates() + delta * np.asarray(dq, float))

    @property
    def alpha(self) -> np.ndarray:
        phase = np.diag([np.exp(1j * self.gauge), np.exp(-1j * self.gauge)])
        if self.I[0] - 1 < 1e-12:
            omega = np.eye(2, dtype=complex)
        else:
            omega = sp.boost_unchecked(self.I)
        return omega @ rotation_to(self.m) @ phase

    @property
    def mu(self) -> np.ndarray:
        return self.alpha[:, 0]

    @property
    def lam(self) -> np.ndarray:
        return self.alpha[:, 1]

    @property
    def J(self) -> np.ndarray:
        return pauli_lubanski_direction(self.I, self.m)


TANGENT_DIM = 10


def stereo_from_sphere(m) -> np.ndarray:
    """Stereographic projection from the south pole (``z`` maps to the origin)."""
    m = np.asarray(m, dtype=float)
    if m[2] + 1 < 1e-8:
        raise ValueError("spin chart is singular at m = -z")
    return m[:2] / (1 + m[2])


def sphere_from_stereo(w) -> np.ndarray:
    w = np.asarray(w, dtype=float)
    w2 = w @ w
    return np.array([2 * w[0], 2 * w[1], 1 - w2]) / (1 + w2)


def sphere_jacobian(w) -> np.ndarray:
    """``d m / d w`` as a 3x2 matrix."""
    w = np.asarray(w, dtype=float)
    w2 = w @ w
    a = 1 + w2
    J = np.empty((3, 2))
    for i in range(2):
        J[0, i] = (2 * (i == 0) * a - 4 * w[0] * w[i]) / a**2
        J[1, i] = (2 * (i == 1) * a - 4 * w[1] * w[i]) / a**2
        J[2, i] = (-2 * w[i] * a - (1 - w2) * 2 * w[i]) / a**2
    return J


def tangent(dX=(0, 0, 0, 0), dI=(0, 0, 0), dw=(0, 0), dgauge=0.0) -> np.ndarray:
    """Tangent vector in the chart of :meth:`MassiveLabel.coordinates`."""
    return np.concatenate([np.asarray(dX, float), np.asarray(dI, float), np.asarray(dw, float), [float(dgauge)]])


def spin_tangent(z: "MassiveLabel", dm) -> np.ndarray:
    """Chart tangent that moves ``m`` along the (projected) 3-vector ``dm``."""
    dm = np.asarray(dm, dtype=float)
    dm = dm - z.m * (z.m @ dm)
    J = sphere_jacobian(stereo_from_sphere(z.m))
    dw, *_ = np.linalg.lstsq(J, dm, rcond=None)
    return tangent(dw=dw)


def pauli_lubanski_direction(I, m) -> np.ndarray:
    """``J = Lambda(omega_I) (0, m)``: unit spacelike, orthogonal to ``I``."""
    I = np.asarray(I, dtype=float)
    m = np.asarray(m, dtype=float)
    L = sp.sl2c_to_lorentz(sp.boost_spinor_matrix(I))
    return L @ np.concatenate([[0.0], m])


def literal_spin_vector(I, m) -> np.ndarray:
    """The component formula ``(m.I, m - I (I.m)/(I0 - 1))``, for comparison only."""
    I = np.asarray(I, dtype=float)
    m = np.asarray(m, dtype=float)
    p = I[1:]
    return np.concatenate([[m @ p], m - p * (p @ m) / (I[0] - 1)])


def measure_weight(xi3, M: float):
    """Density of ``d mu_M`` in ``d^3 xi`` coordinates: ``M^2 / (2 xi0)``."""
    xi3 = np.asarray(xi3, dtype=float)
    return M**2 / (2 * np.sqrt(1 + (xi3**2).sum(axis=-1)))


def on_shell(xi3):
    xi3 = np.asarray(xi3, dtype=float)
    return np.concatenate([np.sqrt(1 + (xi3**2).sum(axis=-1, keepdims=True)), xi3], axis=-1)


# --- wavefunctions ---------------------------------------------------------


def _log_amplitude(rep: MassiveRep, X, I, xi):
    Ixi = sp.minkowski(I, xi)
    return (
        -np.log(rep.M) - 0.75 * np.log(np.pi * rep.sigma**2)
        + 0.5 * np.log(2 * Ixi)
        - (Ixi**2 - 1) / (2 * rep.sigma**2)
        - 1j * rep.M * sp.minkowski(X, xi)
    )


def _spin_spinor(mu, xi):
    """Unit spinor ``omega_xi^{-1} mu / |.|`` (broadcast over xi and mu)."""
    parity = xi * np.array([1.0, -1.0, -1.0, -1.0])
    omega_inv = (np.eye(2) + sp.vector_to_matrix(parity)) / np.sqrt(2 * (1 + xi[..., 0]))[..., None, None]
    s = np.einsum("...ab,...b->...a", omega_inv, mu)
    return s / np.linalg.norm(s, axis=-1, keepdims=True)


def wavefunction(rep: MassiveRep, z: MassiveLabel, xi) -> np.ndarray:
    """Momentum-space components, shape ``(..., r + 1)``."""
    xi = np.asarray(xi, dtype=float)
    a = np.exp(_log_amplitude(rep, z.X, z.I, xi))
    return a[..., None] * coherent_vector(_spin_spinor(z.mu, xi), rep.r)


def coherent_wavefunction(rep: MassiveRep, z: MassiveLabel):
    return lambda xi: wavefunction(rep, z, xi)


def reference_wavefunction(rep: MassiveRep):
    return coherent_wavefunction(rep, MassiveLabel(np.zeros(4), N_REF.copy(), np.array([0.0, 0.0, 1.0])))


def group_action(rep: MassiveRep, alpha, X, psi):
    """``[U(alpha, X) psi](xi)`` for a momentum-space function ``psi``."""
    alpha = sp.check_sl2c(alpha)
    alpha_inv = sp.spinor_matrix_inverse(alpha)
    L_inv = sp.sl2c_to_lorentz(alpha_inv)
    X = np.asarray(X, dtype=float)

    def transformed(xi):
        xi = np.asarray(xi, dtype=float)
        xi_back = xi @ L_inv.T
        out = []
        for k in np.ndindex(xi.shape[:-1]):
            wig = np.linalg.inv(sp.boost_unchecked(xi[k])) @ alpha @ sp.boost_unchecked(xi_back[k])
            out.append(rep_matrix(wig, rep.r) @ psi(xi_back[k]))
        vals = np.array(out).reshape(xi.shape[:-1] + (rep.r + 1,))
        return np.exp(-1j * rep.M * sp.minkowski(X, xi))[..., None] * vals

    return transformed


# --- overlaps --------------------------------------------------------------


def _overlap_batch(rep: MassiveRep, X1, I1, mu1, X2, I2, mu2, n: int, scale: float | None = None):
    """Vectorised ``<z1|z2>`` for label arrays of shape ``(B, ...)``.

    The integral is done in the rest frame of ``I1 + I2`` where both
    Gaussians are nearly centred; ``d^3 xi / xi0`` is Lorentz invariant.
    """
    P = I1 + I2
    P = P / np.sqrt(sp.minkowski(P, P))[:, None]
    L = sp.sl2c_to_lorentz(sp.boost_unchecked(P))
    pts, w = hermite_grid_3d(n, rep.sigma if scale is None else scale)
    xi_rest = on_shell(pts)
    xi = np.einsum("bmn,kn->bkm", L, xi_rest)
    la1 = _log_amplitude(rep, X1[:, None], I1[:, None], xi)
    la2 = _log_amplitude(rep, X2[:, None], I2[:, None], xi)
    integrand = np.exp(np.conj(la1) + la2)
    if rep.r:
        s1 = _spin_spinor(mu1[:, None], xi)
        s2 = _spin_spinor(mu2[:, None], xi)
        integrand = integrand * np.einsum("bka,bka->bk", np.conj(s1), s2) ** rep.r
    dens = rep.M**2 / (2 * xi_rest[:, 0])
    return integrand @ (w * dens)


def _stack(labels):
    return (
        np.array([z.X for z in labels]),
        np.array([z.I for z in labels]),
        np.array([z.mu for z in labels]),
    )


def overlap(rep: MassiveRep, z1: MassiveLabel, z2: MassiveLabel, quad: QuadratureSpec = QuadratureSpec()) -> Estimate:
    """``<z1|z2>`` by Gauss-Hermite quadrature with a node-halving error estimate."""
    a, b = _stack([z1]), _stack([z2])
    est = doubled(lambda q: complex(_overlap_batch(rep, *a, *b, q.nodes_per_axis)[0]), quad)
    if est.error > quad.target_tol * 1e3:
        raise IntegrationError(f"overlap tolerance not reached: estimate {est.error:.2e}")
    return est


def overlap_many(rep: MassiveRep, z1s, z2s, nodes: int) -> np.ndarray:
    return _overlap_batch(rep, *_stack(z1s), *_stack(z2s), nodes)


def norm(rep: MassiveRep, z: MassiveLabel, quad: QuadratureSpec = QuadratureSpec()) -> Estimate:
    est = overlap(rep, z, z, quad)
    return Estimate(float(np.real(est.value)), est.error)


# --- coefficients ----------------------------------------------------------


@dataclass(frozen=True)
class MassiveCoefficients:
    sigma: float
    kappa: float
    omega: float
    v: float
    K_numeric: np.ndarray
    K_closed: np.ndarray
    errors: dict

    @property
    def K_difference(self) -> np.ndarray:
        return self.K_numeric - self.K_closed


def _rest_moments(sigma: float, n: int):
    """Nodes/weights of the rest-frame distribution ``|psi0|^2 d mu`` (a normal law)."""
    t, w = gauss_hermite(n)
    # xi_i ~ N(0, sigma^2/2) <=> xi_i = sigma t with weight exp(-t^2)/sqrt(pi)
    tx, ty, tz = np.meshgrid(t, t, t, indexing="ij")
    W = (w[:, None, None] * w[None, :, None] * w[None, None, :]).ravel() / np.pi**1.5
    xi3 = sigma * np.stack([tx.ravel(), ty.ravel(), tz.ravel()], axis=-1)
    return on_shell(xi3), W


def _coeffs_at(sigma: float, n: int):
    xi, W = _rest_moments(sigma, n)
    kappa = W @ xi[:, 0]
    v = 2 * W @ (xi[:, 3] / (xi[:, 0] + xi[:, 3]))
    mean = W @ xi
    second = np.einsum("k,km,kn->mn", W, xi, xi)
    cov_upper = second - np.outer(mean, mean)
    t, w = gauss_hermite(n)
    # int_0^inf dxi exp(-xi^2/sigma^2)/(1+xi^2) = (sigma/2) sum w / (1 + sigma^2 t^2)
    omega = (sigma / 2) * (w @ (1 / (1 + (sigma * t) ** 2))) / np.sqrt(np.pi * sigma**2)
    return kappa, omega, v, sp.ETA @ cov_upper @ sp.ETA


def massive_coefficients(sigma: float, quad: QuadratureSpec = QuadratureSpec(), M: float = 1.0) -> MassiveCoefficients:
    """kappa, omega, v and the momentum covariance ``K`` of the reference state."""
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    fine = _coeffs_at(sigma, quad.nodes_per_axis)
    coarse = _coeffs_at(sigma, quad.coarse().nodes_per_axis)
    errors = {
        "kappa": abs(fine[0] - coarse[0]),
        "omega": abs(fine[1] - coarse[1]),
        "v": abs(fine[2] - coarse[2]),
        "K": float(np.abs(fine[3] - coarse[3]).max()) * M**2,
    }
    # omega fails first for wide states: the 1/(1+xi^2) pole limits Gauss-Hermite
    if max(errors["kappa"], errors["v"]) > quad.target_tol:
        raise IntegrationError(f"coefficient quadrature did not converge: {errors}")
    kappa, omega, v, K_lower = fine
    n_low = sp.lower(N_REF)
    K_closed = M**2 * ((1 + 2 * sigma**2 / 3 - kappa**2) * np.outer(n_low, n_low) - sigma**2 / 6 * sp.ETA)
    return MassiveCoefficients(sigma, float(kappa), float(omega), float(v), M**2 * K_lower, K_closed, errors)


def omega_closed_form(sigma: float) -> float:
    """``(pi sigma^2)^{-1/2} int_0^inf e^{-x^2/sigma^2}/(1+x^2) dx`` via erfcx."""
    return float(np.sqrt(np.pi) / (2 * sigma) * erfcx(1 / sigma))


def kappa_monte_carlo(sigma: float, mc: MCConfig) -> Estimate:
    """Independent estimate of kappa by sampling the rest-frame normal law."""
    s = sigma / np.sqrt(2)
    domain = ProductDomain((GaussianProposal(np.zeros(3), np.full(3, s)),))

    def integrand(p):
        dens = np.exp(-(p**2).sum(axis=1) / sigma**2) / (np.pi * sigma**2) ** 1.5
        return np.sqrt(1 + (p**2).sum(axis=1)) * dens

    return mc_integrate(integrand, domain, mc)


# --- analytic geometry -----------------------------------------------------


def _alpha_derivative(z: MassiveLabel, dq) -> np.ndarray:
    """Exact directional derivative of ``alpha(q)`` along the chart tangent ``dq``."""
    dq = np.asarray(dq, dtype=float)
    I, m = z.I, z.m
    dp = dq[4:7]
    dI = np.concatenate([[I[1:] @ dp / I[0]], dp])
    dm = sphere_jacobian(stereo_from_sphere(m)) @ dq[7:9]
    theta = z.gauge
    D = np.diag([np.exp(1j * theta), np.exp(-1j * theta)])
    dD = 1j * dq[9] * np.diag([np.exp(1j * theta), -np.exp(-1j * theta)])
    omega = sp.boost_unchecked(I)
    domega = sp.boost_derivative(I, dI)
    u = rotation_to(m)
    if m[2] + 1 < 1e-6:
        raise ValueError("spin chart is singular at m = -z")
    ds = sp.section_spinor_derivative(np.concatenate([[1.0], m]), np.concatenate([[0.0], dm]))
    du = np.array([[ds[0], -np.conj(ds[1])], [ds[1], np.conj(ds[0])]])
    return domega @ u @ D + omega @ du @ D + omega @ u @ dD


def _shift_vector(dq):
    return np.asarray(dq, float)[:4]


def _dI(z: MassiveLabel, dq):
    dp = np.asarray(dq, float)[4:7]
    return np.concatenate([[z.I[1:] @ dp / z.I[0]], dp])


def connection_analytic(rep: MassiveRep, z: MassiveLabel, dq, kappa: float | None = None) -> float:
    """``A(dq) = -kappa M I.dX + r Im(e da - b dc)`` for ``alpha = (a, b; c, e)``."""
    if kappa is None:
        kappa = massive_coefficients(rep.sigma, QuadratureSpec(24)).kappa
    (a, b), (c, e) = z.alpha
    (da, db), (dc, de) = _alpha_derivative(z, dq)
    spin = (e * da - b * dc).imag
    return float(-kappa * rep.M * sp.minkowski(z.I, _shift_vector(dq)) + rep.r * spin)


def connection_literal(rep: MassiveRep, z: MassiveLabel, dq, kappa: float) -> float:
    """Connection with the spin term written as ``-(i r/2)[lam eps dmu - c.c.]``."""
    dalpha = _alpha_derivative(z, dq)
    w = sp.eps_product(z.lam, dalpha[:, 0])
    return float(-kappa * rep.M * sp.minkowski(z.I, _shift_vector(dq)) + rep.r * w.imag)


def symplectic_analytic(rep: MassiveRep, z: MassiveLabel, dq1, dq2, kappa: float | None = None) -> float:
    """Exterior derivative of :func:`connection_analytic` on two tangents."""
    if kappa is None:
        kappa = massive_coefficients(rep.sigma, QuadratureSpec(24)).kappa
    dI1, dI2 = _dI(z, dq1), _dI(z, dq2)
    dX1, dX2 = _shift_vector(dq1), _shift_vector(dq2)
    first = -kappa * rep.M * (sp.minkowski(dI1, dX2) - sp.minkowski(dI2, dX1))
    (da1, db1), (dc1, de1) = _alpha_derivative(z, dq1)
    (da2, db2), (dc2, de2) = _alpha_derivative(z, dq2)
    spin = (de1 * da2 - de2 * da1 - db1 * dc2 + db2 * dc1).imag
    return float(first + rep.r * spin)


def _null_derivative(c, dc):
    return 2 * np.einsum("a,mab,b->m", np.conj(c), sp.SIGMA, dc).real


def _dJ(z: MassiveLabel, dq):
    dalpha = _alpha_derivative(z, dq)
    return 0.5 * (_null_derivative(z.mu, dalpha[:, 0]) - _null_derivative(z.lam, dalpha[:, 1]))


def symplectic_literal(rep: MassiveRep, z: MassiveLabel, dq1, dq2, kappa: float) -> float:
    """``M dI^mu ^ dY_mu - (r/4) eps_{mnrs} I^m J^n (dI^r ^ dI^s - dJ^r ^ dJ^s)`` as written."""
    dI1, dI2 = _dI(z, dq1), _dI(z, dq2)
    dY1, dY2 = kappa * _shift_vector(dq1), kappa * _shift_vector(dq2)
    dJ1, dJ2 = _dJ(z, dq1), _dJ(z, dq2)
    first = rep.M * (sp.minkowski(dI1, dY2) - sp.minkowski(dI2, dY1))
    IJ = np.einsum("mnrs,m,n->rs", sp.EPS_LOWER, z.I, z.J)
    wedge_I = np.outer(dI1, dI2) - np.outer(dI2, dI1)
    wedge_J = np.outer(dJ1, dJ2) - np.outer(dJ2, dJ1)
    return float(first - rep.r / 4 * np.sum(IJ * (wedge_I - wedge_J)))


def degenerate_direction(z: MassiveLabel) -> np.ndarray:
    """Chart tangent of ``I^mu d/dY^mu`` (a pure translation along ``I``)."""
    return tangent(dX=z.I)


def _spin_terms(rep: MassiveRep, z: MassiveLabel, dq, kappa: float, v: float) -> float:
    dalpha = _alpha_derivative(z, dq)
    mu, lam = z.mu, z.lam
    dmu = dalpha[:, 0]
    dXm = sp.vector_to_matrix(_shift_vector(dq))
    medm = sp.eps_product(mu, dmu)
    cross = (np.conj(mu) @ dXm @ lam) * medm
    # (i r/4) kappa M [w - conj(w)] = -(r/2) kappa M Im w
    mixed = -(rep.r / 2) * kappa * rep.M * cross.imag
    return float(mixed + rep.r**2 / 4 * (1 - v) * abs(medm) ** 2)


def metric_analytic(rep: MassiveRep, z: MassiveLabel, dq, coeffs: MassiveCoefficients | None = None) -> float:
    """``ds^2_0`` with (omega, K) plus the spin terms, as closed-form expressions."""
    c = coeffs or massive_coefficients(rep.sigma, QuadratureSpec(24), rep.M)
    dI = _dI(z, dq)
    dX = _shift_vector(dq)
    I_low = sp.lower(z.I)
    K = rep.M**2 * ((1 + 2 * rep.sigma**2 / 3 - c.kappa**2) * np.outer(I_low, I_low) - rep.sigma**2 / 6 * sp.ETA)
    ds0 = -c.omega / (3 * rep.sigma**2) * sp.minkowski(dI, dI) + dX @ K @ dX
    return float(ds0 + _spin_terms(rep, z, dq, c.kappa, c.v))


def metric_leading(rep: MassiveRep, z: MassiveLabel, dq, coeffs: MassiveCoefficients | None = None) -> float:
    """Small-width form: ``-(1/6s^2) dI.dI + M^2 s^2/6 (I I - eta) dX dX`` plus spin terms."""
    c = coeffs or massive_coefficients(rep.sigma, QuadratureSpec(24), rep.M)
    dI = _dI(z, dq)
    dX = _shift_vector(dq)
    s2 = rep.sigma**2
    IdX = sp.minkowski(z.I, dX)
    ds = -sp.minkowski(dI, dI) / (6 * s2) + rep.M**2 * s2 / 6 * (IdX**2 - sp.minkowski(dX, dX))
    return float(ds + _spin_terms(rep, z, dq, c.kappa, c.v))


def rest_frame_spin_terms(rep: MassiveRep, m, dm, dx, kappa: float) -> float:
    """``(r/2) M kappa m.(dm x dx) + (r^2/4) dm.dm``."""
    m, dm, dx = (np.asarray(a, float) for a in (m, dm, dx))
    return float(rep.r / 2 * rep.M * kappa * m @ np.cross(dm, dx) + rep.r**2 / 4 * dm @ dm)


# --- covariance ------------------------------------------------------------


def _check_lorentz(L, tol: float = 1e-9) -> np.ndarray:
    L = np.asarray(L, dtype=float)
    if L.shape != (4, 4) or np.abs(L.T @ sp.ETA @ L - sp.ETA).max() > tol:
        raise ValueError("not a Lorentz matrix")
    if np.linalg.det(L) < 0 or L[0, 0] < 1 - tol:
        raise ValueError("Lorentz matrix must be proper and orthochronous")
    return L


def transform_label(z: MassiveLabel, lorentz=None, translation=None) -> MassiveLabel:
    """Image of a label under ``(Lambda, C)``: ``X -> Lambda X + C``, ``I -> Lambda I``, ``J -> Lambda J``."""
    X, I, J = z.X, z.I, z.J
    if lorentz is not None:
        L = _check_lorentz(lorentz)
        X, I, J = L @ X, L @ I, L @ J
    if translation is not None:
        X = X + np.asarray(translation, dtype=float)
    I = I / np.sqrt(sp.minkowski(I, I))
    back = sp.sl2c_to_lorentz(sp.spinor_matrix_inverse(sp.boost_unchecked(I)))
    m = (back @ J)[1:]
    return MassiveLabel(X, I, m / np.linalg.norm(m))


# --- resolution of unity and quantisation ----------------------------------


@dataclass(frozen=True)
class SurfaceLabel:
    n: np.ndarray = N_REF
    t: float = 0.0

    def label(self, x, p, m) -> MassiveLabel:
        """Coherent-state label at spatial position ``x`` and momentum ``p`` on the surface."""
        L = sp.sl2c_to_lorentz(sp.boost_spinor_matrix(self.n))
        X = L @ np.concatenate([[self.t], np.asarray(x, float)])
        I = L @ on_shell(np.asarray(p, float))
        return MassiveLabel(X, I / np.sqrt(sp.minkowski(I, I)), np.asarray(m, float) / np.linalg.norm(m))


def resolution_constant(rep: MassiveRep, kappa: float) -> float:
    """``c`` in ``M^3 int d^3I d^3x d^2m |z><z| = c 1`` (c = (2pi)^3 4pi kappa/(r+1))."""
    return (2 * np.pi) ** 3 * 4 * np.pi * kappa / (rep.r + 1)


def _label_spinors(I, m):
    """Batched ``mu = omega_I u(m) (1,0)``; ``u(m)(1,0)`` is the section spinor of (1, m)."""
    s = sp.section_spinor_unchecked(np.concatenate([np.ones(m.shape[:-1] + (1,)), m], axis=-1))
    south = m[..., 2] + 1 < 1e-8
    if np.any(south):
        s[south] = np.array([0.0, -1j])
    return np.einsum("...ab,...b->...a", sp.boost_unchecked(I), s)


def resolution_check(
    rep: MassiveRep,
    surface: SurfaceLabel,
    xi,
    mc: MCConfig = MCConfig(samples=1_000_000),
    kappa: float | None = None,
    component: str = "highest",
) -> Estimate:
    """Ratio of the diagonal resolution kernel at ``xi`` to its predicted value.

    The x-integral is done analytically (it produces ``(2pi/M)^3 delta``); the
    remaining ``d^3I d^2m`` integral is sampled.  ``component="highest"``
    uses the ``<0|.|0>`` spin entry, ``"trace"`` the normalised trace.
    """
    del surface  # the kernel at fixed momentum does not depend on the surface time
    xi = np.asarray(xi, dtype=float)
    if kappa is None:
        kappa = massive_coefficients(rep.sigma, QuadratureSpec(32), rep.M).kappa
    width = rep.sigma / np.sqrt(2) * xi[0]
    domain = ProductDomain((GaussianProposal(xi[1:], np.full(3, width)), SphereUniform()))
    zero = np.zeros(4)

    def integrand(pts):
        I = on_shell(pts[:, :3])
        amp2 = np.exp(2 * _log_amplitude(rep, zero, I, xi).real)
        if component == "trace" or rep.r == 0:
            spin = 1.0 / (rep.r + 1)
        else:
            s = _spin_spinor(_label_spinors(I, pts[:, 3:]), xi)
            spin = np.abs(s[:, 0]) ** (2 * rep.r)
        return amp2 * spin

    est = mc_integrate(integrand, domain, mc)
    scale = (2 * np.pi) ** 3 * rep.M**2 / (2 * xi[0]) / resolution_constant(rep, kappa)
    return Estimate(est.value * scale, est.error * scale, "mc")


def quantize(
    rep: MassiveRep,
    surface: SurfaceLabel,
    f,
    z1: MassiveLabel,
    z2: MassiveLabel,
    mc: MCConfig = MCConfig(samples=20_000),
    nodes: int = 10,
    kappa: float | None = None,
) -> Estimate:
    """Monte-Carlo matrix element ``<z1| F_Sigma |z2>`` of a phase-space function.

    ``f(x, p, m)`` takes arrays of positions, momenta and spin directions.
    Overlaps with the sampled surface states use an ``nodes^3`` Gauss-Hermite grid.
    """
    if kappa is None:
        kappa = massive_coefficients(rep.sigma, QuadratureSpec(32), rep.M).kappa
    L = sp.sl2c_to_lorentz(sp.boost_spinor_matrix(surface.n))
    L_inv = sp.sl2c_to_lorentz(sp.spinor_matrix_inverse(sp.boost_spinor_matrix(surface.n)))
    p_mid = 0.5 * ((L_inv @ z1.I)[1:] + (L_inv @ z2.I)[1:])
    x_mid = 0.5 * ((L_inv @ z1.X)[1:] + (L_inv @ z2.X)[1:])
    widths = mc.widths or (rep.sigma, 1 / (rep.M * rep.sigma))
    domain = ProductDomain(
        (
            GaussianProposal(p_mid, np.full(3, widths[0])),
            GaussianProposal(x_mid, np.full(3, widths[1])),
            SphereUniform(),
        )
    )

    def integrand(pts):
        p, x, m = pts[:, :3], pts[:, 3:6], pts[:, 6:]
        B = len(pts)
        Xs = np.concatenate([np.full((B, 1), surface.t), x], axis=1) @ L.T
        Is = on_shell(p) @ L.T
        mus = _label_spinors(Is, m)
        a = _overlap_batch(rep, np.tile(z1.X, (B, 1)), np.tile(z1.I, (B, 1)), np.tile(z1.mu, (B, 1)), Xs, Is, mus, nodes)
        b = _overlap_batch(rep, Xs, Is, mus, np.tile(z2.X, (B, 1)), np.tile(z2.I, (B, 1)), np.tile(z2.mu, (B, 1)), nodes)
        vals = np.asarray(f(x, p, m))
        if not np.all(np.isfinite(vals)):
            raise IntegrationError("phase-space function is not finite at the sampled points")
        return vals * a * b

    small = MCConfig(mc.seed, mc.samples, (), min(mc.batch_size, 2048))
    est = mc_integrate(integrand, domain, small)
    scale = rep.M**3 / resolution_constant(rep, kappa)
    return Estimate(est.value * scale, est.error * scale, "mc")
