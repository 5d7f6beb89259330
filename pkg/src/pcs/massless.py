"""Coherent states of the massless Poincare representations.

Labels are ``(X, I, J)`` with ``I, J`` future null and ``I.J = 2``.  The
spinor pair ``(iota, j)`` with ``iota eps j = 1`` forms the SL(2,C) matrix
``alpha = [iota | j]``; a ``gauge`` angle rotates ``iota -> e^{-i theta} iota``
and ``j -> e^{i theta} j`` away from the canonical section of ``I``.

Momentum-space wavefunction::

    Psi(xi) = (xi~ eps j / |xi~ eps j|)^r  exp(-i xi.X)
              sqrt f(log n.xi)  sqrt g(-(I - J).xi / (I + J).xi),   n = (I + J)/2

Integrals use the measure ``e^{2 lam} dlam dx dphi`` in the frame of a label,
where ``xi' = e^lam (1, sqrt(1-x^2) cos phi, sqrt(1-x^2) sin phi, x)``.

Tangent vectors are 10-vectors ``(dX0..dX3, Re/Im t0, t1, t2)`` where the
traceless matrix ``T = [[t0, t1], [t2, -t0]]`` moves ``alpha -> alpha (1 + T)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable

import numpy as np
from numpy.polynomial import legendre as leg
from scipy import integrate as sint

from . import spinors as sp
from .integrate import (
    Estimate,
    IntegrationError,
    QuadratureSpec,
    composite_legendre,
    doubled,
    gauss_hermite,
    graded_breaks,
)

E = np.array([[0.0, 1.0], [-1.0, 0.0]])
I_REF = np.array([1.0, 0.0, 0.0, 1.0])
J_REF = np.array([1.0, 0.0, 0.0, -1.0])
TANGENT_DIM = 10


@dataclass(frozen=True)
class MasslessRep:
    r: int = 0
    sigma: float = 0.1
    smearing: str = "rational"
    N: int = 4
    eps: float = 0.1

    def __post_init__(self):
        if int(self.r) != self.r:
            raise ValueError("helicity label r must be an integer")
        if self.sigma <= 0:
            raise ValueError("sigma must be positive")
        if self.smearing not in ("legendre", "rational"):
            raise ValueError(f"unknown smearing {self.smearing!r}")
        if self.smearing == "legendre" and (int(self.N) != self.N or self.N < 0):
            raise ValueError("Legendre truncation N must be a non-negative integer")
        if self.smearing == "rational" and self.eps <= 0:
            raise ValueError("rational smearing needs eps > 0")

    @property
    def energy_factor(self) -> float:
        """``<n.xi>`` of the reference state, the rescaling ``Y = e^{sigma^2/4} X``."""
        return float(np.exp(self.sigma**2 / 4))


# --- little group and canonical boosts -------------------------------------


def little_group_check(alpha, tol: float = 1e-10):
    """Return ``(is_member, theta, z, D_r factor for r = 1)`` for ``alpha``.

    Members fix ``(1, 0)`` up to a phase: ``alpha = [[e^{i th}, e^{-i th} z], [0, e^{-i th}]]``.
    """
    alpha = sp.check_sl2c(alpha)
    if abs(alpha[1, 0]) > tol or abs(abs(alpha[0, 0]) - 1) > tol:
        return False, float("nan"), complex("nan"), complex("nan")
    theta = float(np.angle(alpha[0, 0]))
    z = complex(alpha[0, 1] * np.exp(1j * theta))
    return True, theta, z, complex(np.exp(-1j * theta))


def little_group_phase(alpha, r: int) -> complex:
    """``D_r(alpha) = e^{-i r theta}`` for a little-group element."""
    ok, theta, _, _ = little_group_check(alpha)
    if not ok:
        raise ValueError("matrix is not in the little group of (1, 0)")
    return complex(np.exp(-1j * r * theta))


def canonical_omega(xi) -> np.ndarray:
    """Lower-triangular ``[[e^rho, 0], [e^rho z, e^-rho]]`` taking ``(1, 0)`` to the canonical spinor of ``xi``."""
    xi = np.asarray(xi, dtype=float)
    if xi[0] + xi[3] < sp.SECTION_DELTA * xi[0]:
        raise sp.SpinorError("xi lies on the section singularity; the convention branch (0, sqrt xi0) has no lower-triangular boost")
    s = sp.spinor_from_null(xi)
    a = s[0].real
    return np.array([[a, 0], [s[1], 1 / a]], dtype=np.complex128)


# --- smearing functions ----------------------------------------------------


@dataclass(frozen=True)
class SmearingFunctions:
    kind: str
    sigma: float
    f: Callable
    g: Callable
    dlog_g: Callable
    C: float | None
    abs_norm: float
    x_breaks: np.ndarray = field(repr=False)

    def amplitude_g(self, x):
        """``sqrt(|g| / Z)``; equals ``sqrt g`` whenever ``g >= 0``."""
        return np.sqrt(np.abs(self.g(x)) / self.abs_norm)

    def sqrt_f(self, lam):
        return np.exp(-0.5 * lam**2 / self.sigma**2 - lam) / (np.pi * self.sigma**2) ** 0.25


def rational_constant(eps: float) -> float:
    """Exact normaliser of the rational ``g``: ``int (1+x)/((1-x)^2+eps^2) = 2/eps atan(2/eps) - log(1 + 4/eps^2)/2``."""
    return 1.0 / (2 / eps * np.arctan(2 / eps) - 0.5 * np.log1p(4 / eps**2))


def rational_constant_closed_form(eps: float) -> float:
    """The closed form with ``log(eps/2)``, which drops the ``O(eps^2)`` term of the exact log."""
    return 1.0 / (2 / eps * np.arctan(2 / eps) + np.log(eps / 2))


def legendre_coefficients(N: int) -> np.ndarray:
    return (2 * np.arange(N + 1) + 1) / (4 * np.pi)


def _abs_legendre_norm(c: np.ndarray, breaks: np.ndarray) -> float:
    x, w = composite_legendre(breaks, len(c) + 2)
    return float(2 * np.pi * w @ np.abs(leg.legval(x, c)))


def smearing_functions(rep: MasslessRep) -> SmearingFunctions:
    f = lambda lam: np.exp(-lam**2 / rep.sigma**2 - 2 * lam) / np.sqrt(np.pi * rep.sigma**2)
    if rep.smearing == "legendre":
        c = legendre_coefficients(rep.N)
        dc = leg.legder(c)
        roots = leg.legroots(c) if rep.N > 0 else np.array([])
        roots = np.sort(roots[np.isreal(roots)].real)
        roots = roots[(roots > -1) & (roots < 1)]
        breaks = np.concatenate([[-1.0], roots, [1.0]])
        g = lambda x: leg.legval(x, c)
        dlog = lambda x: leg.legval(x, dc) / leg.legval(x, c)
        return SmearingFunctions("legendre", rep.sigma, f, g, dlog, None, _abs_legendre_norm(c, breaks), breaks)
    eps = rep.eps
    C = rational_constant(eps)
    g = lambda x: C / (2 * np.pi) * (1 + x) / ((1 - x) ** 2 + eps**2)
    dlog = lambda x: 1 / (1 + x) + 2 * (1 - x) / ((1 - x) ** 2 + eps**2)
    near_one = 1 - graded_breaks(1.0, eps / 20, 12)[::-1]
    near_minus = -1 + graded_breaks(1.0, 1e-4, 6)
    breaks = np.unique(np.concatenate([near_minus, near_one]))
    return SmearingFunctions("rational", rep.sigma, f, g, dlog, C, 1.0, breaks)


def _gauss_legendre_ld(n: int):
    """Gauss-Legendre rule in extended precision (Newton-refined numpy nodes)."""
    x = leg.leggauss(n)[0].astype(np.longdouble)
    cn = np.zeros(n + 1, dtype=np.longdouble)
    cn[-1] = 1
    dcn = leg.legder(cn)
    for _ in range(2):
        x = x - leg.legval(x, cn) / leg.legval(x, dcn)
    w = 2 / ((1 - x**2) * leg.legval(x, dcn) ** 2)
    return x, w


def reproduction_error(N: int, coeffs) -> float:
    """``|2 pi int g_N p - p(1)|`` for the polynomial ``p`` with the given power coefficients.

    Evaluated in extended precision: high-degree monomials amplify the float64
    rounding of the nodes past 1e-12.
    """
    coeffs = np.asarray(coeffs, dtype=np.longdouble)
    x, w = _gauss_legendre_ld(N + 1 + len(coeffs) // 2 + 1)
    g = leg.legval(x, legendre_coefficients(N).astype(np.longdouble))
    p = np.polynomial.polynomial.polyval(x, coeffs)
    two_pi = 2 * np.arccos(np.longdouble(-1))
    return float(abs(two_pi * np.sum(w * g * p) - np.sum(coeffs)))


def normalisation_errors(rep: MasslessRep) -> tuple[float, float]:
    """Residuals of ``int e^{2 lam} f = 1`` and ``2 pi int g = 1``."""
    sm = smearing_functions(rep)
    t, w = gauss_hermite(80)
    lam = rep.sigma * t
    fint = rep.sigma * w @ (sm.f(lam) * np.exp(2 * lam + t**2))
    if rep.smearing == "legendre":
        x, wx = leg.leggauss(rep.N + 2)
        gint = 2 * np.pi * wx @ sm.g(x)
    else:
        x, wx = composite_legendre(sm.x_breaks, 24)
        gint = 2 * np.pi * wx @ sm.g(x)
    return float(abs(fint - 1)), float(abs(gint - 1))


# --- labels ----------------------------------------------------------------


def _j_from_null(iota, J):
    # any spinor of J works since iota eps j = 1 fixes the phase; take the better-conditioned hemisphere
    if J[3] >= 0:
        jc = sp.section_spinor_unchecked(J)
    else:
        d = J[0] - J[3]
        jc = np.array([(J[1] - 1j * J[2]) / np.sqrt(2 * d), np.sqrt(d / 2) + 0j])
    return jc / sp.eps_product(iota, jc)


@dataclass(frozen=True, eq=False)
class MasslessLabel:
    X: np.ndarray
    I: np.ndarray
    J: np.ndarray
    gauge: float = 0.0

    def __post_init__(self):
        for name in ("X", "I", "J"):
            v = np.asarray(getattr(self, name), dtype=float)
            if v.shape != (4,):
                raise ValueError(f"{name} must be a four-vector")
            object.__setattr__(self, name, v)
        for name in ("I", "J"):
            v = getattr(self, name)
            if abs(sp.minkowski(v, v)) > 1e-8 * v[0] ** 2 or v[0] <= 0:
                raise sp.SpinorError(f"{name} must be future null, got {v}")
        if abs(sp.minkowski(self.I, self.J) - 2) > 1e-8:
            raise sp.SpinorError(f"labels need I.J = 2, got {sp.minkowski(self.I, self.J)}")

    @classmethod
    def reference(cls, X=(0.0, 0.0, 0.0, 0.0)) -> "MasslessLabel":
        return cls(np.asarray(X, float), I_REF.copy(), J_REF.copy())

    @classmethod
    def from_alpha(cls, alpha, X=(0.0, 0.0, 0.0, 0.0)) -> "MasslessLabel":
        """Label with ``iota = alpha (1,0)``, ``j = alpha (0,1)``; the gauge absorbs the phase of ``iota``."""
        alpha = sp.check_sl2c(alpha, tol=1e-8)
        iota = alpha[:, 0]
        I = sp.null_from_spinor(iota)
        gauge = -float(np.angle(np.vdot(sp.section_spinor_unchecked(I), iota)))
        return cls(np.asarray(X, float), I, sp.null_from_spinor(alpha[:, 1]), gauge)

    @cached_property
    def iota(self) -> np.ndarray:
        return np.exp(-1j * self.gauge) * sp.section_spinor_unchecked(self.I)

    @cached_property
    def j(self) -> np.ndarray:
        return _j_from_null(self.iota, self.J)

    @cached_property
    def alpha(self) -> np.ndarray:
        return np.stack([self.iota, self.j], axis=1)

    def chart(self, q) -> "MasslessLabel":
        """Point ``(X + dX, alpha c(T))`` where ``c(T) = (1 + T)/sqrt det(1 + T)``."""
        q = np.asarray(q, dtype=float)
        return MasslessLabel.from_alpha(self.alpha @ _cayley(_T(q)), self.X + q[:4])

    def shifted(self, dq, delta: float) -> "MasslessLabel":
        return self.chart(delta * np.asarray(dq, float))

    def chart_tangent(self, q, dq):
        """Point ``chart(q)`` and the coordinate field ``d/dq`` there, in its own chart."""
        q, dq = np.asarray(q, float), np.asarray(dq, float)
        z = self.chart(q)
        A = np.linalg.inv(np.eye(2) + _T(q)) @ _T(dq)
        Tn = A - 0.5 * np.trace(A) * np.eye(2)
        # the base of the new chart absorbs the gauge phase, so conjugate Tn accordingly
        g = np.linalg.solve(z.alpha, self.alpha @ _cayley(_T(q)))
        Tn = g @ Tn @ np.linalg.inv(g)
        return z, np.concatenate([dq[:4], _t_params(Tn)])


def _T(q) -> np.ndarray:
    t = q[4:10:2] + 1j * q[5:10:2]
    return np.array([[t[0], t[1]], [t[2], -t[0]]])


def _t_params(T) -> np.ndarray:
    t = np.array([T[0, 0], T[0, 1], T[1, 0]])
    return np.ravel(np.column_stack([t.real, t.imag]))


def _cayley(T) -> np.ndarray:
    M = np.eye(2) + T
    return M / np.sqrt(complex(np.linalg.det(M)))


def tangent(dX=(0, 0, 0, 0), T=None) -> np.ndarray:
    """Tangent vector from a translation ``dX`` and a traceless ``T`` in sl(2, C)."""
    T = np.zeros((2, 2)) if T is None else np.asarray(T, dtype=np.complex128)
    if abs(np.trace(T)) > 1e-12:
        raise ValueError("T must be traceless")
    return np.concatenate([np.asarray(dX, float), _t_params(T)])


def gauge_direction() -> np.ndarray:
    """``iota -> e^{-i theta} iota``, ``j -> e^{i theta} j`` per unit ``theta``."""
    return tangent(T=np.diag([-1j, 1j]))


def spinor_increments(z: MasslessLabel, dq):
    """``(d iota, d j)`` along ``dq``."""
    dalpha = z.alpha @ _T(np.asarray(dq, float))
    return dalpha[:, 0], dalpha[:, 1]


def _null_increment(c, dc):
    return 2 * np.einsum("a,mab,b->m", np.conj(c), sp.SIGMA, dc).real


def vector_increments(z: MasslessLabel, dq):
    """``(dX, dI, dJ)`` along ``dq``."""
    di, dj = spinor_increments(z, dq)
    return np.asarray(dq, float)[:4], _null_increment(z.iota, di), _null_increment(z.j, dj)


def tangent_from_vectors(z: MasslessLabel, dX=(0, 0, 0, 0), dI=(0, 0, 0, 0), dJ=(0, 0, 0, 0), dgauge: float = 0.0):
    """Least-squares chart tangent reproducing ``(dI, dJ)`` and the gauge rate ``dgauge``."""
    basis = np.eye(TANGENT_DIM)[4:]
    rows = []
    for b in basis:
        _, a, c = vector_increments(z, b)
        rows.append(np.concatenate([a, c, [b[5] * -1]]))
    A = np.array(rows).T
    rhs = np.concatenate([np.asarray(dI, float), np.asarray(dJ, float), [dgauge]])
    sol, *_ = np.linalg.lstsq(A, rhs, rcond=None)
    if np.linalg.norm(A @ sol - rhs) > 1e-8 * max(1.0, np.linalg.norm(rhs)):
        raise ValueError("(dI, dJ) violate the constraints I.I = J.J = 0, I.J = 2 to first order")
    return np.concatenate([np.asarray(dX, float), sol])


def random_label(rng: np.random.Generator, scale: float = 0.5, spread: float = 1.0) -> MasslessLabel:
    alpha = sp.random_sl2c(rng, scale)
    return MasslessLabel.from_alpha(alpha, rng.normal(scale=spread, size=4))


# --- wavefunctions and overlaps --------------------------------------------


def _helicity(xi_spinor, j, r):
    w = xi_spinor[..., 0] * j[1] - xi_spinor[..., 1] * j[0]
    return (w / np.abs(w)) ** r


def coherent_wavefunction(rep: MasslessRep, z: MasslessLabel, sm: SmearingFunctions | None = None):
    """``xi -> Psi_z(xi)`` for future null ``xi`` (array ``(..., 4)``)."""
    sm = smearing_functions(rep) if sm is None else sm

    def psi(xi):
        xi = np.asarray(xi, dtype=float)
        s = _canonical_spinors(xi)
        nxi = 0.5 * sp.minkowski(z.I + z.J, xi)
        x = -sp.minkowski(z.I - z.J, xi) / sp.minkowski(z.I + z.J, xi)
        phase = np.exp(-1j * sp.minkowski(xi, z.X))
        return _helicity(s, z.j, rep.r) * phase * sm.sqrt_f(np.log(nxi)) * sm.amplitude_g(x)

    return psi


def _canonical_spinors(xi):
    xi = np.atleast_2d(xi)
    out = np.array([sp.section_spinor_unchecked(v) for v in xi])
    return out.reshape(np.shape(xi)[:-1] + (2,))


def frame_grid(sm: SmearingFunctions, n: int, nx: int | None = None):
    """Nodes ``(lam, x, phi)`` and weights for ``int e^{2 lam} dlam dx dphi`` in a label frame.

    The ``lam`` weights fold in the measure factor and undo the Hermite Gaussian.
    """
    t, wt = gauss_hermite(n)
    lam = sm.sigma * t
    wl = sm.sigma * wt * np.exp(t**2 + 2 * lam)
    nx = max(4, n // 4) if nx is None else nx
    x, wx = composite_legendre(sm.x_breaks, nx)
    nphi = max(8, n)
    phi = 2 * np.pi * np.arange(nphi) / nphi
    wphi = np.full(nphi, 2 * np.pi / nphi)
    return (lam, wl), (x, wx), (phi, wphi)


def _frame_spinors(lam, x, phi):
    """Spinors ``e^{lam/2} (sqrt((1+x)/2), sqrt((1-x)/2) e^{i phi})`` on the tensor grid."""
    L, Xg, P = np.meshgrid(lam, x, phi, indexing="ij")
    s0 = np.exp(L / 2) * np.sqrt((1 + Xg) / 2)
    s1 = np.exp(L / 2) * np.sqrt(np.clip(1 - Xg, 0, None) / 2) * np.exp(1j * P)
    return L, Xg, np.stack([s0, s1], axis=-1)


def _null_batch(s):
    return np.einsum("...a,mab,...b->...m", np.conj(s), sp.SIGMA, s).real


def _overlap_at(rep: MasslessRep, sm: SmearingFunctions, z1: MasslessLabel, z2: MasslessLabel, n: int) -> complex:
    (lam, wl), (x, wx), (phi, wphi) = frame_grid(sm, n)
    L, Xg, s = _frame_spinors(lam, x, phi)
    beta = np.linalg.solve(z2.alpha, z1.alpha)
    s2 = s @ beta.T
    xi2 = _null_batch(s2)
    lam2 = np.log(xi2[..., 0])
    x2 = xi2[..., 3] / xi2[..., 0]
    xi = _null_batch(s @ z1.alpha.T)
    dX = z2.X - z1.X
    amp1 = sm.sqrt_f(L) * sm.amplitude_g(Xg)
    amp2 = sm.sqrt_f(lam2) * sm.amplitude_g(np.clip(x2, -1, 1))
    hel = (s2[..., 0] / np.abs(s2[..., 0])) ** rep.r if rep.r else 1.0
    phase = np.exp(-1j * np.einsum("...m,m->...", xi, sp.ETA @ dX))
    W = wl[:, None, None] * wx[None, :, None] * wphi[None, None, :]
    return complex(np.sum(W * amp1 * amp2 * hel * phase))


def overlap(rep: MasslessRep, z1: MasslessLabel, z2: MasslessLabel, quad: QuadratureSpec = QuadratureSpec(48)) -> Estimate:
    """``<z1|z2>`` by tensor quadrature in the frame of ``z1``."""
    sm = smearing_functions(rep)
    est = doubled(lambda q: _overlap_at(rep, sm, z1, z2, q.nodes_per_axis), quad)
    if not np.isfinite(est.value):
        raise IntegrationError("non-finite massless overlap")
    return est


def norm(rep: MasslessRep, z: MasslessLabel, quad: QuadratureSpec = QuadratureSpec(48)) -> Estimate:
    return overlap(rep, z, z, quad)


def energy_expectation(rep: MasslessRep, n: int = 48) -> float:
    """``<n_R . xi>`` in the reference state."""
    sm = smearing_functions(rep)
    (lam, wl), (x, wx), (phi, wphi) = frame_grid(sm, n)
    rho = (sm.f(lam) * wl).sum() * (np.abs(sm.g(x)) / sm.abs_norm * wx).sum() * wphi.sum()
    mean = (sm.f(lam) * np.exp(lam) * wl).sum() * (np.abs(sm.g(x)) / sm.abs_norm * wx).sum() * wphi.sum()
    return float(mean / rho)


def mean_direction(rep: MasslessRep) -> float:
    """``<x>`` under ``|g|/Z``; the connection formula assumes it equals 1."""
    sm = smearing_functions(rep)
    x, wx = composite_legendre(sm.x_breaks, 24)
    return float(2 * np.pi * wx @ (x * np.abs(sm.g(x)) / sm.abs_norm))


# --- twistor variables -----------------------------------------------------


def _require_helicity(rep: MasslessRep):
    if rep.r == 0:
        raise ValueError("twistor variables need r != 0; use (X, I, J) labels")


def twistor_from_label(rep: MasslessRep, z: MasslessLabel):
    """``(iota, omega)`` with ``omega = j + (2i/r) y E iota*`` and ``Y = e^{sigma^2/4} X``."""
    _require_helicity(rep)
    y = sp.vector_to_matrix(rep.energy_factor * z.X)
    return z.iota, z.j + 2j / rep.r * (y @ E @ np.conj(z.iota))


def twistor_constraint(rep: MasslessRep, z: MasslessLabel) -> float:
    """``(iota eps omega + c.c.)/2``; identically 1."""
    iota, omega = twistor_from_label(rep, z)
    return float(sp.eps_product(iota, omega).real)


def twistor_residual(rep: MasslessRep, z: MasslessLabel) -> float:
    """Max norm of the symmetrised derivative of ``omega^B`` in ``Y``, from its exact linear dependence."""
    _require_helicity(rep)
    # d omega_B / dY^mu, exact because omega is affine in Y
    D = np.array([2j / rep.r * (sp.SIGMA[m] @ E @ np.conj(z.iota)) for m in range(4)])
    sig_up = np.einsum("mn,nab->mab", sp.ETA, sp.SIGMA).transpose(0, 2, 1)
    N = np.einsum("mpa,mb->pab", sig_up, D)
    N = np.einsum("ca,pab,db->pcd", E, N, E)
    return float(np.abs(N + N.transpose(0, 2, 1)).max() / 2)


def zeta_reduction(rep: MasslessRep, z: MasslessLabel):
    """``(iota, zeta, u)`` with ``zeta = omega + (2i/r) u j`` and ``u = I.Y``."""
    iota, omega = twistor_from_label(rep, z)
    u = float(sp.minkowski(z.I, rep.energy_factor * z.X))
    return iota, omega + 2j / rep.r * u * z.j, u


def zeta_fibre(rep: MasslessRep, z: MasslessLabel) -> tuple[float, complex]:
    """The label data that :func:`zeta_reduction` forgets: ``(J.Y/2, beta)``.

    ``beta`` is the complex ``m``-component of ``Y`` in ``y = 2a iota iota^+ + u j j^+ + beta iota j^+ + h.c.``
    """
    _require_helicity(rep)
    Y = rep.energy_factor * z.X
    y = sp.vector_to_matrix(Y)
    beta = sp.eps_product(z.j, y @ E @ np.conj(z.iota))
    return float(sp.minkowski(z.J, Y) / 2), complex(beta)


def label_from_zeta(rep: MasslessRep, iota, zeta, u: float, along_I: float = 0.0, beta: complex = 0j) -> MasslessLabel:
    """Inverse of :func:`zeta_reduction` on the fibre fixed by :func:`zeta_fibre`.

    Shifting ``beta`` moves ``j`` by ``(2i/r) beta iota`` and ``Y`` by the matching
    ``m``-vector; ``zeta`` does not see either, nor ``along_I``.
    """
    _require_helicity(rep)
    iota = np.asarray(iota, np.complex128)
    zeta = np.asarray(zeta, np.complex128)
    if abs(sp.eps_product(iota, zeta) - 1) > 1e-8:
        raise sp.SpinorError("need iota eps zeta = 1")
    j = zeta + 2j / rep.r * beta * iota
    y = (
        2 * along_I * np.outer(iota, np.conj(iota))
        + u * np.outer(j, np.conj(j))
        + beta * np.outer(iota, np.conj(j))
        + np.conj(beta) * np.outer(j, np.conj(iota))
    )
    Y = sp.matrix_to_vector(y)
    return MasslessLabel.from_alpha(np.stack([iota, j], axis=1), Y / rep.energy_factor)


# --- analytic geometry -----------------------------------------------------


def connection_analytic(rep: MasslessRep, z: MasslessLabel, dq) -> float:
    """``A = -I.dY - (i r/2)(iota eps dj - c.c.) = -I.dY + r Im(iota eps dj)``."""
    dq = np.asarray(dq, float)
    _, dj = spinor_increments(z, dq)
    return float(-rep.energy_factor * sp.minkowski(z.I, dq[:4]) + rep.r * sp.eps_product(z.iota, dj).imag)


def connection_exact(rep: MasslessRep, z: MasslessLabel, dq) -> float:
    """Connection with the exact mean momentum ``e^{sigma^2/4} Lambda (1, 0, 0, <x>)``."""
    dq = np.asarray(dq, float)
    _, dj = spinor_increments(z, dq)
    P = sp.sl2c_to_lorentz(z.alpha) @ (rep.energy_factor * np.array([1.0, 0, 0, mean_direction(rep)]))
    return float(-sp.minkowski(P, dq[:4]) + rep.r * sp.eps_product(z.iota, dj).imag)


def connection_twistor(rep: MasslessRep, z: MasslessLabel, dq) -> float:
    """``(i r/2)(iota eps d omega - c.c.)`` as written in twistor form."""
    _require_helicity(rep)
    dq = np.asarray(dq, float)
    di, dj = spinor_increments(z, dq)
    y = sp.vector_to_matrix(rep.energy_factor * z.X)
    dy = sp.vector_to_matrix(rep.energy_factor * dq[:4])
    domega = dj + 2j / rep.r * (dy @ E @ np.conj(z.iota) + y @ E @ np.conj(di))
    return float(-rep.r * sp.eps_product(z.iota, domega).imag)


def _domega(rep: MasslessRep, z: MasslessLabel, dq):
    di, dj = spinor_increments(z, dq)
    y = sp.vector_to_matrix(rep.energy_factor * z.X)
    dy = sp.vector_to_matrix(rep.energy_factor * np.asarray(dq, float)[:4])
    return di, dj + 2j / rep.r * (dy @ E @ np.conj(z.iota) + y @ E @ np.conj(di))


def symplectic_analytic(rep: MasslessRep, z: MasslessLabel, dq1, dq2) -> float:
    """``d`` of :func:`connection_analytic`.

    With ``r != 0`` this is evaluated in twistor form as
    ``r Im(d1 iota eps d2 omega - d2 iota eps d1 omega)``; for ``r = 0`` only
    the translation term ``-(dI ^ dY)`` survives.
    """
    dq1, dq2 = np.asarray(dq1, float), np.asarray(dq2, float)
    if rep.r == 0:
        _, dI1, _ = vector_increments(z, dq1)
        _, dI2, _ = vector_increments(z, dq2)
        k = rep.energy_factor
        return float(-k * (sp.minkowski(dI1, dq2[:4]) - sp.minkowski(dI2, dq1[:4])))
    di1, dw1 = _domega(rep, z, dq1)
    di2, dw2 = _domega(rep, z, dq2)
    return float(rep.r * (sp.eps_product(di1, dw2) - sp.eps_product(di2, dw1)).imag)


def symplectic_exact(rep: MasslessRep, z: MasslessLabel, dq1, dq2) -> float:
    """``d`` of :func:`connection_exact`.

    The exact mean momentum is ``k[(1+<x>) I + (1-<x>) J]/2``, so this adds
    ``-k (1-<x>)/2 (dJ - dI) ^ dX`` to :func:`symplectic_analytic`.
    """
    dq1, dq2 = np.asarray(dq1, float), np.asarray(dq2, float)
    _, dI1, dJ1 = vector_increments(z, dq1)
    _, dI2, dJ2 = vector_increments(z, dq2)
    c = -rep.energy_factor * (1 - mean_direction(rep)) / 2
    extra = c * (sp.minkowski(dJ1 - dI1, dq2[:4]) - sp.minkowski(dJ2 - dI2, dq1[:4]))
    return symplectic_analytic(rep, z, dq1, dq2) + float(extra)


def symplectic_literal(rep: MasslessRep, z: MasslessLabel, dq1, dq2) -> float:
    """``(i r/2)(d iota ^ eps d omega - c.c.)`` with the printed prefactor."""
    return -symplectic_analytic(rep, z, dq1, dq2)


# --- metric ----------------------------------------------------------------


@dataclass(frozen=True)
class MasslessCoefficients:
    c1: float
    c2: float
    c3: float
    F: float
    C: float | None
    smearing: str
    eps: float | None
    N: int | None
    errors: dict


def _moment(sm: SmearingFunctions, weight, breaks) -> tuple[float, float]:
    def integrand(x):
        return 2 * np.pi * weight(x)

    total, err = 0.0, 0.0
    for a, b in zip(breaks[:-1], breaks[1:]):
        val, e, info = sint.quad(integrand, a, b, limit=200, epsabs=1e-13, epsrel=1e-11, full_output=True)[:3]
        if not np.isfinite(val):
            raise IntegrationError(f"coefficient quadrature failed on [{a}, {b}]: {info}")
        total += val
        err += e
    return total, err


def massless_metric_coefficients(rep: MasslessRep) -> MasslessCoefficients:
    """``c1, c2, c3`` (moments of ``g'^2 / 4g``) and ``F = 2 pi int g (1-x)/(1+x)``."""
    sm = smearing_functions(rep)
    if sm.kind != "rational":
        raise IntegrationError("c1..c3 and F diverge for the Legendre smearing (g changes sign, g(-1) != 0)")
    g, dl = sm.g, sm.dlog_g
    breaks = sm.x_breaks
    # g'^2/(4g) = g dlog^2 / 4; the (1+x) factors are folded in to keep x -> -1 finite
    kern = lambda x: np.abs(g(x)) * dl(x) ** 2 / 4 * (1 - x)
    c1, e1 = _moment(sm, lambda x: kern(x) * (1 + x) ** 2 * (1 - x), breaks)
    c2, e2 = _moment(sm, lambda x: kern(x) * (1 + x) ** 3, breaks)
    c3, e3 = _moment(sm, lambda x: kern(x) * (1 + x) * (1 - x) ** 2, breaks)
    Fk = lambda x: sm.C / (2 * np.pi) * (1 - x) / ((1 - x) ** 2 + rep.eps**2)
    F, eF = _moment(sm, Fk, breaks)
    return MasslessCoefficients(c1, c2, c3, F, sm.C, sm.kind, rep.eps, None, {"c1": e1, "c2": e2, "c3": e3, "F": eF})


def rational_asymptotics(eps: float) -> dict:
    """Leading forms ``c1 ~ 4``, ``c2 ~ 8/eps``, ``c3 = O(eps)``, ``F ~ (eps/pi) log(2/eps)``."""
    return {"c1": 4.0, "c2": 8.0 / eps, "F": eps / np.pi * np.log(2 / eps)}


def _jej(z: MasslessLabel, dq) -> complex:
    _, dj = spinor_increments(z, dq)
    return complex(sp.eps_product(z.j, dj))


def metric_analytic(rep: MasslessRep, z: MasslessLabel, dq, coeffs: MasslessCoefficients | None = None) -> float:
    coeffs = massless_metric_coefficients(rep) if coeffs is None else coeffs
    dX, dI, dJ = vector_increments(z, dq)
    s2 = rep.sigma**2
    mk = sp.minkowski
    return float(
        (np.exp(s2) - np.exp(s2 / 2)) * mk(z.I, dX) ** 2
        + 0.25 * (1 + 1 / (2 * s2) + 3 * coeffs.c1) * mk(z.I, dJ) ** 2
        - 0.5 * (coeffs.c2 / 4 + 1) * mk(dI, dI)
        - coeffs.c3 / 8 * mk(dJ, dJ)
        + (coeffs.c1 / 4 - 1) * mk(dI, dJ)
        + rep.r**2 / 2 * coeffs.F * abs(_jej(z, dq)) ** 2
    )


def metric_leading(rep: MasslessRep, z: MasslessLabel, dq) -> float:
    """Leading metric with the coupling ``eps = 8 sigma^2``."""
    dX, dI, _ = vector_increments(z, dq)
    s2 = rep.sigma**2
    mk = sp.minkowski
    return float(
        s2 / 2 * mk(z.I, dX) ** 2
        + (mk(z.J, dI) ** 2 - mk(dI, dI)) / (8 * s2)
        + rep.r**2 * 8 * s2 / np.pi * np.log(1 / (2 * rep.sigma)) * abs(_jej(z, dq)) ** 2
    )


def spin_sector_coefficient(rep: MasslessRep) -> float:
    """Coefficient of ``|j eps dj|^2`` in :func:`metric_leading`."""
    return float(rep.r**2 * 8 * rep.sigma**2 / np.pi * np.log(1 / (2 * rep.sigma)))


# --- covariance ------------------------------------------------------------


def transform_label(z: MasslessLabel, alpha=None, translation=None) -> MasslessLabel:
    """Lorentz action ``(iota, j) -> (alpha iota, alpha j)``; translation ``X -> X + C``."""
    X = z.X
    beta = z.alpha
    if alpha is not None:
        alpha = sp.check_sl2c(alpha)
        X = sp.sl2c_to_lorentz(alpha) @ X
        beta = alpha @ beta
    if translation is not None:
        X = X + np.asarray(translation, float)
    return MasslessLabel.from_alpha(beta, X)
