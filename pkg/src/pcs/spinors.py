"""Two-component spinor calculus on Minkowski space.

Signature is (+,-,-,-).  Four-vectors are real arrays of shape ``(..., 4)``,
spinors complex arrays of shape ``(..., 2)`` and SL(2,C) elements complex
``(2, 2)`` arrays.  Most maps broadcast over leading axes so that they can be
evaluated on whole quadrature grids at once.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

ETA = np.diag([1.0, -1.0, -1.0, -1.0])

SIGMA = np.array(
    [
        [[1, 0], [0, 1]],
        [[0, 1], [1, 0]],
        [[0, -1j], [1j, 0]],
        [[1, 0], [0, -1]],
    ],
    dtype=np.complex128,
)

#: Relative threshold on ``(I0 + I3) / I0`` below which the canonical section
#: is replaced by its conventional value at the south pole.
SECTION_DELTA = 1e-8

REFERENCE_TIME = np.array([1.0, 0.0, 0.0, 0.0])


class SpinorError(ValueError):
    """Raised for inputs outside the domain of a spinor map."""


def minkowski(x, y):
    """Minkowski product ``x . y`` over the last axis."""
    x = np.asarray(x)
    y = np.asarray(y)
    return x[..., 0] * y[..., 0] - x[..., 1] * y[..., 1] - x[..., 2] * y[..., 2] - x[..., 3] * y[..., 3]


def lower(x):
    return np.asarray(x) * np.array([1.0, -1.0, -1.0, -1.0])


def eps_product(c, d):
    """Antisymmetric SL(2,C)-invariant product ``c0 d1 - c1 d0``."""
    c = np.asarray(c)
    d = np.asarray(d)
    return c[..., 0] * d[..., 1] - c[..., 1] * d[..., 0]


def levi_civita() -> np.ndarray:
    """Totally antisymmetric symbol with lower indices, ``eps_0123 = +1``."""
    eps = np.zeros((4, 4, 4, 4))
    for perm in np.array(np.meshgrid(*[range(4)] * 4, indexing="ij")).reshape(4, -1).T:
        if len(set(perm)) == 4:
            p = list(perm)
            sign = 1
            for i in range(4):
                while p[i] != i:
                    j = p[i]
                    p[i], p[j] = p[j], p[i]
                    sign = -sign
            eps[tuple(perm)] = sign
    return eps


EPS_LOWER = levi_civita()
# raising all four indices with eta flips the sign
EPS_UPPER = -EPS_LOWER


def vector_to_matrix(X):
    """Hermitian matrix ``X^mu sigma_mu``; its determinant is ``X . X``."""
    X = np.asarray(X, dtype=float)
    return np.einsum("...m,mab->...ab", X.astype(np.complex128), SIGMA)


def matrix_to_vector(x, tol: float = 1e-10):
    """Inverse of :func:`vector_to_matrix` for hermitian input."""
    x = np.asarray(x, dtype=np.complex128)
    herm = np.abs(x - np.conj(np.swapaxes(x, -1, -2))).max(initial=0.0)
    if herm > tol * max(1.0, np.abs(x).max(initial=0.0)):
        raise SpinorError(f"matrix is not hermitian (residual {herm:.3e})")
    return 0.5 * np.einsum("mba,...ab->...m", SIGMA, x).real


def null_from_spinor(c):
    """Future null vector ``c^dagger sigma^mu c`` of a non-zero spinor."""
    c = np.asarray(c, dtype=np.complex128)
    if np.any(np.abs(c).sum(axis=-1) == 0):
        raise SpinorError("zero spinor has no null vector")
    return np.einsum("...a,mab,...b->...m", np.conj(c), SIGMA, c).real


def _canonical_section(I):
    I = np.asarray(I, dtype=float)
    s = I[..., 0] + I[..., 3]
    singular = s < SECTION_DELTA * I[..., 0]
    s_safe = np.where(singular, 1.0, s)
    c0 = np.sqrt(s_safe / 2)
    c1 = (I[..., 1] + 1j * I[..., 2]) / np.sqrt(2 * s_safe)
    out = np.stack([c0 + 0j, c1], axis=-1)
    if np.any(singular):
        south = np.stack([np.zeros_like(s) + 0j, np.sqrt(I[..., 0]) + 0j], axis=-1)
        out = np.where(singular[..., None], south, out)
    return out


def spinor_from_null(I, tol: float = 1e-10):
    """Canonical-section spinor of a future null vector.

    ``(sqrt((I0+I3)/2), (I1 + i I2)/sqrt(2 (I0+I3)))``, with the value
    ``(0, sqrt(I0))`` on the direction where the section is undefined.
    """
    I = np.asarray(I, dtype=float)
    scale = np.maximum(np.abs(I).max(axis=-1), 1e-300)
    if np.any(np.abs(minkowski(I, I)) > tol * scale**2):
        raise SpinorError("vector is not null")
    if np.any(I[..., 0] <= 0):
        raise SpinorError("vector is not future pointing")
    return _canonical_section(I)


def section_spinor_unchecked(I):
    """:func:`spinor_from_null` without validation, for quadrature grids."""
    return _canonical_section(I)


def section_spinor_derivative(I, dI):
    """Directional derivative of the canonical section along ``dI``."""
    I = np.asarray(I, dtype=float)
    dI = np.asarray(dI, dtype=float)
    s = I[..., 0] + I[..., 3]
    ds = dI[..., 0] + dI[..., 3]
    w = I[..., 1] + 1j * I[..., 2]
    dw = dI[..., 1] + 1j * dI[..., 2]
    d0 = ds / (2 * np.sqrt(2 * s))
    d1 = dw / np.sqrt(2 * s) - w * ds / (2 * s * np.sqrt(2 * s))
    return np.stack([d0 + 0j, d1], axis=-1)


def det2(a):
    a = np.asarray(a)
    return a[..., 0, 0] * a[..., 1, 1] - a[..., 0, 1] * a[..., 1, 0]


def check_sl2c(alpha, tol: float = 1e-10) -> np.ndarray:
    alpha = np.asarray(alpha, dtype=np.complex128)
    if alpha.shape[-2:] != (2, 2):
        raise SpinorError(f"expected a 2x2 matrix, got shape {alpha.shape}")
    if np.any(np.abs(det2(alpha) - 1) > tol):
        raise SpinorError(f"determinant {det2(alpha)} is not 1")
    return alpha


def sl2c_to_lorentz(alpha) -> np.ndarray:
    """Proper orthochronous Lorentz matrix of ``alpha``.

    Column ``nu`` is the vector of ``alpha sigma_nu alpha^dagger``.
    """
    alpha = check_sl2c(alpha)
    adj = np.einsum("...ab,nbc,...dc->...nad", alpha, SIGMA, np.conj(alpha))
    return np.swapaxes(matrix_to_vector(adj), -1, -2)


def boost_spinor_matrix(I, tol: float = 1e-10) -> np.ndarray:
    """Hermitian positive square root ``(1 + I~)/sqrt(2 (1 + I0))`` of ``I~``."""
    I = np.asarray(I, dtype=float)
    if abs(minkowski(I, I) - 1) > tol * max(1.0, I[0] ** 2):
        raise SpinorError("boost target must satisfy I.I = 1")
    if I[0] <= 0:
        raise SpinorError("boost target must be future pointing")
    return boost_unchecked(I)


def boost_unchecked(I):
    I = np.asarray(I, dtype=float)
    return (np.eye(2) + vector_to_matrix(I)) / np.sqrt(2 * (1 + I[..., 0]))[..., None, None]


def boost_derivative(I, dI):
    """Directional derivative of :func:`boost_unchecked` (``dI`` tangent to I.I = 1)."""
    I = np.asarray(I, dtype=float)
    dI = np.asarray(dI, dtype=float)
    k = 2 * (1 + I[..., 0])
    return vector_to_matrix(dI) / np.sqrt(k) - (np.eye(2) + vector_to_matrix(I)) * dI[..., 0] / k ** 1.5


def literal_boost_matrix(I) -> np.ndarray:
    """``delta + (n - I)(n - I)_lower / (I0 - 1)`` evaluated as written.

    Kept for the self-test: this matrix maps ``n`` to ``I`` but has
    determinant -1, so it is never used as a boost.
    """
    I = np.asarray(I, dtype=float)
    v = REFERENCE_TIME - I
    return np.eye(4) + np.outer(v, lower(v)) / (I[0] - 1)


def polar_decompose(alpha):
    """``alpha = omega u`` with ``omega = sqrt(alpha alpha^dagger)`` and ``u`` unitary."""
    alpha = check_sl2c(alpha)
    h = alpha @ np.conj(alpha.T)
    # for a positive 2x2 matrix with det 1: sqrt(h) = (h + 1)/sqrt(tr h + 2)
    omega = (h + np.eye(2)) / np.sqrt(np.trace(h).real + 2)
    u = np.linalg.solve(omega, alpha)
    return omega, u


def spinor_matrix_inverse(alpha):
    """Inverse of a unimodular 2x2 matrix (adjugate), broadcasting."""
    a = np.asarray(alpha)
    out = np.empty_like(a)
    out[..., 0, 0] = a[..., 1, 1]
    out[..., 1, 1] = a[..., 0, 0]
    out[..., 0, 1] = -a[..., 0, 1]
    out[..., 1, 0] = -a[..., 1, 0]
    return out / det2(a)[..., None, None]


@dataclass(frozen=True)
class NullTetrad:
    I: np.ndarray
    J: np.ndarray
    m1: np.ndarray
    m2: np.ndarray
    iota: np.ndarray
    j: np.ndarray

    def completeness_residual(self) -> float:
        rhs = (
            0.5 * (np.outer(self.I, self.J) + np.outer(self.J, self.I))
            - np.outer(self.m1, self.m1)
            - np.outer(self.m2, self.m2)
        )
        return float(np.abs(ETA - rhs).max())

    def orientation_residual(self) -> float:
        lhs = np.outer(self.m1, self.m2) - np.outer(self.m2, self.m1)
        rhs = 0.5 * np.einsum("mnrs,r,s->mn", EPS_UPPER, lower(self.I), lower(self.J))
        return float(np.abs(lhs - rhs).max())

    def orthonormality_residual(self) -> float:
        vecs = [self.I, self.J, self.m1, self.m2]
        gram = np.array([[minkowski(a, b) for b in vecs] for a in vecs])
        target = np.zeros((4, 4))
        target[0, 1] = target[1, 0] = 2.0
        target[2, 2] = target[3, 3] = -1.0
        return float(np.abs(gram - target).max())


def tetrad_from_spinors(iota, j, tol: float = 1e-10) -> NullTetrad:
    """Orthonormal null tetrad of a spinor pair normalised by ``iota eps j = 1``."""
    iota = np.asarray(iota, dtype=np.complex128)
    j = np.asarray(j, dtype=np.complex128)
    if abs(eps_product(iota, j) - 1) > tol:
        raise SpinorError(f"iota eps j = {eps_product(iota, j)} must equal 1")
    mixed = np.einsum("a,mab,b->m", np.conj(iota), SIGMA, j)
    mixed_t = np.einsum("a,mab,b->m", np.conj(j), SIGMA, iota)
    return NullTetrad(
        I=null_from_spinor(iota),
        J=null_from_spinor(j),
        m1=(0.5 * (mixed + mixed_t)).real,
        m2=((mixed - mixed_t) / 2j).real,
        iota=iota,
        j=j,
    )


def random_sl2c(rng: np.random.Generator, scale: float = 1.0) -> np.ndarray:
    """Random unimodular matrix; ``scale`` sets the typical rapidity."""
    m = scale * (rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))) / 2
    m = m - np.trace(m) / 2 * np.eye(2)
    # exp of a traceless matrix: cosh(q) 1 + sinh(q)/q m with q^2 = -det m
    q = np.sqrt(-det2(m) + 0j)
    sinhc = np.sinh(q) / q if abs(q) > 1e-12 else 1.0
    return np.cosh(q) * np.eye(2) + sinhc * m


def random_unit_timelike(rng: np.random.Generator, rapidity: float = 1.0) -> np.ndarray:
    p = rapidity * rng.standard_normal(3)
    return np.concatenate([[np.sqrt(1 + p @ p)], p])


def random_null(rng: np.random.Generator) -> np.ndarray:
    d = rng.standard_normal(3)
    e = np.exp(rng.uniform(-1, 1))
    return e * np.concatenate([[1.0], d / np.linalg.norm(d)])
