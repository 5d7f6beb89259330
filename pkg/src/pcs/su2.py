"""Symmetric-power representations of SL(2,C) and SU(2) coherent states.

``r`` is twice the spin; the carrier space has dimension ``r + 1``.  The basis
is the orthonormal monomial basis ``sqrt(binom(r, k)) c0^(r-k) c1^k`` with the
highest-weight vector first, so that the coherent vector of a spinor ``c`` is
``|c>_r = (sqrt(binom(r,k)) c0^(r-k) c1^k)_k`` and ``<c|d>_r = (c^dagger d)^r``.
"""
from __future__ import annotations

from math import comb

import numpy as np

from .spinors import SpinorError, check_sl2c, section_spinor_unchecked


def _check_r(r: int) -> int:
    if int(r) != r or r < 0:
        raise ValueError(f"spin label r must be a non-negative integer, got {r!r}")
    return int(r)


def rep_matrix(alpha, r: int) -> np.ndarray:
    """``D^(r)(alpha)``, the r-th symmetric power of ``alpha``.

    Defined through ``D(alpha)|c>_r = |alpha c>_r``; ``D^(1)`` is ``alpha``.
    """
    r = _check_r(r)
    a, b, c, e = check_sl2c(alpha).ravel()
    binom = np.array([comb(r, k) for k in range(r + 1)], dtype=float)
    D = np.zeros((r + 1, r + 1), dtype=np.complex128)
    for j in range(r + 1):
        # coefficients in t = c1/c0 of (a + b t)^(r-j) (c + e t)^j
        poly = np.array([1.0 + 0j])
        for _ in range(r - j):
            poly = np.convolve(poly, [a, b])
        for _ in range(j):
            poly = np.convolve(poly, [c, e])
        D[j] = np.sqrt(binom[j] / binom) * poly
    return D


def coherent_vector(c, r: int):
    """``|c>_r`` for a spinor (or array of spinors) ``c``; not normalised."""
    r = _check_r(r)
    c = np.asarray(c, dtype=np.complex128)
    k = np.arange(r + 1)
    binom = np.sqrt(np.array([comb(r, int(i)) for i in k], dtype=float))
    return binom * c[..., :1] ** (r - k) * c[..., 1:] ** k


def highest_weight_overlap(beta, r: int, tol: float = 1e-11) -> complex:
    """``<0|D^(r)(beta)|0>``, asserted equal to ``beta_00^r``."""
    beta = np.asarray(beta, dtype=np.complex128)
    val = complex(rep_matrix(beta, r)[0, 0])
    expected = complex(beta[0, 0]) ** r
    if abs(val - expected) > tol * max(1.0, abs(expected)):
        raise AssertionError(f"highest-weight identity violated: {val} vs {expected}")
    return val


def rotation_to(m) -> np.ndarray:
    """SU(2) element rotating z to ``m`` about ``z x m``.

    At ``m = -z`` the rotation by pi about x is used.
    """
    m = _unit(m)
    s = section_spinor_unchecked(np.concatenate([[1.0], m]))
    if m[2] + 1 < 1e-8:
        return np.array([[0, -1j], [-1j, 0]])
    # first column is the section spinor of (1, m); second fixed by unitarity
    return np.array([[s[0], -np.conj(s[1])], [s[1], np.conj(s[0])]])


def spin_spinor(m) -> np.ndarray:
    """Unit spinor ``u(m) (1, 0)`` representing the direction ``m``."""
    return rotation_to(m)[:, 0]


def su2_coherent(m, r: int) -> np.ndarray:
    """``|m>_r = D^(r)(u(m)) |0>_r``."""
    return coherent_vector(spin_spinor(m), r)


def su2_overlap(m1, m2, r: int) -> complex:
    """``<m1|m2>_r = (m1~^dagger m2~)^r``."""
    r = _check_r(r)
    return complex(np.vdot(spin_spinor(m1), spin_spinor(m2)) ** r)


def _unit(m, tol: float = 1e-10) -> np.ndarray:
    m = np.asarray(m, dtype=float)
    if m.shape != (3,) or abs(np.linalg.norm(m) - 1) > tol:
        raise SpinorError(f"spin direction must be a unit 3-vector, got {m}")
    return m
