"""Quadrature rules and reproducible Monte-Carlo integration.

Every integral returns an :class:`Estimate` carrying its own error bar.
Quadrature errors come from node doubling; Monte-Carlo errors from batch
means.  Random numbers come from a counter-based Philox stream keyed by
``(seed, batch index)``, so a result depends only on the seed and the sample
count, never on how the work is scheduled.
"""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np
from numpy.polynomial.hermite import hermgauss
from numpy.polynomial.legendre import leggauss


class IntegrationError(RuntimeError):
    """Raised when an integral cannot be evaluated to the requested budget."""


@dataclass(frozen=True)
class Estimate:
    value: complex | float
    error: float
    method: str = "quadrature"

    def __iter__(self):
        yield self.value
        yield self.error

    def __complex__(self):
        return complex(self.value)

    def __float__(self):
        return float(np.real(self.value))


@dataclass(frozen=True)
class QuadratureSpec:
    """Tensor-grid quadrature budget.

    ``nodes_per_axis`` is the fine resolution; the error estimate compares it
    with a grid of half the node count.
    """
    nodes_per_axis: int = 64
    cutoff_sigmas: float = 8.0
    subdivision_depth: int = 6
    target_tol: float = 1e-8

    def __post_init__(self):
        if self.nodes_per_axis < 2:
            raise ValueError("nodes_per_axis must be at least 2")
        if self.cutoff_sigmas <= 0 or self.target_tol <= 0:
            raise ValueError("cutoff_sigmas and target_tol must be positive")
        if self.subdivision_depth < 0:
            raise ValueError("subdivision_depth must be non-negative")

    def coarse(self) -> "QuadratureSpec":
        return QuadratureSpec(
            max(2, self.nodes_per_axis // 2), self.cutoff_sigmas, self.subdivision_depth, self.target_tol
        )


@dataclass(frozen=True)
class MCConfig:
    seed: int = 0
    samples: int = 100_000
    widths: tuple[float, ...] = ()
    batch_size: int = 1 << 14

    def __post_init__(self):
        if self.samples < 1:
            raise ValueError("samples must be positive")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        if any(w <= 0 for w in self.widths):
            raise ValueError("proposal widths must be positive")


@lru_cache(maxsize=None)
def gauss_hermite(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights for ``int exp(-t^2) h(t) dt``."""
    return hermgauss(n)


@lru_cache(maxsize=None)
def gauss_legendre(n: int) -> tuple[np.ndarray, np.ndarray]:
    return leggauss(n)


def composite_legendre(breaks: Sequence[float], n: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre rule with ``n`` nodes on each interval between ``breaks``."""
    t, w = gauss_legendre(n)
    nodes, weights = [], []
    for a, b in zip(breaks[:-1], breaks[1:]):
        h = 0.5 * (b - a)
        nodes.append(a + h * (t + 1))
        weights.append(h * w)
    return np.concatenate(nodes), np.concatenate(weights)


def graded_breaks(length: float, finest: float, depth: int) -> np.ndarray:
    """Breakpoints on ``[0, length]`` refined geometrically towards 0."""
    if depth == 0 or finest >= length:
        return np.array([0.0, length])
    ratio = (finest / length) ** (1.0 / depth)
    inner = length * ratio ** np.arange(depth, -1, -1)
    return np.concatenate([[0.0], inner])


def hermite_grid_3d(n: int, scale: float) -> tuple[np.ndarray, np.ndarray]:
    """Points ``scale * t`` and weights for ``int d^3 p F(p)`` where F ~ exp(-|p|^2/scale^2).

    The returned weights include ``scale^3 exp(|t|^2)`` so that the sum of
    ``weights * F(points)`` approximates the plain integral.
    """
    t, w = gauss_hermite(n)
    tx, ty, tz = np.meshgrid(t, t, t, indexing="ij")
    pts = scale * np.stack([tx.ravel(), ty.ravel(), tz.ravel()], axis=-1)
    logw = (
        np.log(w)[:, None, None] + np.log(w)[None, :, None] + np.log(w)[None, None, :]
    ).ravel() + (tx**2 + ty**2 + tz**2).ravel()
    return pts, scale**3 * np.exp(logw)


def doubled(rule: Callable[[QuadratureSpec], complex], quad: QuadratureSpec) -> Estimate:
    """Evaluate ``rule`` at the fine and half resolution; error = their difference."""
    fine = rule(quad)
    coarse = rule(quad.coarse())
    err = abs(fine - coarse)
    return Estimate(fine, float(err) + 1e-15 * abs(fine), "quadrature")


def thread_cap() -> int:
    """Worker cap from ``PCS_THREADS`` (numpy work here runs in one process)."""
    try:
        return max(1, int(os.environ.get("PCS_THREADS", "1")))
    except ValueError:
        return 1


# --- Monte Carlo -----------------------------------------------------------


def batch_generator(seed: int, batch: int) -> np.random.Generator:
    """Independent Philox stream for one batch, keyed by (seed, batch)."""
    return np.random.Generator(np.random.Philox(key=seed, counter=[0, 0, batch, 0]))


@dataclass(frozen=True)
class GaussianProposal:
    mean: np.ndarray
    widths: np.ndarray

    @property
    def dim(self) -> int:
        return len(self.mean)

    def sample(self, rng: np.random.Generator, n: int):
        z = rng.standard_normal((n, self.dim))
        x = np.asarray(self.mean) + z * np.asarray(self.widths)
        logp = -0.5 * (z**2).sum(axis=1) - np.log(np.asarray(self.widths)).sum() - 0.5 * self.dim * np.log(2 * np.pi)
        return x, np.exp(logp)


@dataclass(frozen=True)
class UniformBox:
    lo: np.ndarray
    hi: np.ndarray

    @property
    def dim(self) -> int:
        return len(self.lo)

    def sample(self, rng: np.random.Generator, n: int):
        lo, hi = np.asarray(self.lo, float), np.asarray(self.hi, float)
        x = lo + (hi - lo) * rng.random((n, self.dim))
        return x, np.full(n, 1.0 / np.prod(hi - lo))


@dataclass(frozen=True)
class SphereUniform:
    """Uniform directions on the unit 2-sphere (3 coordinates, density 1/4pi)."""

    dim: int = 3

    def sample(self, rng: np.random.Generator, n: int):
        v = rng.standard_normal((n, 3))
        v /= np.linalg.norm(v, axis=1, keepdims=True)
        return v, np.full(n, 1.0 / (4 * np.pi))


@dataclass(frozen=True)
class ProductDomain:
    parts: tuple = field(default_factory=tuple)

    @property
    def dim(self) -> int:
        return sum(p.dim for p in self.parts)

    def sample(self, rng: np.random.Generator, n: int):
        xs, dens = [], np.ones(n)
        for p in self.parts:
            x, d = p.sample(rng, n)
            xs.append(x)
            dens = dens * d
        return np.concatenate(xs, axis=1), dens


def mc_integrate(integrand: Callable[[np.ndarray], np.ndarray], domain, mc: MCConfig) -> Estimate:
    """Importance-sampled integral of ``integrand`` over the support of ``domain``.

    ``integrand`` maps an ``(n, dim)`` array of points to ``n`` values (real
    or complex).  The error is the standard error of the batch means.
    """
    nbatch = -(-mc.samples // mc.batch_size)

    def one(b):
        n = min(mc.batch_size, mc.samples - b * mc.batch_size)
        x, dens = domain.sample(batch_generator(mc.seed, b), n)
        vals = np.asarray(integrand(x)) / dens
        bad = ~np.isfinite(vals)
        if np.any(bad):
            k = int(np.argmax(bad))
            raise IntegrationError(f"non-finite integrand at sample {b * mc.batch_size + k}: {x[k]}")
        return vals.sum(), (np.abs(vals) ** 2).sum(), n

    workers = min(thread_cap(), nbatch)
    if workers > 1:
        # map preserves batch order, so the reduction below is deterministic
        with ThreadPoolExecutor(workers) as pool:
            parts = list(pool.map(one, range(nbatch)))
    else:
        parts = [one(b) for b in range(nbatch)]
    sums, sumsq, counts = (list(t) for t in zip(*parts))
    sums = np.array(sums)
    counts = np.array(counts, dtype=float)
    mean = sums.sum() / counts.sum()
    if nbatch >= 8:
        means = sums / counts
        # unequal last batch: weight by counts
        var = (counts * np.abs(means - mean) ** 2).sum() / (counts.sum() * (nbatch - 1))
        err = float(np.sqrt(var))
    else:
        total = counts.sum()
        var = max(0.0, (np.sum(sumsq) - total * abs(mean) ** 2) / max(1.0, total - 1))
        err = float(np.sqrt(var / total))
    return Estimate(mean if np.iscomplexobj(mean) else float(mean), err, "mc")
