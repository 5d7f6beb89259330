"""Numerical geometry oracles built only from overlaps.

With ``i A = <z|dz>`` the connection is the phase rate of ``<z|z + delta v>``,
the metric is the decay rate of ``|<z|z + delta v>|^2`` and the symplectic form
is the Berry flux around a small plaquette.  None of these differentiate a
wavefunction, so they are independent of the closed forms in
:mod:`pcs.massive` and :mod:`pcs.massless`.

Every finite difference is centred (error ``O(delta^2)``) and combined over
the step sequence by Richardson extrapolation with order 2.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import massive, massless
from .integrate import Estimate, IntegrationError, QuadratureSpec, mc_integrate  # noqa: F401

DEFAULT_STEPS = (1e-2, 5e-3, 2.5e-3)
PHASE_LIMIT = np.pi / 2


class PhaseWrapError(IntegrationError):
    """Overlap phase too close to +-pi for reliable unwrapping."""


def _module(rep):
    if isinstance(rep, massive.MassiveRep):
        return massive
    if isinstance(rep, massless.MasslessRep):
        return massless
    raise TypeError(f"unsupported representation {type(rep).__name__}")


def default_quad(rep) -> QuadratureSpec:
    return QuadratureSpec(32) if isinstance(rep, massive.MassiveRep) else QuadratureSpec(40)


def overlap(rep, z1, z2, quad: QuadratureSpec | None = None) -> Estimate:
    """``<z1|z2>`` for either family, with its node-doubling error."""
    quad = default_quad(rep) if quad is None else quad
    return _module(rep).overlap(rep, z1, z2, quad)


def _normalised(rep, z1, z2, quad, norms) -> tuple[complex, float]:
    est = overlap(rep, z1, z2, quad)
    n1 = norms(z1)
    n2 = norms(z2)
    return complex(est.value) / np.sqrt(n1 * n2), est.error


def _norm_cache(rep, quad):
    # keep the label alive with its norm so its id cannot be recycled
    cache: dict[int, tuple[object, float]] = {}

    def norms(z):
        key = id(z)
        if key not in cache:
            cache[key] = (z, float(np.real(overlap(rep, z, z, quad).value)))
        return cache[key][1]

    return norms


def _phase(w: complex, delta: float) -> float:
    a = float(np.angle(w))
    if abs(a) > PHASE_LIMIT:
        raise PhaseWrapError(f"overlap phase {a:.3f} near the branch cut at delta={delta:g}; use a smaller --delta")
    return a


def richardson(values: Sequence[float], steps: Sequence[float], order: float = 2.0) -> tuple[float, float]:
    """Extrapolate the last two values to zero step; error from the previous pair."""
    v = np.asarray(values, dtype=float)
    h = np.asarray(steps, dtype=float)
    if len(v) == 1:
        return float(v[0]), float("nan")

    def pair(i):
        t = (h[i - 1] / h[i]) ** order
        return (t * v[i] - v[i - 1]) / (t - 1)

    best = pair(len(v) - 1)
    err = abs(best - pair(len(v) - 2)) if len(v) > 2 else abs(best - v[-1])
    return float(best), float(err)


def convergence_order(values: Sequence[float], steps: Sequence[float]) -> float:
    """Observed order ``p`` from three values on a geometric step sequence."""
    v = np.asarray(values, dtype=float)
    h = np.asarray(steps, dtype=float)
    if len(v) < 3:
        return float("nan")
    d1, d2 = v[0] - v[1], v[1] - v[2]
    if d2 == 0 or d1 / d2 <= 0:
        return float("inf") if d2 == 0 else float("nan")
    return float(np.log(d1 / d2) / np.log(h[0] / h[1]))


@dataclass
class FDResult:
    value: float
    error: float
    raw: list[float]
    steps: list[float]
    order: float

    @property
    def estimate(self) -> Estimate:
        return Estimate(self.value, self.error, "finite-difference")


def _extrapolate(raw, steps, quad_error) -> FDResult:
    value, err = richardson(raw, steps)
    return FDResult(value, float(err + quad_error), list(map(float, raw)), list(map(float, steps)), convergence_order(raw, steps))


def connection_numeric(rep, z, direction, quad: QuadratureSpec | None = None, steps=DEFAULT_STEPS) -> FDResult:
    """``A(direction)`` from ``[arg<z|z+h v> - arg<z|z-h v>] / 2h``."""
    quad = default_quad(rep) if quad is None else quad
    norms = _norm_cache(rep, quad)
    raw, qerr = [], 0.0
    for h in steps:
        wp, ep = _normalised(rep, z, z.shifted(direction, h), quad, norms)
        wm, em = _normalised(rep, z, z.shifted(direction, -h), quad, norms)
        raw.append((_phase(wp, h) - _phase(wm, h)) / (2 * h))
        qerr = max(qerr, (ep + em) / (2 * h))
    return _extrapolate(raw, steps, qerr)


def _decay(rep, z, v, h, quad, norms):
    wp, ep = _normalised(rep, z, z.shifted(v, h), quad, norms)
    wm, em = _normalised(rep, z, z.shifted(v, -h), quad, norms)
    return (2 - abs(wp) ** 2 - abs(wm) ** 2) / (2 * h * h), (ep + em) / (h * h)


def metric_numeric(rep, z, dir1, dir2=None, quad: QuadratureSpec | None = None, steps=DEFAULT_STEPS) -> FDResult:
    """``g(dir1, dir2)`` by polarisation of ``1 - |<z|z + h v>|^2 = h^2 g(v, v) + ...``."""
    quad = default_quad(rep) if quad is None else quad
    norms = _norm_cache(rep, quad)
    d1 = np.asarray(dir1, float)
    d2 = d1 if dir2 is None else np.asarray(dir2, float)
    raw, qerr = [], 0.0
    for h in steps:
        if dir2 is None:
            val, e = _decay(rep, z, d1, h, quad, norms)
        else:
            gp, ep = _decay(rep, z, d1 + d2, h, quad, norms)
            gm, em = _decay(rep, z, d1 - d2, h, quad, norms)
            val, e = (gp - gm) / 4, (ep + em) / 4
        raw.append(val)
        qerr = max(qerr, e)
    return _extrapolate(raw, steps, qerr)


def plaquette_flux(rep, z, dir1, dir2, h: float, quad: QuadratureSpec | None = None) -> tuple[float, float]:
    """Berry phase around the square of side ``2h`` centred at ``z``; error from quadrature."""
    quad = default_quad(rep) if quad is None else quad
    d1, d2 = np.asarray(dir1, float), np.asarray(dir2, float)
    corners = [z.shifted(a * d1 + b * d2, h) for a, b in ((-1, -1), (1, -1), (1, 1), (-1, 1))]
    prod, err = 1.0 + 0j, 0.0
    for p, q in zip(corners, corners[1:] + corners[:1]):
        est = overlap(rep, p, q, quad)
        w = complex(est.value)
        prod *= w / abs(w)
        err += est.error / abs(w)
    a = float(np.angle(prod))
    if abs(a) > PHASE_LIMIT:
        raise PhaseWrapError(f"plaquette phase {a:.3f} near the branch cut at h={h:g}; use a smaller --delta")
    return a, err


def symplectic_numeric(rep, z, dir1, dir2, quad: QuadratureSpec | None = None, steps=DEFAULT_STEPS) -> FDResult:
    """``Omega(dir1, dir2)``: plaquette flux divided by its area, the discrete curl of the numeric connection."""
    raw, qerr = [], 0.0
    for h in steps:
        a, e = plaquette_flux(rep, z, dir1, dir2, h, quad)
        raw.append(a / (4 * h * h))
        qerr = max(qerr, e / (4 * h * h))
    return _extrapolate(raw, steps, qerr)


def cube_closure(rep, z, d1, d2, d3, h: float, quad: QuadratureSpec | None = None) -> float:
    """Total outward Berry flux through a cube of side ``2h``; zero for a closed ``Omega``."""
    quad = default_quad(rep) if quad is None else quad
    d = [np.asarray(v, float) for v in (d1, d2, d3)]
    total = 0.0
    for axis in range(3):
        u, w = d[(axis + 1) % 3], d[(axis + 2) % 3]
        for sign in (1, -1):
            centre = z.shifted(sign * d[axis], h)
            a, _ = plaquette_flux(rep, centre, u, w, h, quad)
            total += sign * a
    return float(total)


def analytic_curl(connection: Callable, z, dir1, dir2, h: float = 1e-4) -> float:
    """Centred finite-difference ``dA(dir1, dir2)`` of an analytic connection ``connection(z, dq)``.

    ``z`` needs a ``chart_tangent(q, dq)`` method (massless) or a global chart
    (massive, where coordinate fields are constant).
    """
    d1, d2 = np.asarray(dir1, float), np.asarray(dir2, float)

    def A_at(q, v):
        if hasattr(z, "chart_tangent"):
            zq, vq = z.chart_tangent(q, v)
        else:
            zq, vq = z.shifted(q, 1.0), v
        return connection(zq, vq)

    dA2 = (A_at(h * d1, d2) - A_at(-h * d1, d2)) / (2 * h)
    dA1 = (A_at(h * d2, d1) - A_at(-h * d2, d1)) / (2 * h)
    return float(dA2 - dA1)


# --- reports ---------------------------------------------------------------


@dataclass
class GeometryEntry:
    kind: str
    directions: tuple[str, ...]
    numeric: float
    numeric_error: float
    analytic: float
    residual: float
    steps: list[float]
    order: float
    raw: list[float] = field(default_factory=list)


@dataclass
class GeometryReport:
    entries: list[GeometryEntry] = field(default_factory=list)

    def add(self, kind, names, fd: FDResult, analytic: float):
        self.entries.append(
            GeometryEntry(kind, tuple(names), fd.value, fd.error, float(analytic), abs(fd.value - analytic), fd.steps, fd.order, fd.raw)
        )

    def max_residual(self, kind: str | None = None) -> float:
        vals = [e.residual for e in self.entries if kind is None or e.kind == kind]
        return max(vals) if vals else 0.0

    def to_dicts(self) -> list[dict]:
        return [asdict(e) for e in self.entries]


def geometry_report(rep, z, directions: dict, checks=("connection", "metric", "symplectic"),
                    quad: QuadratureSpec | None = None, steps=DEFAULT_STEPS) -> GeometryReport:
    """Numeric-vs-analytic table over named chart directions."""
    mod = _module(rep)
    rep_args = {}
    if mod is massive:
        rep_args["kappa"] = massive.massive_coefficients(rep.sigma, QuadratureSpec(24)).kappa
    report = GeometryReport()
    names = list(directions)
    for name in names:
        v = directions[name]
        if "connection" in checks:
            report.add("connection", (name,), connection_numeric(rep, z, v, quad, steps),
                       mod.connection_analytic(rep, z, v, **rep_args))
        if "metric" in checks:
            report.add("metric", (name,), metric_numeric(rep, z, v, None, quad, steps), mod.metric_leading(rep, z, v))
    if "symplectic" in checks:
        for i, a in enumerate(names):
            for b in names[i + 1:]:
                report.add("symplectic", (a, b), symplectic_numeric(rep, z, directions[a], directions[b], quad, steps),
                           mod.symplectic_analytic(rep, z, directions[a], directions[b], **rep_args))
    return report
