"""``pcs`` command line: coefficient tables, overlaps, geometry reports, self-test.

Exit codes: 0 success, 1 check failure, 2 usage error, 3 I/O error.
"""
from __future__ import annotations

import argparse
import sys
from dataclasses import replace

import numpy as np

from . import massive as mv
from . import massless as ml
from . import numgeom as ng
from . import selftest
from . import spinors as sp
from .integrate import IntegrationError, QuadratureSpec
from .io import ConfigError, LabelFileError, ResultRecord, RunConfig, load_config, load_label, records_to_csv, records_to_json

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3

CONNECTION_TOL = 1e-4
SYMPLECTIC_TOL = 1e-6
RESOLUTION_TOL = 0.02
COVARIANCE_TOL = 1e-6

MASSIVE_DIRECTIONS = ("X0", "X1", "X2", "X3", "I1", "I2", "I3", "w1", "w2", "gauge")
MASSLESS_DIRECTIONS = ("X0", "X1", "X2", "X3", "t0re", "t0im", "t1re", "t1im", "t2re", "t2im")
DEFAULT_GEOMETRY_DIRECTIONS = {"massive": ("X0", "X1", "I1", "w1", "gauge"), "massless": ("X0", "X3", "t0re", "t1re", "gauge")}


def _usage(msg: str):
    raise ConfigError(msg)


def _common(p: argparse.ArgumentParser):
    # every flag defaults to None so a --config file can supply it instead
    p.add_argument("--config", help="JSON RunConfig file; explicit flags override it")
    p.add_argument("--sigma", type=float)
    p.add_argument("--mass", type=float, dest="M")
    p.add_argument("--r", type=int)
    p.add_argument("--smearing", choices=("legendre", "rational"))
    p.add_argument("--N", type=int)
    p.add_argument("--eps", type=float)
    p.add_argument("--nodes", type=int, help="quadrature nodes per axis")
    p.add_argument("--cutoff", type=float, help="quadrature cutoff in units of sigma")
    p.add_argument("--samples", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--delta", type=float, help="largest finite-difference step; steps are delta, delta/2, delta/4 "
                   f"(default {', '.join(map(str, ng.DEFAULT_STEPS))})")
    p.add_argument("--out", help="write output to this file instead of stdout")
    p.add_argument("--json", action="store_true", help="JSON array instead of CSV")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pcs", description="Poincare coherent states: numerics and geometry checks")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("coeffs", help="smearing and metric coefficients")
    p.add_argument("family", nargs="?", choices=("massive", "massless"), default=None)
    _common(p)

    p = sub.add_parser("overlap", help="overlap of two labels")
    p.add_argument("family", nargs="?", choices=("massive", "massless"), default=None)
    p.add_argument("--label", help="JSON label file for the bra (default: reference label)")
    p.add_argument("--label2", help="JSON label file for the ket (default: same as --label)")
    _common(p)

    p = sub.add_parser("geometry", help="numeric vs analytic connection, metric and symplectic form")
    p.add_argument("family", nargs="?", choices=("massive", "massless"), default=None)
    p.add_argument("--label", help="JSON label file (default: reference label)")
    p.add_argument("--check", action="append", choices=("connection", "metric", "symplectic"))
    p.add_argument("--direction", action="append",
                   help="chart direction name; massive: %s, degenerate; massless: %s, gauge"
                   % (", ".join(MASSIVE_DIRECTIONS), ", ".join(MASSLESS_DIRECTIONS)))
    _common(p)

    p = sub.add_parser("resolution", help="resolution-of-unity kernel ratio (massive)")
    p.add_argument("--rapidity", type=float, default=0.0, help="boost of the test momentum along z")
    p.add_argument("--component", choices=("highest", "trace"), default="highest")
    _common(p)

    p = sub.add_parser("covariance", help="|overlap| invariance under random Poincare transformations")
    p.add_argument("family", nargs="?", choices=("massive", "massless"), default=None)
    p.add_argument("--trials", type=int, default=10)
    _common(p)

    p = sub.add_parser("selftest", help="invariant suite plus informational erratum records")
    _common(p)
    return parser


def _config(args) -> RunConfig:
    cfg = load_config(args.config) if args.config else RunConfig()
    updates = {}
    for key in ("M", "r", "sigma", "smearing", "N", "eps"):
        if getattr(args, key, None) is not None:
            updates[key] = getattr(args, key)
    if getattr(args, "family", None):
        updates["family"] = args.family
    if args.command == "resolution":
        updates["family"] = "massive"
    quad = cfg.quad
    if args.nodes is not None or args.cutoff is not None:
        try:
            quad = replace(quad, **{k: v for k, v in (("nodes_per_axis", args.nodes), ("cutoff_sigmas", args.cutoff)) if v is not None})
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
    mc = cfg.mc
    if args.samples is not None or args.seed is not None:
        try:
            mc = replace(mc, **{k: v for k, v in (("samples", args.samples), ("seed", args.seed)) if v is not None})
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
    updates.update(quad=quad, mc=mc)
    if args.json:
        updates["format"] = "json"
    if args.out:
        updates["out"] = args.out
    try:
        return replace(cfg, **updates)
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc


def _steps(args):
    if args.delta is None:
        return ng.DEFAULT_STEPS
    if not args.delta > 0:
        _usage("--delta must be positive")
    return (args.delta, args.delta / 2, args.delta / 4)


def _reference_label(family):
    return mv.MassiveLabel.from_momentum([0.0, 0.0, 0.0]) if family == "massive" else ml.MasslessLabel.reference()


def _label(path, family):
    if path is None:
        return _reference_label(family)
    z = load_label(path)
    if isinstance(z, mv.MassiveLabel) != (family == "massive"):
        raise LabelFileError(f"label in {path} is not a {family} label")
    return z


def _direction(name: str, family: str, z) -> np.ndarray:
    names = MASSIVE_DIRECTIONS if family == "massive" else MASSLESS_DIRECTIONS
    if name in names:
        v = np.zeros(10)
        v[names.index(name)] = 1.0
        return v
    if family == "massive" and name == "degenerate":
        return mv.degenerate_direction(z)
    if family == "massless" and name == "gauge":
        return ml.gauge_direction()
    _usage(f"unknown {family} direction {name!r}")


# --- commands --------------------------------------------------------------


def cmd_coeffs(cfg: RunConfig, args) -> list[ResultRecord]:
    par = cfg.echo()
    out = []
    if cfg.family == "massive":
        c = mv.massive_coefficients(cfg.sigma, cfg.quad, cfg.M)
        for key in ("kappa", "omega", "v"):
            out.append(ResultRecord(key, getattr(c, key), c.errors.get(key, 0.0), "quadrature", par, f"massive.{key}"))
        for i in range(4):
            for j in range(i, 4):
                out.append(ResultRecord(f"K[{i}{j}]", c.K_numeric[i, j], c.errors.get("K", 0.0), "quadrature", par, "massive.K"))
        out.append(ResultRecord("omega_closed_form", mv.omega_closed_form(cfg.sigma), 0.0, "analytic", par, "massive.omega"))
        out.append(ResultRecord("kappa_leading_closed_form", 1 + cfg.sigma**2 / 4, 0.0, "analytic", par, "massive.kappa"))
        out.append(ResultRecord("max|K_numeric-K_closed|", float(np.abs(c.K_difference).max()), c.errors.get("K", 0.0),
                                "quadrature", par, "massive.K"))
        return out
    rep = cfg.rep()
    sm = ml.smearing_functions(rep)
    n_err, g_err = ml.normalisation_errors(rep)
    out.append(ResultRecord("f_normalisation_error", n_err, 0.0, "quadrature", par, "massless.smearing", n_err < 1e-10))
    out.append(ResultRecord("g_normalisation_error", g_err, 0.0, "quadrature", par, "massless.smearing", g_err < 1e-10))
    if sm.kind == "legendre":
        out.append(ResultRecord("abs_norm", sm.abs_norm, 0.0, "quadrature", par, "massless.smearing"))
        # c1..F diverge for this smearing; report the constant only
        return out
    c = ml.massless_metric_coefficients(rep)
    asym = ml.rational_asymptotics(rep.eps)
    out.append(ResultRecord("C", c.C, 0.0, "analytic", par, "massless.smearing"))
    out.append(ResultRecord("C_closed_form", ml.rational_constant_closed_form(rep.eps), 0.0, "analytic", par, "massless.smearing"))
    for key in ("c1", "c2", "c3", "F"):
        out.append(ResultRecord(key, getattr(c, key), c.errors[key], "quadrature", par, f"massless.{key}"))
    for key in ("c1", "c2", "F"):
        out.append(ResultRecord(f"{key}_asymptotic", asym[key], 0.0, "analytic", par, f"massless.{key}"))
    return out


def cmd_overlap(cfg: RunConfig, args) -> list[ResultRecord]:
    rep = cfg.rep()
    z1 = _label(args.label, cfg.family)
    z2 = _label(args.label2, cfg.family) if args.label2 else z1
    est = ng.overlap(rep, z1, z2, cfg.quad)
    par = cfg.echo() | {"nodes": cfg.quad.nodes_per_axis}
    w = complex(est.value)
    return [
        ResultRecord("overlap.re", w.real, est.error, "quadrature", par, "overlap"),
        ResultRecord("overlap.im", w.imag, est.error, "quadrature", par, "overlap"),
        ResultRecord("overlap.abs", abs(w), est.error, "quadrature", par, "overlap"),
    ]


def _analytic(rep, family, kappa):
    if family == "massive":
        return (lambda z, v: mv.connection_analytic(rep, z, v, kappa),
                lambda z, a, b: mv.symplectic_analytic(rep, z, a, b, kappa),
                lambda z, v: mv.metric_leading(rep, z, v))
    return (lambda z, v: ml.connection_exact(rep, z, v),
            lambda z, a, b: ml.symplectic_exact(rep, z, a, b),
            lambda z, v: ml.metric_leading(rep, z, v))


def cmd_geometry(cfg: RunConfig, args) -> list[ResultRecord]:
    rep = cfg.rep()
    fam = cfg.family
    z = _label(args.label, fam)
    steps = _steps(args)
    checks = args.check or ["connection", "metric", "symplectic"]
    names = args.direction or list(DEFAULT_GEOMETRY_DIRECTIONS[fam])
    dirs = {n: _direction(n, fam, z) for n in names}
    kappa = mv.massive_coefficients(rep.sigma, QuadratureSpec(32), rep.M).kappa if fam == "massive" else None
    A, Om, G = _analytic(rep, fam, kappa)
    quad = cfg.quad
    par = cfg.echo() | {"nodes": quad.nodes_per_axis, "steps": list(steps)}
    out = []
    for n, v in dirs.items():
        if "connection" in checks:
            fd = ng.connection_numeric(rep, z, v, quad, steps)
            res = fd.value - A(z, v)
            out.append(ResultRecord(f"connection[{n}]", fd.value, fd.error, "finite-difference", par, f"{fam}.connection"))
            out.append(ResultRecord(f"connection[{n}].residual", res, fd.error, "finite-difference", par, f"{fam}.connection",
                                    abs(res) < CONNECTION_TOL))
            if fam == "massless":
                out.append(ResultRecord(f"connection[{n}].leading_form_residual", fd.value - ml.connection_analytic(rep, z, v),
                                        fd.error, "finite-difference", par, "massless.connection"))
        if "metric" in checks:
            fd = ng.metric_numeric(rep, z, v, None, quad, steps)
            lead = G(z, v)
            out.append(ResultRecord(f"metric[{n}]", fd.value, fd.error, "finite-difference", par, f"{fam}.metric"))
            out.append(ResultRecord(f"metric[{n}].leading_form", lead, 0.0, "analytic", par, f"{fam}.metric"))
    if "symplectic" in checks:
        items = list(dirs.items())
        if len(items) == 1:
            # pair a single direction with every chart axis
            axes = MASSIVE_DIRECTIONS if fam == "massive" else MASSLESS_DIRECTIONS
            pairs = [(items[0], (a, _direction(a, fam, z))) for a in axes if a != items[0][0]]
        else:
            pairs = [(items[i], items[j]) for i in range(len(items)) for j in range(i + 1, len(items))]
        for (na, va), (nb, vb) in pairs:
            fd = ng.symplectic_numeric(rep, z, va, vb, quad, steps)
            res = fd.value - Om(z, va, vb)
            out.append(ResultRecord(f"symplectic[{na},{nb}]", fd.value, fd.error, "finite-difference", par, f"{fam}.symplectic"))
            out.append(ResultRecord(f"symplectic[{na},{nb}].residual", res, fd.error, "finite-difference", par,
                                    f"{fam}.symplectic", abs(res) < SYMPLECTIC_TOL))
            if fam == "massless":
                out.append(ResultRecord(f"symplectic[{na},{nb}].leading_form_residual",
                                        fd.value - ml.symplectic_analytic(rep, z, va, vb), fd.error, "finite-difference", par,
                                        "massless.symplectic"))
    return out


def cmd_resolution(cfg: RunConfig, args) -> list[ResultRecord]:
    rep = cfg.rep()
    xi = np.array([np.cosh(args.rapidity), 0.0, 0.0, np.sinh(args.rapidity)])
    mc = cfg.mc if args.samples is not None else replace(cfg.mc, samples=1_000_000)
    est = mv.resolution_check(rep, mv.SurfaceLabel(), xi, mc, component=args.component)
    par = cfg.echo() | {"samples": mc.samples, "seed": mc.seed, "rapidity": args.rapidity, "component": args.component}
    return [ResultRecord("resolution_ratio", est.value, est.error, "mc", par, "massive.resolution",
                         abs(est.value - 1) <= RESOLUTION_TOL)]


def cmd_covariance(cfg: RunConfig, args) -> list[ResultRecord]:
    if args.trials < 1:
        _usage("--trials must be positive")
    rep = cfg.rep()
    rng = np.random.default_rng(cfg.mc.seed)
    quad = cfg.quad
    if cfg.family == "massive":
        # keep z2 within a width of z1 so the overlap is not negligible
        s = min(rep.sigma, 0.3)
        z1 = mv.MassiveLabel.from_momentum(rng.normal(scale=s, size=3), rng.normal(size=3), rng.normal(scale=0.2 / s, size=4))
        z2 = mv.MassiveLabel.from_momentum(z1.I[1:] + rng.normal(scale=s / 2, size=3), rng.normal(size=3),
                                           z1.X + rng.normal(scale=0.15 / rep.sigma, size=4))
        act = lambda z, a, C: mv.transform_label(z, sp.sl2c_to_lorentz(a), C)
    else:
        z1, z2 = ml.random_label(rng, 0.3, 0.3), ml.random_label(rng, 0.3, 0.3)
        act = lambda z, a, C: ml.transform_label(z, a, C)
    ref = ng.overlap(rep, z1, z2, quad)
    worst, err = 0.0, ref.error
    for _ in range(args.trials):
        a, C = sp.random_sl2c(rng, 0.3), rng.normal(size=4)
        est = ng.overlap(rep, act(z1, a, C), act(z2, a, C), quad)
        worst = max(worst, abs(abs(complex(est.value)) - abs(complex(ref.value))))
        err = max(err, est.error)
    par = cfg.echo() | {"trials": args.trials, "seed": cfg.mc.seed, "nodes": quad.nodes_per_axis}
    return [
        ResultRecord("|overlap|", abs(complex(ref.value)), ref.error, "quadrature", par, "covariance"),
        ResultRecord("max_abs_overlap_change", worst, err, "quadrature", par, "covariance", worst < COVARIANCE_TOL),
    ]


def cmd_selftest(cfg: RunConfig, args) -> list[ResultRecord]:
    return selftest.run(0 if args.seed is None else args.seed)


COMMANDS = {
    "coeffs": cmd_coeffs,
    "overlap": cmd_overlap,
    "geometry": cmd_geometry,
    "resolution": cmd_resolution,
    "covariance": cmd_covariance,
    "selftest": cmd_selftest,
}


def _emit(records, cfg: RunConfig):
    text = records_to_json(records) if cfg.format == "json" else records_to_csv(records)
    if cfg.out:
        try:
            with open(cfg.out, "w") as fh:
                fh.write(text)
        except OSError as exc:
            raise LabelFileError(f"cannot write {cfg.out}: {exc}") from exc
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)  # exits 2 on malformed flags
    try:
        cfg = _config(args)
        records = COMMANDS[args.command](cfg, args)
        _emit(records, cfg)
    except ConfigError as exc:
        parser.print_usage(sys.stderr)
        print(f"pcs: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (LabelFileError, OSError) as exc:
        print(f"pcs: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (IntegrationError, ValueError) as exc:
        print(f"pcs: {exc}", file=sys.stderr)
        return EXIT_FAIL
    failed = [r for r in records if r.passed is False]
    for r in failed:
        print(f"pcs: check failed: {r.name} value={r.value!r} stderr={r.stderr!r}", file=sys.stderr)
    return EXIT_FAIL if failed else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
