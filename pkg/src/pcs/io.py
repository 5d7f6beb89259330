"""Result records, run configuration and label files (JSON/CSV)."""
from __future__ import annotations

import csv
import hashlib
import io
import json
from dataclasses import dataclass, field, fields

import numpy as np

from . import massive, massless
from . import spinors as sp
from .integrate import MCConfig, QuadratureSpec

METHODS = ("quadrature", "mc", "analytic", "finite-difference")
LABEL_TOL = 1e-8


class ConfigError(ValueError):
    """Invalid run configuration (usage error)."""


class LabelFileError(OSError):
    """Unreadable or invalid label file (I/O error)."""


def _plain(v):
    if isinstance(v, (np.floating, np.integer, np.bool_)):
        return v.item()
    if isinstance(v, np.ndarray):
        return [_plain(x) for x in v.tolist()]
    if isinstance(v, (list, tuple)):
        return [_plain(x) for x in v]
    if isinstance(v, dict):
        return {str(k): _plain(x) for k, x in v.items()}
    if isinstance(v, complex):
        return {"re": v.real, "im": v.imag}
    return v


@dataclass
class ResultRecord:
    name: str
    value: float
    stderr: float
    method: str
    params: dict = field(default_factory=dict)
    ref: str = ""
    passed: bool | None = None  # None marks an informational record

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}")
        if self.passed is not None:
            self.passed = bool(self.passed)

    @property
    def status(self) -> str:
        return "info" if self.passed is None else ("pass" if self.passed else "fail")

    @property
    def param_hash(self) -> str:
        blob = json.dumps(_plain(self.params), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()[:12]

    def to_dict(self) -> dict:
        d = {
            "name": self.name,
            "value": _plain(self.value),
            "stderr": _plain(self.stderr),
            "method": self.method,
            "params": _plain(self.params),
            "ref": self.ref,
            "pass": self.passed,
            "status": self.status,
        }
        return d


def records_to_json(records) -> str:
    return json.dumps([r.to_dict() for r in records], indent=1, sort_keys=False) + "\n"


def records_to_csv(records) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["name", "value", "stderr", "method", "param_hash", "pass"])
    for r in records:
        w.writerow([r.name, repr(_plain(r.value)), repr(_plain(r.stderr)), r.method, r.param_hash, r.status])
    return buf.getvalue()


def records_to_text(records) -> str:
    lines = []
    for r in records:
        lines.append(f"{r.status.upper():5s} {r.name}  value={_plain(r.value)!r}  stderr={_plain(r.stderr)!r}  [{r.method}]")
    return "\n".join(lines) + "\n"


# --- run configuration -----------------------------------------------------


@dataclass
class RunConfig:
    family: str = "massive"
    M: float = 1.0
    r: int = 0
    sigma: float = 0.1
    smearing: str = "rational"
    N: int = 4
    eps: float = 0.1
    quad: QuadratureSpec = field(default_factory=lambda: QuadratureSpec(32))
    mc: MCConfig = field(default_factory=MCConfig)
    format: str = "csv"
    out: str | None = None

    def __post_init__(self):
        if self.family not in ("massive", "massless"):
            raise ConfigError(f"family must be massive or massless, got {self.family!r}")
        if self.format not in ("json", "csv"):
            raise ConfigError("format must be json or csv")
        try:
            self.rep()
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    def rep(self):
        if self.family == "massive":
            return massive.MassiveRep(self.M, int(self.r), self.sigma)
        return massless.MasslessRep(int(self.r), self.sigma, self.smearing, int(self.N), self.eps)

    def echo(self) -> dict:
        d = {"family": self.family, "r": int(self.r), "sigma": self.sigma}
        if self.family == "massive":
            d["M"] = self.M
        else:
            d["smearing"] = self.smearing
            d["N" if self.smearing == "legendre" else "eps"] = self.N if self.smearing == "legendre" else self.eps
        return d

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        allowed = {f.name for f in fields(cls)}
        unknown = set(data) - allowed
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        data = dict(data)
        try:
            if "quad" in data:
                data["quad"] = _sub(QuadratureSpec, data["quad"])
            if "mc" in data:
                mc = dict(data["mc"])
                if "widths" in mc:
                    mc["widths"] = tuple(mc["widths"])
                data["mc"] = _sub(MCConfig, mc)
            return cls(**data)
        except (TypeError, ValueError) as exc:
            raise ConfigError(str(exc)) from exc


def _sub(kind, data):
    allowed = {f.name for f in fields(kind)}
    unknown = set(data) - allowed
    if unknown:
        raise ConfigError(f"unknown {kind.__name__} keys: {sorted(unknown)}")
    return kind(**data)


def load_config(path: str) -> RunConfig:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except OSError as exc:
        raise LabelFileError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")
    return RunConfig.from_dict(data)


# --- labels ----------------------------------------------------------------


def label_to_dict(z) -> dict:
    if isinstance(z, massive.MassiveLabel):
        return {"family": "massive", "X": z.X.tolist(), "I": z.I.tolist(), "m": z.m.tolist(), "gauge": z.gauge}
    return {"family": "massless", "X": z.X.tolist(), "I": z.I.tolist(), "J": z.J.tolist(), "gauge": z.gauge}


def label_from_dict(d: dict):
    """Validate at ``LABEL_TOL`` and build a label; never re-projects."""
    fam = d.get("family")
    keys = {"massive": {"family", "X", "I", "m", "gauge"}, "massless": {"family", "X", "I", "J", "gauge"}}
    if fam not in keys:
        raise LabelFileError("label needs family massive or massless")
    unknown = set(d) - keys[fam]
    if unknown:
        raise LabelFileError(f"unknown label keys {sorted(unknown)}")
    try:
        X = np.asarray(d["X"], dtype=float)
        I = np.asarray(d["I"], dtype=float)
        gauge = float(d.get("gauge", 0.0))
        if fam == "massive":
            m = np.asarray(d["m"], dtype=float)
            if abs(sp.minkowski(I, I) - 1) > LABEL_TOL or I[0] <= 0:
                raise LabelFileError(f"I is not future unit timelike to {LABEL_TOL}: I.I = {sp.minkowski(I, I)}")
            if abs(np.linalg.norm(m) - 1) > LABEL_TOL:
                raise LabelFileError(f"m is not a unit vector to {LABEL_TOL}")
            # the constructor checks at 1e-10; file labels are accepted at LABEL_TOL as given
            return _massive_label(X, I, m, gauge)
        J = np.asarray(d["J"], dtype=float)
        return massless.MasslessLabel(X, I, J, gauge)
    except KeyError as exc:
        raise LabelFileError(f"label is missing {exc}") from exc
    except (ValueError, TypeError) as exc:
        raise LabelFileError(f"invalid label: {exc}") from exc


def _massive_label(X, I, m, gauge):
    if X.shape != (4,) or I.shape != (4,) or m.shape != (3,):
        raise LabelFileError("label needs X, I four-vectors and a 3-vector m")
    z = object.__new__(massive.MassiveLabel)
    for k, v in (("X", X), ("I", I), ("m", m), ("gauge", gauge)):
        object.__setattr__(z, k, v)
    return z


def load_label(path: str):
    try:
        with open(path) as fh:
            data = json.load(fh)
    except OSError as exc:
        raise LabelFileError(f"cannot read label file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise LabelFileError(f"label file {path} is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise LabelFileError("label file must hold a JSON object")
    return label_from_dict(data)
