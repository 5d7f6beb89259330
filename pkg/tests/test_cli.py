import csv
import io as stdio
import json

import numpy as np
import pytest

from pcs import cli
from pcs import massive as mv
from pcs import massless as ml
from pcs.io import ConfigError, LabelFileError, ResultRecord, RunConfig, label_from_dict, label_to_dict, records_to_csv


def run(argv, capsys):
    code = cli.main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_record_rejects_unknown_method():
    with pytest.raises(ValueError):
        ResultRecord("x", 1.0, 0.0, "guess")


def test_record_status_and_hash():
    a = ResultRecord("x", 1.0, 0.0, "analytic", {"s": 0.1}, passed=np.bool_(True))
    assert a.status == "pass" and a.passed is True
    assert ResultRecord("x", 1.0, 0.0, "analytic").status == "info"
    assert a.param_hash == ResultRecord("y", 2.0, 0.0, "mc", {"s": 0.1}).param_hash
    rows = list(csv.reader(stdio.StringIO(records_to_csv([a]))))
    assert rows[0] == ["name", "value", "stderr", "method", "param_hash", "pass"]
    assert rows[1][-1] == "pass"


def test_config_rejects_unknown_keys():
    with pytest.raises(ConfigError):
        RunConfig.from_dict({"family": "massive", "colour": 1})
    with pytest.raises(ConfigError):
        RunConfig.from_dict({"quad": {"nodes": 3}})
    with pytest.raises(ConfigError):
        RunConfig.from_dict({"sigma": -1.0})
    cfg = RunConfig.from_dict({"family": "massless", "r": 2, "quad": {"nodes_per_axis": 24}, "mc": {"seed": 4}})
    assert cfg.rep() == ml.MasslessRep(r=2)


def test_label_round_trip_and_validation():
    z = mv.MassiveLabel.from_momentum([0.1, 0.2, 0.3], [0, 1, 0])
    back = label_from_dict(json.loads(json.dumps(label_to_dict(z))))
    assert np.allclose(back.I, z.I) and np.allclose(back.m, z.m)
    w = ml.MasslessLabel.reference()
    assert np.allclose(label_from_dict(label_to_dict(w)).J, w.J)
    bad = label_to_dict(z)
    bad["I"] = [1.0, 0.1, 0.0, 0.0]
    with pytest.raises(LabelFileError):
        label_from_dict(bad)
    bad = label_to_dict(w)
    bad["J"] = [1.0, 0.0, 0.0, -1.001]
    with pytest.raises(LabelFileError):
        label_from_dict(bad)
    with pytest.raises(LabelFileError):
        label_from_dict({"family": "massive", "X": [0] * 4, "I": [1, 0, 0, 0], "m": [0, 0, 1], "extra": 1})


def test_coeffs_massive(capsys):
    code, out, _ = run(["coeffs", "massive", "--sigma", "0.1", "--json"], capsys)
    assert code == 0
    recs = {r["name"]: r for r in json.loads(out)}
    assert abs(recs["omega"]["value"] - 0.5) < 0.01
    assert all(r["method"] in ("quadrature", "analytic") for r in recs.values())


def test_coeffs_massless_reports_asymptotic_comparison(capsys):
    code, out, _ = run(["coeffs", "massless", "--smearing", "rational", "--eps", "1e-3", "--json"], capsys)
    assert code == 0
    recs = {r["name"]: r["value"] for r in json.loads(out)}
    assert recs["c1_asymptotic"] == 4.0
    assert "c1" in recs and "F" in recs


def test_malformed_flag_is_usage_error(capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main(["coeffs", "--sigma", "abc"])
    assert exc.value.code == 2
    assert "usage" in capsys.readouterr().err


def test_invalid_value_is_usage_error(capsys):
    code, _, err = run(["coeffs", "massive", "--sigma", "-1"], capsys)
    assert code == 2 and "usage" in err


def test_unreadable_label_is_io_error(capsys, tmp_path):
    code, _, _ = run(["geometry", "massive", "--label", str(tmp_path / "missing.json")], capsys)
    assert code == 3
    p = tmp_path / "bad.json"
    p.write_text("{not json")
    assert run(["overlap", "--label", str(p)], capsys)[0] == 3


def test_geometry_reference_connection(capsys):
    code, out, _ = run(["geometry", "massive", "--check", "connection", "--r", "2", "--json"], capsys)
    assert code == 0
    res = [r for r in json.loads(out) if r["name"].endswith(".residual")]
    assert res and all(abs(r["value"]) < 1e-4 for r in res)


def test_geometry_degenerate_direction(capsys, tmp_path):
    z = mv.MassiveLabel.from_momentum([0.3, -0.2, 0.1], [1, 1, 0], [0.5, 0, 0, 0])
    p = tmp_path / "z.json"
    p.write_text(json.dumps(label_to_dict(z)))
    code, out, _ = run(["geometry", "massive", "--label", str(p), "--check", "symplectic", "--direction", "degenerate",
                        "--r", "1", "--sigma", "0.3", "--json"], capsys)
    assert code == 0
    vals = [r["value"] for r in json.loads(out) if not r["name"].endswith(".residual")]
    assert max(abs(v) for v in vals) < 1e-6


def test_geometry_default_steps_are_documented(capsys):
    code, out, _ = run(["geometry", "massive", "--check", "connection", "--direction", "X1", "--json"], capsys)
    rec = json.loads(out)[0]
    assert rec["params"]["steps"] == [1e-2, 5e-3, 2.5e-3]
    code, out, _ = run(["geometry", "massive", "--check", "connection", "--direction", "X1", "--delta", "0.02", "--json"], capsys)
    assert json.loads(out)[0]["params"]["steps"] == [0.02, 0.01, 0.005]


def test_unknown_direction(capsys):
    assert run(["geometry", "massive", "--direction", "sideways"], capsys)[0] == 2


def test_out_file_and_csv(capsys, tmp_path):
    p = tmp_path / "o.csv"
    code, out, _ = run(["overlap", "massless", "--nodes", "32", "--out", str(p)], capsys)
    assert code == 0 and out == ""
    rows = list(csv.DictReader(p.open()))
    assert float({r["name"]: r for r in rows}["overlap.abs"]["value"]) == pytest.approx(1.0, abs=1e-8)


def test_config_file_with_flag_override(capsys, tmp_path):
    p = tmp_path / "cfg.json"
    p.write_text(json.dumps({"family": "massive", "sigma": 0.2, "format": "json"}))
    code, out, _ = run(["coeffs", "--config", str(p), "--sigma", "0.1"], capsys)
    assert code == 0
    assert json.loads(out)[0]["params"]["sigma"] == 0.1


def test_resolution_and_covariance(capsys):
    code, out, _ = run(["resolution", "--sigma", "0.3", "--samples", "100000", "--seed", "3", "--json"], capsys)
    assert code == 0 and abs(json.loads(out)[0]["value"] - 1) < 0.02
    code, out, _ = run(["covariance", "massive", "--r", "2", "--trials", "3", "--json"], capsys)
    assert code == 0


def test_selftest_is_byte_identical(capsys):
    a = run(["selftest", "--seed", "42"], capsys)
    b = run(["selftest", "--seed", "42"], capsys)
    assert a[0] == 0
    assert a[1] == b[1]
    statuses = {row["pass"] for row in csv.DictReader(stdio.StringIO(a[1]))}
    assert statuses == {"pass", "info"}
