import json
import re

import numpy as np
import pytest

import jdlab.cli as cli
from jdlab.capacity import SolverFailure


def write_spec(path, payload):
    path.write_text(json.dumps(payload))
    return str(path)


@pytest.fixture()
def z_spec(tmp_path):
    return write_spec(tmp_path / "znn.json", {"type": "lattice", "truncation_radius": 60, "params": {"dim": 1}})


def test_build_roundtrip_and_criteria_identical(tmp_path, z_spec):
    out_pkl = tmp_path / "built.pkl"
    assert cli.main(["build", "--spec", z_spec, "--out", str(out_pkl), "--out-dir", str(tmp_path)]) == 0
    assert out_pkl.exists()

    d1, d2 = tmp_path / "a", tmp_path / "b"
    args = ["criteria", "--radii", "5,10,20,40", "--prefix", "case"]
    assert cli.main(args + ["--spec", z_spec, "--out-dir", str(d1)]) == 0
    assert cli.main(args + ["--spec", str(out_pkl), "--out-dir", str(d2)]) == 0
    for name in ("case.conservativeness.json", "case.recurrence.json", "case.conservativeness.csv"):
        assert (d1 / name).read_bytes() == (d2 / name).read_bytes()


def test_criteria_verdicts_z_and_z3(tmp_path, z_spec, capsys):
    assert cli.main(["criteria", "--spec", z_spec, "--radii", "5,10,20,40", "--out-dir", str(tmp_path)]) == 0
    out = capsys.readouterr().out
    assert "conservativeness: criterion satisfied" in out
    assert "recurrence: criterion satisfied" in out

    z3 = write_spec(tmp_path / "z3.json", {"type": "lattice", "truncation_radius": 8, "params": {"dim": 3}})
    assert cli.main(["criteria", "--spec", z3, "--radii", "2,3,4,5,6", "--out-dir", str(tmp_path)]) == 0
    out = capsys.readouterr().out
    assert "conservativeness: criterion satisfied" in out
    assert "recurrence: criterion inconclusive" in out
    rec = json.loads((tmp_path / "z3.criteria.recurrence.json").read_text())
    assert rec["verdict"] == "inconclusive"


def test_criteria_stable_like_verdicts(tmp_path, capsys):
    spec = write_spec(
        tmp_path / "stable.json",
        {
            "type": "lattice",
            "truncation_radius": 120,
            "params": {"dim": 1, "kernel": {"family": "stable_i", "alpha": 1.5, "beta": 1.5}},
        },
    )
    assert cli.main(["criteria", "--spec", spec, "--radii", "10,20,40,60", "--out-dir", str(tmp_path)]) == 0
    out = capsys.readouterr().out
    assert out.count("satisfied") == 2


def test_missing_truncation_radius_exits_2(tmp_path, capsys):
    bad = write_spec(tmp_path / "bad.json", {"type": "lattice", "params": {"dim": 1}})
    assert cli.main(["criteria", "--spec", bad, "--out-dir", str(tmp_path)]) == 2
    err = capsys.readouterr().err
    assert "truncation_radius" in err


def test_unknown_type_exits_2(tmp_path, capsys):
    bad = write_spec(tmp_path / "bad2.json", {"type": "torus", "truncation_radius": 5})
    assert cli.main(["criteria", "--spec", bad, "--out-dir", str(tmp_path)]) == 2
    assert "type" in capsys.readouterr().err


def test_simulate_gambler_and_byte_identical_reruns(tmp_path, z_spec):
    d1, d2 = tmp_path / "s1", tmp_path / "s2"
    args = [
        "simulate", "--spec", z_spec, "--x0", "61", "--horizon", "1e9",
        "--trials", "2000", "--seed", "42", "--max-jumps", "100000",
        "--outer", "10", "--target", "ids:60", "--prefix", "run",
    ]
    assert cli.main(args + ["--out-dir", str(d1)]) == 0
    assert cli.main(args + ["--out-dir", str(d2)]) == 0
    s1 = (d1 / "run.json").read_bytes()
    s2 = (d2 / "run.json").read_bytes()
    assert s1 == s2
    summary = json.loads(s1)
    assert abs(summary["return"]["value"] - 0.9) < 0.03
    assert summary["survival"]["value"] <= 1.0


def test_simulate_trajectory_csv(tmp_path, z_spec):
    args = [
        "simulate", "--spec", z_spec, "--horizon", "2.0", "--trials", "10",
        "--seed", "1", "--trajectories", "paths.csv", "--out-dir", str(tmp_path),
    ]
    assert cli.main(args) == 0
    lines = (tmp_path / "paths.csv").read_text().strip().splitlines()
    assert lines[0] == "trial,status,elapsed,n_jumps,final_state,hit"
    assert len(lines) == 11


def test_capacity_closed_form_and_infeasible_k(tmp_path, z_spec, capsys):
    assert cli.main([
        "capacity", "--spec", z_spec, "--K", "ball:60:0", "--radii", "10,20,40",
        "--out-dir", str(tmp_path), "--prefix", "cap",
    ]) == 0
    data = json.loads((tmp_path / "cap.json").read_text())
    assert data["capacities"] == pytest.approx([0.4, 0.2, 0.1], abs=1e-6)

    assert cli.main([
        "capacity", "--spec", z_spec, "--K", "ball:60:5", "--radii", "3,10",
        "--out-dir", str(tmp_path),
    ]) == 2
    assert "radius" in capsys.readouterr().err


def test_report_pretty_and_csv(tmp_path, z_spec, capsys):
    assert cli.main(["criteria", "--spec", z_spec, "--radii", "5,10,20", "--out-dir", str(tmp_path), "--prefix", "r"]) == 0
    capsys.readouterr()
    jpath = tmp_path / "r.conservativeness.json"
    assert cli.main(["report", "--input", str(jpath)]) == 0
    out = capsys.readouterr().out
    assert "verdict" in out
    assert cli.main(["report", "--input", str(jpath), "--format", "csv", "--out", str(tmp_path / "r.csv")]) == 0
    assert (tmp_path / "r.csv").read_text().startswith("radius,value")


def test_numerical_failure_exits_3(tmp_path, z_spec, monkeypatch):
    def boom(*args, **kwargs):
        raise SolverFailure("synthetic breakdown")

    monkeypatch.setattr(cli, "capacity_scan", boom)
    code = cli.main([
        "capacity", "--spec", z_spec, "--K", "ball:60:0", "--radii", "10",
        "--out-dir", str(tmp_path),
    ])
    assert code == 3


def test_threads_env_override(monkeypatch):
    import argparse

    monkeypatch.setenv("JDLAB_THREADS", "5")
    ns = argparse.Namespace(threads=2)
    assert cli._resolve_threads(ns) == 5
    monkeypatch.delenv("JDLAB_THREADS")
    assert cli._resolve_threads(ns) == 2


def test_floats_rounded_to_12_digits(tmp_path, z_spec):
    assert cli.main(["criteria", "--spec", z_spec, "--radii", "7,13,29", "--out-dir", str(tmp_path), "--prefix", "f"]) == 0
    text = (tmp_path / "f.conservativeness.json").read_text()
    for token in re.findall(r"-?\d+\.\d+(?:e-?\d+)?", text):
        digits = re.sub(r"[^0-9]", "", token.split("e")[0]).lstrip("0")
        assert len(digits) <= 12


def test_manifest_written_and_referenced(tmp_path, z_spec):
    assert cli.main(["criteria", "--spec", z_spec, "--radii", "5,10,20", "--out-dir", str(tmp_path), "--prefix", "m"]) == 0
    manifest = json.loads((tmp_path / "m.manifest.json").read_text())
    assert manifest["command"] == "criteria"
    assert "spec_sha256" in manifest
    assert "m.conservativeness.json" in manifest["outputs"]
    report = json.loads((tmp_path / "m.conservativeness.json").read_text())
    assert report["manifest"] == "m.manifest.json"
