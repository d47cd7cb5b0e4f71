import csv
import json
import math

import pytest

from comparison_lab.cli import RunConfig, UsageError, run

SCENARIOS = __import__("pathlib").Path(__file__).resolve().parents[1] / "scenarios"


def test_bound_horocylinder(capsys):
    assert run(["bound", "--scenario", str(SCENARIOS / "horocylinder.json")]) == 0
    out = capsys.readouterr().out
    assert "0.5" in out and "1/2" in out


def test_bound_json_multiple(capsys):
    code = run(["bound", "--json", "--scenario", str(SCENARIOS / "horocylinder.json"),
                "--scenario", str(SCENARIOS / "submersion.json")])
    data = json.loads(capsys.readouterr().out)
    assert code == 0 and [d["exact"] for d in data] == ["1/2", "11/12"]


def test_cmc_critical_radius(tmp_path, capsys):
    out = tmp_path / "p.csv"
    assert run(["cmc", "--n", "2", "--H", "1", "--out", str(out)]) == 0
    text = capsys.readouterr().out
    line = next(l for l in text.splitlines() if l.startswith("r0 = "))
    assert float(line.split("=")[1]) == pytest.approx(math.log(3), abs=1e-12)
    rows = list(csv.reader(open(out)))
    assert rows[0] == ["r", "u", "du", "flux"]


def test_cmc_default_output_name(tmp_path, monkeypatch, capsys):
    monkeypatch.chdir(tmp_path)
    assert run(["cmc", "--n", "3", "--H", "0.5", "--rmax", "2"]) == 0
    assert (tmp_path / "cmc_n3_H0.5.csv").exists()
    # finite differences on 101 samples cannot resolve H to 1e-4
    assert run(["cmc", "--n", "3", "--H", "0.5", "--rmax", "2", "--samples", "101"]) == 1


def test_usage_errors_exit_2(tmp_path, capsys):
    assert run(["cmc", "--n", "1"]) == 2
    assert "error" in capsys.readouterr().err
    assert run(["bound"]) == 2
    assert "scenario" in capsys.readouterr().err
    assert run(["bound", "--scenario", str(tmp_path / "missing.json")]) == 2
    assert run(["verify", "--patch", "torus"]) == 2
    assert run(["jacobi", "--profile", "{not json"]) == 2
    assert run(["nonsense"]) == 2


def test_failed_verification_exits_1(capsys):
    code = run(["verify", "--chart", "warped", "--patch", "equidistant", "--form", "reverse",
                "--grid", "32", "--mean-curvature-scale", "0.5"])
    assert code == 1 and "FAIL" in capsys.readouterr().out


def test_verify_json(tmp_path, capsys):
    out = tmp_path / "v.json"
    assert run(["verify", "--grid", "32", "--refine", "--json", "--out", str(out)]) == 0
    data = json.loads(capsys.readouterr().out)
    assert set(data) == {"tube", "reverse"}
    assert [c["grid"] for c in data["reverse"]["convergence"]] == [32, 64]
    assert json.loads(out.read_text()) == data


def test_jacobi_sin_focal_radius(capsys):
    assert run(["jacobi", "--profile", "-1", "--json"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["focal_radius"] == pytest.approx(math.pi, abs=1e-9)


def test_criterion_and_bm(tmp_path, capsys):
    assert run(["criterion", "--model", "sinh", "--json"]) == 0
    assert json.loads(capsys.readouterr().out)["overall"]
    svg = tmp_path / "s.svg"
    assert run(["bm", "--model", "exp4", "--paths", "200", "--T", "1", "--svg", str(svg),
                "--seed", "3", "--json"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["paths"] == 200 and svg.read_text().startswith("<svg")


def test_riccati_seed_env(monkeypatch, capsys):
    monkeypatch.setenv("COMPARISON_LAB_SEED", "7")
    assert run(["riccati", "--draws", "3", "--json"]) == 0
    a = json.loads(capsys.readouterr().out)
    assert run(["riccati", "--draws", "3", "--json", "--seed", "7"]) == 0
    assert json.loads(capsys.readouterr().out) == a
    monkeypatch.setenv("COMPARISON_LAB_SEED", "seven")
    assert run(["riccati", "--draws", "1"]) == 2


def test_config_round_trip(tmp_path, capsys):
    cfg_path = tmp_path / "run.json"
    args = ["bm", "--model", "sinh", "--paths", "100", "--T", "0.5", "--seed", "11", "--json"]
    assert run(args + ["--save-config", str(cfg_path)]) == 0
    first = json.loads(capsys.readouterr().out)
    cfg = RunConfig.from_json(cfg_path.read_text())
    assert cfg.subcommand == "bm" and cfg.seed == 11 and cfg.params["paths"] == 100
    assert RunConfig.from_json(cfg.to_json()) == cfg
    assert run(["bm", "--config", str(cfg_path), "--json"]) == 0
    assert json.loads(capsys.readouterr().out) == first


def test_config_field_errors(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"subcommand": "bm", "params": {"paths": "many"}}))
    assert run(["bm", "--config", str(bad)]) == 2
    assert "params.paths" in capsys.readouterr().err
    bad.write_text(json.dumps({"subcommand": "bm", "params": {"colour": 1}}))
    assert run(["bm", "--config", str(bad)]) == 2
    assert "params.colour" in capsys.readouterr().err
    bad.write_text(json.dumps({"subcommand": "cmc"}))
    assert run(["bm", "--config", str(bad)]) == 2
    assert "subcommand" in capsys.readouterr().err
    with pytest.raises(UsageError):
        RunConfig.from_json("[1, 2]")
