"""Command-line behaviour: exit codes, determinism, reports and subcommands."""
import json
from pathlib import Path

import pytest

from infogeo.cli import EXIT_FAIL, EXIT_OK, EXIT_USAGE, load_config, main, UsageError

ROOT = Path(__file__).resolve().parents[1]
CONFIG = ROOT / "docs" / "example_config.json"


def run_json(capsys, *argv):
    code = main(["check", "--json", "-", *argv])
    return code, capsys.readouterr().out


def test_check_exit_codes(capsys):
    assert main(["check", "--suite", "kahler", "--geometry", "cp1", "--seed", "42", "--points", "5"]) == EXIT_OK
    assert main(["check", "--suite", "nope"]) == EXIT_USAGE
    assert main(["check", "--suite", "kahler", "--geometry", "torus"]) == EXIT_USAGE
    assert main(["check", "--suite", "cokahler", "--geometry", "cp1"]) == EXIT_USAGE
    assert main(["check", "--points", "0"]) == EXIT_USAGE
    assert main(["frobnicate"]) == EXIT_USAGE
    capsys.readouterr()


def test_tightened_tolerances_fail(capsys):
    assert main(["check", "--suite", "infogeo", "--geometry", "simplex2", "--points", "3",
                 "--tolerance-scale", "1e-12"]) == EXIT_FAIL
    capsys.readouterr()


def test_json_report_is_deterministic(capsys):
    args = ("--suite", "quantum", "--seed", "3", "--points", "5")
    code1, first = run_json(capsys, *args)
    code2, second = run_json(capsys, *args)
    assert code1 == code2 == EXIT_OK
    assert first == second
    data = json.loads(first)
    assert data["suite"] == "quantum"
    assert data["meta"] == {"seed": 3, "version": "0.1.0", "runtime_ms": None, "points": 5,
                            "geometry": None, "tolerance_scale": 1.0}


def test_seed_changes_samples_and_geometry_filter_keeps_them(capsys):
    _, seed0 = run_json(capsys, "--suite", "diastasis", "--seed", "0", "--points", "4")
    _, seed1 = run_json(capsys, "--suite", "diastasis", "--seed", "1", "--points", "4")
    assert seed0 != seed1
    _, only = run_json(capsys, "--suite", "diastasis", "--seed", "0", "--points", "4", "--geometry", "cp1")
    full = [c for c in json.loads(seed0)["checks"] if c["geometry"] == "cp1"]
    assert json.loads(only)["checks"] == full


def test_seed_from_environment(capsys, monkeypatch):
    monkeypatch.setenv("INFOGEO_SEED", "5")
    _, text = run_json(capsys, "--suite", "diastasis", "--points", "2")
    assert json.loads(text)["meta"]["seed"] == 5
    monkeypatch.setenv("INFOGEO_SEED", "five")
    assert main(["check", "--suite", "diastasis"]) == EXIT_USAGE
    capsys.readouterr()


def test_timing_is_opt_in(capsys, tmp_path):
    out = tmp_path / "r.json"
    assert main(["check", "--suite", "diastasis", "--points", "2", "--timing", "--json", str(out)]) == EXIT_OK
    assert json.loads(out.read_text())["meta"]["runtime_ms"] > 0
    capsys.readouterr()


def test_distance_subcommand(capsys):
    assert main(["distance", "0.7,0.3", "0.3,0.7"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "0.408619287378" in out and "0.823033692135" in out
    assert main(["distance", "--family", "bernoulli", "0.7", "0.3"]) == EXIT_OK
    assert "0.408619287378" in capsys.readouterr().out
    assert main(["distance", "1,0", "0.5,0.5"]) == EXIT_USAGE
    assert main(["distance", "0.5,x", "0.5,0.5"]) == EXIT_USAGE
    capsys.readouterr()


def test_transport_subcommand(capsys):
    assert main(["transport", "--geometry", "sphere2", "--loop", "latitude", "--steps", "200"]) == EXIT_OK
    assert "holonomy" in capsys.readouterr().out
    assert main(["transport", "--geometry", "flat2", "--connection", "alpha:0.5"]) == EXIT_OK
    assert main(["transport", "--geometry", "flat2", "--loop", "figure8"]) == EXIT_USAGE
    assert main(["transport", "--geometry", "flat2", "--connection", "bogus"]) == EXIT_USAGE
    capsys.readouterr()


def test_list_subcommand(capsys):
    assert main(["list"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "cokahler" in out and "contact3" in out and "duality" in out


def test_config_families(capsys, tmp_path):
    fams = load_config(str(CONFIG))
    assert set(fams) == {"mix3", "poisson4"}
    code, text = run_json(capsys, "--suite", "infogeo", "--config", str(CONFIG), "--geometry", "poisson4",
                          "--points", "5")
    assert code == EXIT_OK
    names = {c["name"] for c in json.loads(text)["checks"]}
    assert "potential_hessian_is_fisher" in names
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"families": [{"name": "m", "type": "finite", "table": [[0.5, 1], [0.6, -1]]}]}))
    with pytest.raises(UsageError):
        load_config(str(bad))
    clash = tmp_path / "clash.json"
    clash.write_text(json.dumps({"families": [{"name": "cp1", "type": "exponential", "atoms": [0, 1],
                                               "weights": [1, 1]}]}))
    assert main(["check", "--config", str(clash)]) == EXIT_USAGE
    assert main(["check", "--config", str(tmp_path / "missing.json")]) == EXIT_USAGE
    capsys.readouterr()
