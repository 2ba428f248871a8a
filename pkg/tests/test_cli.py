import csv
import json
from pathlib import Path

import numpy as np
import pytest

from weakgeo.cli import main

SCENARIOS = Path(__file__).resolve().parent.parent / "scenarios"


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def write_cfg(tmp_path, cfg, name="cfg.json"):
    p = tmp_path / name
    p.write_text(cfg if isinstance(cfg, str) else json.dumps(cfg))
    return str(p)


@pytest.mark.parametrize("path", sorted(SCENARIOS.glob("*.json")), ids=lambda p: p.stem)
def test_shipped_scenarios_pass(path, tmp_path, capsys):
    code, out, err = run(["run", str(path), "--out", str(tmp_path)], capsys)
    assert code == 0, out + err
    report = json.loads((tmp_path / "report.json").read_text())
    assert report["passed"] is True
    assert (tmp_path / "data.csv").read_text().count("\n") >= 2


def test_strong_shift_value(tmp_path, capsys):
    run(["run", str(SCENARIOS / "strong_shift.json"), "--out", str(tmp_path)], capsys)
    report = json.loads((tmp_path / "report.json").read_text())
    assert report["values"]["shift"] == pytest.approx(0.2 * np.cos(1.0), abs=1e-12)
    with open(tmp_path / "data.csv") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["quantity", "formula", "value", "oracle", "abs_error", "tolerance", "passed"]


def test_malformed_json_exit_2(tmp_path, capsys):
    path = write_cfg(tmp_path, '{\n  "version": 1,\n  "kind": "strong-shift"\n  "x": 2\n}')
    code, _, err = run(["run", path, "--out", str(tmp_path)], capsys)
    assert code == 2
    assert f"{path}:4:3" in err


def test_missing_file_exit_2(tmp_path, capsys):
    code, _, _ = run(["run", str(tmp_path / "nope.json")], capsys)
    assert code == 2


def test_schema_violation_exit_3(tmp_path, capsys):
    path = write_cfg(tmp_path, {"version": 1, "kind": "strong-shift", "coupling": {"lambda": "big"}})
    code, _, err = run(["run", path, "--out", str(tmp_path)], capsys)
    assert code == 3
    assert "coupling" in err
    path = write_cfg(tmp_path, {"version": 2, "kind": "strong-shift"})
    assert run(["run", path], capsys)[0] == 3


def test_missing_required_field_exit_3(tmp_path, capsys):
    path = write_cfg(tmp_path, {"version": 1, "kind": "strong-shift", "system": {"observable": {"pauli": "z"}}})
    code, _, err = run(["run", path, "--out", str(tmp_path)], capsys)
    assert code == 3 and "system.alpha" in err


def test_orthogonal_postselection_exit_4(tmp_path, capsys):
    cfg = {
        "version": 1, "kind": "weak-shift",
        "system": {"alpha": {"basis": 0}, "dim": 2, "observable": {"pauli": "x"}},
        "postselect": {"beta": {"basis": 1}},
        "meter": {"continuous": {"gaussian": {"width": 1.0}}},
        "coupling": {"epsilon": 1e-3},
    }
    code, _, err = run(["run", write_cfg(tmp_path, cfg), "--out", str(tmp_path)], capsys)
    assert code == 4 and "AmplificationDivergenceError" in err


def test_grid_overflow_exit_4(tmp_path, capsys):
    cfg = json.loads((SCENARIOS / "strong_shift.json").read_text())
    cfg["coupling"]["lambda"] = 30.0
    code, _, err = run(["run", write_cfg(tmp_path, cfg), "--out", str(tmp_path)], capsys)
    assert code == 4 and "GridOverflowError" in err


def test_weak_regime_exit_4(tmp_path, capsys):
    cfg = json.loads((SCENARIOS / "weak_shift_chirped.json").read_text())
    cfg["coupling"] = {"epsilon": 0.5}
    code, _, err = run(["run", write_cfg(tmp_path, cfg), "--out", str(tmp_path)], capsys)
    assert code == 4 and "WeakRegimeError" in err


def test_tolerance_failure_exit_1(tmp_path, capsys):
    code, out, _ = run(["run", str(SCENARIOS / "strong_shift.json"), "--out", str(tmp_path),
                        "--tolerance-scale", "1e-30"], capsys)
    assert code == 1
    assert "FAIL" in out and "tolerances scaled by 1e-30" in out
    report = json.loads((tmp_path / "report.json").read_text())
    assert report["tolerance_scale"] == 1e-30 and report["passed"] is False


def test_unknown_suite_exit_3(capsys):
    code, _, err = run(["battery", "no-such-suite"], capsys)
    assert code == 3 and "list-suites" in err


def test_list_suites(capsys):
    code, out, _ = run(["list-suites"], capsys)
    assert code == 0
    for name in ("shift-theorem", "rate-theorem", "theta-omega", "readout-max", "weak-real",
                 "weak-imag", "weak-triangle", "metric-consistency", "variance-growth", "qubit-weak-value"):
        assert name in out


def test_count_zero_battery(tmp_path, capsys):
    code, _, _ = run(["battery", "theta-omega", "--count", "0", "--out", str(tmp_path)], capsys)
    assert code == 0
    report = json.loads((tmp_path / "report.json").read_text())
    assert report["checks"] == [] and report["passed"] is True
    assert (tmp_path / "data.csv").read_text().count("\n") == 1


def test_count_zero_metric_scenario(tmp_path, capsys):
    cfg = json.loads((SCENARIOS / "metric_check.json").read_text())
    cfg["count"] = 0
    cfg.get("system", {}).pop("observable", None)
    code, _, _ = run(["run", write_cfg(tmp_path, cfg), "--out", str(tmp_path)], capsys)
    assert code == 0


def test_battery_deterministic(tmp_path, capsys):
    a, b = tmp_path / "a", tmp_path / "b"
    assert run(["battery", "theta-omega", "--seed", "11", "--count", "40", "--out", str(a)], capsys)[0] == 0
    assert run(["battery", "theta-omega", "--seed", "11", "--count", "40", "--out", str(b), "--workers", "1"],
               capsys)[0] == 0
    assert (a / "data.csv").read_bytes() == (b / "data.csv").read_bytes()
    c = tmp_path / "c"
    run(["battery", "theta-omega", "--seed", "12", "--count", "40", "--out", str(c)], capsys)
    assert (a / "data.csv").read_bytes() != (c / "data.csv").read_bytes()


def test_out_from_environment(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("WEAKGEO_OUT", str(tmp_path / "env"))
    assert run(["run", str(SCENARIOS / "triangle_octant.json")], capsys)[0] == 0
    assert (tmp_path / "env" / "report.json").exists()


def test_complex_amplitudes_accepted(tmp_path, capsys):
    cfg = {"version": 1, "kind": "triangle-phase",
           "system": {"triangle": [{"amplitudes": [1, 0]}, {"amplitudes": [1, 1]}, {"amplitudes": [1, [0, 1]]}]}}
    code, _, _ = run(["run", write_cfg(tmp_path, cfg), "--out", str(tmp_path)], capsys)
    assert code == 0
    report = json.loads((tmp_path / "report.json").read_text())
    assert report["values"]["solid_angle"] == pytest.approx(np.pi / 2, abs=1e-12)
    assert report["values"]["pancharatnam_phase"] == pytest.approx(-np.pi / 4, abs=1e-12)
