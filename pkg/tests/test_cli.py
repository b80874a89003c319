"""
Tests for the command-line entry point
"""
import json
from pathlib import Path

import pandas as pd
import pytest

from rebsim.main import build_parser, main

BASE = {
    "protocol": {"kind": "B", "delta_la_ghz": -6.0},
    "losses": {"link": 0.0, "insertion": 0.0},
}


def _with_axes(*axes):
    return {**BASE, "sweep": {"axes": list(axes)}}


def test_params_reports_both_devices(write_config, capsys):
    assert main(["params", "--config", write_config(BASE)]) == 0
    report = json.loads(capsys.readouterr().out)
    assert set(report) == {"projector", "emission"}
    assert report["projector"]["C_dephased"] == pytest.approx(105, abs=1)
    assert report["emission"]["emission"]["p_coh"] == pytest.approx(0.481, abs=2e-3)
    assert set(report["projector"]["response"]) == {"dark", "bright"}


def test_params_csv(write_config, tmp_path):
    out = tmp_path / "params.csv"
    assert main(["params", "--config", write_config(BASE), "--format", "csv", "--out", str(out)]) == 0
    frame = pd.read_csv(out)
    assert list(frame.columns) == ["device", "quantity", "value"]
    assert "response.bright.r.abs" in set(frame["quantity"])


def test_run_json(write_config, capsys):
    assert main(["run", "--config", write_config(BASE)]) == 0
    outcome = json.loads(capsys.readouterr().out)
    assert outcome["error"] is None
    assert outcome["herald_pattern"] == "TF|FT"
    assert outcome["infidelity"] == pytest.approx(1.0 - outcome["fidelity"])


def test_sweep_writes_rows_and_metadata(write_config, tmp_path):
    config = write_config(_with_axes({"name": "delta_la", "min": -12, "max": 0, "count": 4}))
    out = tmp_path / "out" / "sweep.csv"
    assert main(["sweep", "--config", config, "--out", str(out), "--parallelism", "1"]) == 0
    frame = pd.read_csv(out)
    assert list(frame.columns)[:2] == ["delta_la", "success_probability"]
    assert len(frame) == 4
    meta = json.loads(Path(str(out) + ".meta.json").read_text(encoding="utf-8"))
    assert meta["rows"] == 4
    assert meta["workers"] == 1
    assert len(meta["config_hash"]) == 64


def test_empty_sweep_matches_run(write_config, tmp_path):
    config = write_config(BASE)
    run_out, sweep_out = tmp_path / "run.csv", tmp_path / "sweep.csv"
    assert main(["run", "--config", config, "--format", "csv", "--out", str(run_out)]) == 0
    assert main(["sweep", "--config", config, "--out", str(sweep_out)]) == 0
    assert run_out.read_text(encoding="utf-8") == sweep_out.read_text(encoding="utf-8")


def test_invalid_config_exit_code(write_config):
    assert main(["run", "--config", write_config({"protocol": {"kind": "Z"}})]) == 2


def test_missing_config_exit_code(tmp_path):
    assert main(["params", "--config", str(tmp_path / "absent.json")]) == 2


def test_numerical_failure_exit_code(write_config):
    document = {**BASE, "protocol": {"kind": "A", "alpha": 0.0}}
    assert main(["run", "--config", write_config(document)]) == 3


class TestPareto:
    @pytest.fixture
    def results(self, write_config, tmp_path):
        config = write_config(
            _with_axes(
                {"name": "delta_ac", "min": 0, "max": 60, "count": 2},
                {"name": "delta_la", "min": -12, "max": 0, "count": 5},
            )
        )
        out = tmp_path / "grid.csv"
        assert main(["sweep", "--config", config, "--out", str(out)]) == 0
        return out

    def test_frontier(self, results, tmp_path):
        out = tmp_path / "frontier.csv"
        assert main(["pareto", str(results), "--out", str(out)]) == 0
        frontier = pd.read_csv(out)
        assert 1 <= len(frontier) <= 10
        assert list(frontier["success_probability"]) == sorted(frontier["success_probability"])

    def test_group_by(self, results, tmp_path):
        out = tmp_path / "families.csv"
        assert main(["pareto", str(results), "--group-by", "delta_ac", "--out", str(out)]) == 0
        assert set(pd.read_csv(out)["delta_ac"]) <= {0.0, 60.0}

    def test_unknown_group(self, results):
        assert main(["pareto", str(results), "--group-by", "kappa"]) == 3

    def test_infeasible_bound(self, results):
        assert main(["pareto", str(results), "--max-infidelity", "1e-300"]) == 4

    def test_missing_results(self, tmp_path):
        assert main(["pareto", str(tmp_path / "absent.csv")]) == 2


def test_group_by_and_bound_are_exclusive():
    with pytest.raises(SystemExit):
        build_parser().parse_args(["pareto", "r.csv", "--group-by", "g", "--max-infidelity", "0.1"])


def test_undefined_quantities_are_null(write_config, capsys):
    device = {"gamma_mhz": 92.5, "gamma_r_mhz": 0.0, "g_ghz": 8.38, "kappa_r_ghz": 10.9, "kappa_t_ghz": 10.9}
    document = {**BASE, "system": {"projector": device}}
    assert main(["params", "--config", write_config(document)]) == 0

    def reject(constant):
        raise ValueError(f"non-standard JSON constant {constant}")

    report = json.loads(capsys.readouterr().out, parse_constant=reject)
    assert report["projector"]["F_p"] is None
    assert report["projector"]["emission"] is None
    assert report["emission"]["F_p"] == pytest.approx(43.04, abs=0.05)
