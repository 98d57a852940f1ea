import csv
import json
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from fdilab import ConfigError
from fdilab.cli import main, run
from fdilab.studies import STUDIES, run_study, scenario_from_dict

CONFIGS = Path(__file__).resolve().parents[1] / "configs"
SMALL_MODEL = {"omega0": 1.0, "omegas": [0.7, 1.3, 2.1], "epsilons": [0.3, 0.4, 0.5]}


def write(tmp_path, doc, name="cfg.json"):
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return path


def read_csv(path):
    with open(path) as fh:
        return list(csv.DictReader(fh))


class TestScenario:
    def test_defaults(self):
        sc = scenario_from_dict({"model": SMALL_MODEL})
        assert sc.n_steps == 101 and sc.energy_function == ["thermal"]
        assert sc.t_grid[0] == 0.0 and sc.t_grid[-1] == 10.0

    @pytest.mark.parametrize(
        "doc",
        [
            {"model": SMALL_MODEL, "colour": 1},
            {"model": SMALL_MODEL, "n_steps": 1},
            {"model": SMALL_MODEL, "t_max": 0},
            {"model": SMALL_MODEL, "temperatures": [-1]},
            {"model": SMALL_MODEL, "temperatures": []},
            {"model": SMALL_MODEL, "energy_function": "quantum"},
            {"model": SMALL_MODEL, "study": "nope"},
            {"model": {"omega0": 1.0, "omegas": [1.0], "epsilons": [2.0]}},
            {"model": SMALL_MODEL, "n_steps": "many"},
            ["not", "an", "object"],
        ],
    )
    def test_rejected(self, doc):
        with pytest.raises(ConfigError):
            scenario_from_dict(doc)


class TestExitCodes:
    def test_ok_writes_outputs(self, tmp_path):
        cfg = write(tmp_path, {"model": SMALL_MODEL, "t_max": 5, "n_steps": 11})
        assert run("fd-scan", cfg, tmp_path / "out") == 0
        rows = read_csv(tmp_path / "out" / "fd-scan.csv")
        assert len(rows) == 11
        assert list(rows[0])[:4] == ["model_hash", "energy_function", "T", "t"]
        summary = json.loads((tmp_path / "out" / "fd-scan-summary.json").read_text())
        assert set(summary) >= {"scenario", "verdicts", "timing"}
        for v in summary["verdicts"]:
            assert set(v) >= {"claim", "status", "worst_residual", "at_t", "at_T"}
            assert v["status"] in ("holds", "violated", "not-applicable")

    def test_config_errors(self, tmp_path):
        assert run("fd-scan", tmp_path / "missing.json", tmp_path) == 2
        bad = tmp_path / "bad.json"
        bad.write_text("{not json")
        assert run("fd-scan", bad, tmp_path) == 2
        assert run("no-such-study", write(tmp_path, {}), tmp_path) == 2
        mismatch = write(tmp_path, {"study": "d-scan", "model": SMALL_MODEL})
        assert run("fd-scan", mismatch, tmp_path) == 2

    def test_numerical_failure(self, tmp_path, monkeypatch):
        from fdilab import StepFailure
        import fdilab.studies as studies

        def boom(_):
            raise StepFailure("integrator gave up")

        monkeypatch.setitem(studies.STUDIES, "fd-scan", boom)
        assert run("fd-scan", write(tmp_path, {"model": SMALL_MODEL}), tmp_path) == 3

    def test_violation_still_writes_data(self, tmp_path):
        # the no-zero-point variant is expected to fail non-negativity: report, do not abort
        doc = {"model": {"omega0": 1.0, "drude": {"gamma": 0.1, "alpha": 1.0, "omega_max": 10.0,
                                                  "n_modes": 100}},
               "temperatures": [10.0], "energy_function": ["no_zero_point"], "t_max": 1.0, "n_steps": 5}
        code = run("continuum-study", write(tmp_path, doc), tmp_path / "o")
        summary = json.loads((tmp_path / "o" / "continuum-study-summary.json").read_text())
        assert code == 4
        assert summary["verdicts"][0]["status"] == "violated"
        assert len(read_csv(tmp_path / "o" / "continuum-study.csv")) == 5

    def test_seed_and_threads_flags(self, tmp_path, monkeypatch):
        doc = {"model": {"omega0": 1.0}, "t_max": 10, "n_steps": 101, "search": {"n_candidates": 6}}
        cfg = write(tmp_path, doc)
        monkeypatch.setenv("FDI_LAB_THREADS", "2")
        assert main(["neg-dissipation-search", "--config", str(cfg), "--out", str(tmp_path / "a"),
                     "--seed", "5", "-q"]) in (0, 4)
        summary = json.loads((tmp_path / "a" / "neg-dissipation-search-summary.json").read_text())
        assert summary["scenario"]["seed"] == 5
        monkeypatch.setenv("FDI_LAB_THREADS", "zero")
        assert run("neg-dissipation-search", cfg, tmp_path / "b") == 2

    def test_console_script(self, tmp_path):
        cfg = write(tmp_path, {"model": SMALL_MODEL, "t_max": 1, "n_steps": 3})
        proc = subprocess.run(
            [sys.executable, "-m", "fdilab.cli", "fd-scan", "--config", str(cfg), "--out", str(tmp_path)],
            capture_output=True, text=True,
        )
        assert proc.returncode == 0, proc.stderr
        assert (tmp_path / "fd-scan.csv").exists()


class TestStudies:
    def test_uncoupled_fd_scan_residuals_zero(self, tmp_path):
        cfg = write(tmp_path, {"model": {"omega0": 1.3}, "temperatures": [0.0, 1.0], "t_max": 20,
                               "n_steps": 41})
        assert run("fd-scan", cfg, tmp_path) == 0
        for row in read_csv(tmp_path / "fd-scan.csv"):
            for col in ("fd15_lhs", "fd17_residual", "ref2_residual"):
                assert float(row[col]) == 0.0
        summary = json.loads((tmp_path / "fd-scan-summary.json").read_text())
        statuses = {v["claim"]: v["status"] for v in summary["verdicts"]}
        assert statuses["ref2_residual_negative_somewhere"] == "not-applicable"

    def test_d_scan_state_columns_agree(self):
        sc = scenario_from_dict({"model": SMALL_MODEL, "initial_states": ["ground", "squeezed(0.8, 0.3)"],
                                 "temperatures": [0.0, 1.0], "t_max": 10, "n_steps": 21})
        res = run_study("d-scan", sc)
        for row in res.rows:
            a, b = row["D[ground]"], row["D[squeezed(0.8, 0.3)]"]
            assert abs(a - b) <= 1e-12 * max(1.0, abs(a))
        assert not res.violated

    def test_search_is_deterministic(self, tmp_path):
        doc = {"model": {"omega0": 1.0}, "seed": 3, "t_max": 20, "n_steps": 401,
               "search": {"n_candidates": 20}}
        cfg = write(tmp_path, doc)
        run("neg-dissipation-search", cfg, tmp_path / "a", threads=1)
        run("neg-dissipation-search", cfg, tmp_path / "b", threads=3)
        a = (tmp_path / "a" / "neg-dissipation-search.csv").read_bytes()
        b = (tmp_path / "b" / "neg-dissipation-search.csv").read_bytes()
        assert a == b

    def test_threaded_grid_merge_is_ordered(self):
        doc = {"model": SMALL_MODEL, "temperatures": [0.0, 2.0], "t_max": 6, "n_steps": 13}
        serial = run_study("fd-scan", scenario_from_dict(doc))
        sc = scenario_from_dict(doc)
        sc.threads = 4
        assert run_study("fd-scan", sc).rows == serial.rows

    def test_appendix2_demo_verdicts(self):
        sc = scenario_from_dict({"initial_states": ["ground"], "t_max": 2, "n_steps": 5})
        res = run_study("appendix2-demo", sc)
        assert [v.status for v in res.verdicts] == ["holds"] * 3

    def test_fd16_check(self):
        sc = scenario_from_dict({"model": SMALL_MODEL, "x_grid": [0.2, 1.0], "t_max": 4, "n_steps": 3})
        res = run_study("fd16-check", sc)
        assert len(res.rows) == 6 and not res.violated

    def test_appendix1_skips_origin(self):
        sc = scenario_from_dict({"model": SMALL_MODEL, "temperatures": [1.0], "t_max": 4, "n_steps": 5})
        res = run_study("appendix1-check", sc)
        assert res.rows[0]["skipped"] and not res.rows[1]["skipped"]
        assert not res.violated

    def test_moments_study(self):
        sc = scenario_from_dict({"model": SMALL_MODEL, "initial_states": ["ground", "thermal(1)"],
                                 "t_max": 4, "n_steps": 5})
        res = run_study("moments", sc)
        assert len(res.rows) == 10 and not res.violated

    def test_bad_search_block(self):
        sc = scenario_from_dict({"search": {"n_candidate": 3}})
        with pytest.raises(ConfigError):
            run_study("neg-dissipation-search", sc)

    @pytest.mark.parametrize("path", sorted(CONFIGS.glob("*.json")), ids=lambda p: p.stem)
    def test_committed_configs_validate(self, path):
        doc = json.loads(path.read_text())
        sc = scenario_from_dict(doc)
        assert sc.study in STUDIES
