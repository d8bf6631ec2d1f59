import csv
import json
import math

import numpy as np
import pytest

from contact_sense.cli import main
from contact_sense.errors import ConfigError
from contact_sense.experiment import (FRICTION_TRACE_HEADER, NORMAL_TRACE_HEADER, PDF_GRID_POINTS,
                                      SUMMARY_HEADER, ExperimentConfig, RunSummary, Scenario, aggregate,
                                      emit_results, fmt, run_experiment, run_friction_sweep,
                                      run_normal_sweep)
from contact_sense.terrain import NOISELESS


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


def body(path):
    text = path.read_bytes()
    return text.split(b"\n", 1)[1]


def small(**kw):
    base = dict(seeds=(0, 1), inclinations=(0.1, 0.3), frictions=(0.5,))
    base.update(kw)
    return ExperimentConfig(**base)


def test_config_roundtrip():
    cfg = small(scenario="FRICTION_SWEEP", delta_mu=0.01)
    again = ExperimentConfig.from_dict(json.loads(json.dumps(cfg.to_dict())))
    assert again == cfg
    assert again.scenario is Scenario.FRICTION_SWEEP


@pytest.mark.parametrize("changes", [
    {"seeds": []},
    {"inclinations": [], "scenario": "NORMAL_SWEEP"},
    {"frictions": [1.5]},
    {"frictions": [], "scenario": "FRICTION_SWEEP"},
    {"scenario": "BOGUS"},
    {"eps_mu": 1.0},
    {"eps_lambda": 0.0},
    {"delta_mu": -0.1},
    {"bogus_key": 1},
    {"noise": {"sigma_contact": -1, "sigma_velocity": 0}},
    {"exploration": {"alpha": 0}},
])
def test_config_validation(changes):
    raw = small().to_dict()
    raw.update(changes)
    with pytest.raises(ConfigError):
        ExperimentConfig.from_dict(raw)


def test_load_errors(tmp_path):
    with pytest.raises(ConfigError):
        ExperimentConfig.load(tmp_path / "missing.json")
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ConfigError):
        ExperimentConfig.load(bad)
    bad.write_text("[1, 2]")
    with pytest.raises(ConfigError):
        ExperimentConfig.load(bad)


def test_fmt():
    assert fmt(True) == "true"
    assert fmt(3) == "3"
    assert fmt(0.1) == "0.10000000000000001"
    assert float(fmt(1 / 3)) == 1 / 3


def test_noiseless_normal_sweep_is_exact():
    cfg = small(inclinations=(0.1, 0.2, 0.3, 0.4, 0.5), noise=NOISELESS)
    runs = run_normal_sweep(cfg)
    assert len(runs) == 10
    assert all(r.error <= 1e-12 and r.converged for r in runs)


def test_empty_inclinations_rejected():
    with pytest.raises(ConfigError):
        small(inclinations=())


def test_friction_sweep_records_traces():
    cfg = small(scenario="FRICTION_SWEEP", frictions=(0.5,), delta_mu=0.05)
    (run, *_rest) = run_friction_sweep(cfg)
    assert run.converged and run.error <= 0.05 + 1e-12
    assert len(run.friction_trace) == run.steps
    steps = sorted({row[0] for row in run.pdf_rows})
    final = run.steps
    assert steps == sorted({max(0, final - o) for o in (30, 20, 10, 0)})
    assert len(run.pdf_rows) == len(steps) * PDF_GRID_POINTS


def test_single_run_pipeline():
    cfg = small(scenario="SINGLE_RUN", inclinations=(0.2,), frictions=(0.6,), seeds=(5,))
    runs = run_experiment(cfg)
    assert [r.scenario for r in runs] == ["SINGLE_RUN:normal", "SINGLE_RUN:friction"]
    normal, friction = runs
    assert normal.error < 1e-2
    assert friction.converged and friction.error <= 0.1


def test_emit_empty(tmp_path):
    paths = emit_results([], tmp_path, small())
    assert read_csv(paths["summary"]) == [SUMMARY_HEADER]
    assert read_csv(paths["trace_normal"]) == [NORMAL_TRACE_HEADER]
    assert read_csv(paths["trace_friction"]) == [FRICTION_TRACE_HEADER]
    manifest = json.loads(paths["manifest"].read_text())
    assert manifest["aggregates"] == {}
    assert ExperimentConfig.from_dict(manifest) == small()


def test_emit_one_normal_run(tmp_path):
    cfg = small(inclinations=(0.2,), seeds=(3,))
    paths = emit_results(run_normal_sweep(cfg), tmp_path, cfg)
    rows = read_csv(paths["summary"])
    assert len(rows) == 2
    assert rows[1][:3] == ["NORMAL_SWEEP", "3", "0.20000000000000001"]
    assert paths["summary"].read_bytes().count(b"\r") == 0


def test_emit_records_failed_runs(tmp_path):
    cfg = small(inclinations=(0.2,), seeds=(1,), extent=0.01)  # probes miss the patch
    (run,) = run_normal_sweep(cfg)
    assert not run.converged and math.isnan(run.error)
    paths = emit_results([run], tmp_path, cfg)
    assert read_csv(paths["summary"])[1][3] == "nan"


def test_rerun_from_manifest_is_byte_identical(tmp_path):
    cfg = small(scenario="SINGLE_RUN", inclinations=(0.3,), frictions=(0.5, 0.7), seeds=(11, 12))
    first = emit_results(run_experiment(cfg), tmp_path / "a", cfg)
    again_cfg = ExperimentConfig.load(first["manifest"])
    second = emit_results(run_experiment(again_cfg), tmp_path / "b", again_cfg)
    for key in ("summary", "trace_normal", "trace_friction", "pdf_grid"):
        assert first[key].read_bytes() == second[key].read_bytes()


def test_aggregates_match_recomputation(tmp_path):
    cfg = small(seeds=tuple(range(8)))
    paths = emit_results(run_normal_sweep(cfg), tmp_path, cfg)
    errs = np.array([float(r[3]) for r in read_csv(paths["summary"])[1:]])
    agg = json.loads(paths["manifest"].read_text())["aggregates"]["NORMAL_SWEEP"]
    assert agg["mean_error"] == pytest.approx(errs.mean(), rel=1e-12, abs=1e-300)
    # population standard deviation, recomputed by hand
    std = math.sqrt(sum((e - errs.mean()) ** 2 for e in errs) / len(errs))
    assert agg["std_error"] == pytest.approx(std, rel=1e-12)


def test_aggregate_skips_nan():
    runs = [RunSummary("X", 0, 0.1, 1.0, 1, True), RunSummary("X", 1, 0.1, math.nan, 0, False)]
    agg = aggregate(runs)["X"]
    assert agg["mean_error"] == 1.0 and agg["finite_runs"] == 1 and agg["converged_fraction"] == 0.5


# --- CLI


def test_cli_normal(tmp_path, capsys):
    assert main(["normal", "--inclination", "0.2", "--seed", "1", "--out", str(tmp_path)]) == 0
    assert "NORMAL_SWEEP" in capsys.readouterr().out
    assert len(read_csv(tmp_path / "summary.csv")) == 2


def test_cli_friction_with_noise_override(tmp_path):
    assert main(["friction", "--mu", "0.5", "--mu", "0.7", "--seed", "2", "--noise-sigma", "0",
                 "--delta-mu", "0.01", "--out", str(tmp_path)]) == 0
    manifest = json.loads((tmp_path / "manifest.json").read_text())
    assert manifest["config"]["noise"]["sigma_contact"] == 0.0
    assert manifest["config"]["delta_mu"] == 0.01
    assert len(read_csv(tmp_path / "summary.csv")) == 3


def test_cli_run_and_flag_override(tmp_path):
    cfg = small(scenario="NORMAL_SWEEP", output_dir=str(tmp_path / "ignored"))
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(cfg.to_dict()))
    out = tmp_path / "out"
    assert main(["run", "--config", str(path), "--out", str(out), "--seed", "9"]) == 0
    rows = read_csv(out / "summary.csv")
    assert {r[1] for r in rows[1:]} == {"9"}
    assert not (tmp_path / "ignored").exists()


def test_cli_rerun_manifest(tmp_path):
    assert main(["friction", "--mu", "0.6", "--seed", "4", "--out", str(tmp_path / "a")]) == 0
    assert main(["run", "--config", str(tmp_path / "a" / "manifest.json"), "--out", str(tmp_path / "b")]) == 0
    for name in ("summary.csv", "trace_friction.csv", "pdf_grid.csv"):
        assert body(tmp_path / "a" / name) == body(tmp_path / "b" / name)


def test_cli_errors(tmp_path, capsys):
    assert main(["friction", "--mu", "1.5"]) != 0
    assert "config error" in capsys.readouterr().err
    assert main(["run", "--config", str(tmp_path / "nope.json")]) != 0
    blocker = tmp_path / "file"
    blocker.write_text("x")
    assert main(["normal", "--inclination", "0.1", "--out", str(blocker / "sub")]) != 0
