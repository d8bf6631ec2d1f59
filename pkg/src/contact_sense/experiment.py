"""Experiment harness: slope sweeps, friction sweeps, and CSV/JSON emission."""
from __future__ import annotations

import csv
import enum
import json
import math
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np

from . import __version__
from .errors import ConfigError, ContactSenseError
from .exploration import ExplorationConfig, run_exploration
from .friction_est import FrictionResult, ImpedanceGains, estimate_friction
from .mathcore import Rng, beta_pdf
from .normal_est import estimate_until_confident, squared_error
from .terrain import NoiseModel, make_wedge

PDF_GRID_POINTS = 201
PDF_SNAPSHOT_OFFSETS = (30, 20, 10, 0)
ORIGIN = np.zeros(3)
# wedge friction for normal-only runs; the normal estimator never touches it
NORMAL_SWEEP_FRICTION = 0.5


class Scenario(str, enum.Enum):
    NORMAL_SWEEP = "NORMAL_SWEEP"
    FRICTION_SWEEP = "FRICTION_SWEEP"
    SINGLE_RUN = "SINGLE_RUN"


@dataclass(frozen=True)
class ExperimentConfig:
    scenario: Scenario = Scenario.NORMAL_SWEEP
    inclinations: tuple = (0.1, 0.2, 0.3, 0.4, 0.5)
    frictions: tuple = (0.4, 0.5, 0.6, 0.7, 0.8)
    seeds: tuple = tuple(range(10))
    noise: NoiseModel = field(default_factory=NoiseModel)
    exploration: ExplorationConfig = field(default_factory=ExplorationConfig)
    gains: ImpedanceGains = field(default_factory=ImpedanceGains)
    eps_lambda: float = 0.95
    eps_mu: float = 0.9
    delta_mu: float = 0.05
    residual_tol: float = 0.3
    slip_eps: float | None = None
    slip_eps_relative: float = 0.5
    max_rounds: int = 10
    max_steps: int = 200
    speed: float = 0.05
    extent: float = 0.25
    output_dir: str = "results"

    def __post_init__(self):
        try:
            object.__setattr__(self, "scenario", Scenario(self.scenario))
        except ValueError as exc:
            raise ConfigError(f"unknown scenario {self.scenario!r}") from exc
        for name in ("inclinations", "frictions"):
            object.__setattr__(self, name, tuple(float(v) for v in getattr(self, name)))
        object.__setattr__(self, "seeds", tuple(int(s) for s in self.seeds))
        self.validate()

    def validate(self):
        if not self.seeds:
            raise ConfigError("seed list must be nonempty")
        if any(not 0 <= s < 2**64 for s in self.seeds):
            raise ConfigError("seeds must be 64-bit unsigned integers")
        needs_incl = self.scenario in (Scenario.NORMAL_SWEEP, Scenario.SINGLE_RUN)
        needs_fric = self.scenario in (Scenario.FRICTION_SWEEP, Scenario.SINGLE_RUN)
        if needs_incl and not self.inclinations:
            raise ConfigError("inclination list must be nonempty")
        if any(not abs(t) < math.pi / 2 for t in self.inclinations):
            raise ConfigError("inclinations must satisfy |theta| < pi/2")
        if needs_fric and not self.frictions:
            raise ConfigError("friction list must be nonempty")
        if any(not 0 < m <= 1 for m in self.frictions):
            raise ConfigError("frictions must lie in (0, 1]")
        if not 0 < self.eps_lambda < 1:
            raise ConfigError("eps_lambda must lie in (0, 1)")
        if not 0 < self.eps_mu < 1:
            raise ConfigError("eps_mu must lie in (0, 1)")
        if not 0 < self.delta_mu < 1:
            raise ConfigError("delta_mu must lie in (0, 1)")
        if not self.residual_tol > 0:
            raise ConfigError("residual_tol must be > 0")
        if self.slip_eps is not None and not self.slip_eps > 0:
            raise ConfigError("slip_eps must be > 0")
        if not self.slip_eps_relative > 0:
            raise ConfigError("slip_eps_relative must be > 0")
        if self.max_rounds < 0 or self.max_steps < 0:
            raise ConfigError("max_rounds and max_steps must be >= 0")
        if not self.speed > 0 or not self.extent > 0:
            raise ConfigError("speed and extent must be > 0")

    def to_dict(self) -> dict:
        d = {f.name: getattr(self, f.name) for f in fields(self)}
        d["scenario"] = self.scenario.value
        d["inclinations"] = list(self.inclinations)
        d["frictions"] = list(self.frictions)
        d["seeds"] = list(self.seeds)
        d["noise"] = asdict(self.noise)
        d["exploration"] = asdict(self.exploration)
        d["exploration"]["thetas"] = list(self.exploration.thetas)
        d["gains"] = asdict(self.gains)
        return d

    @classmethod
    def from_dict(cls, raw: dict) -> "ExperimentConfig":
        if "config" in raw and isinstance(raw["config"], dict):
            raw = raw["config"]  # a manifest written by emit_results
        known = {f.name for f in fields(cls)}
        unknown = set(raw) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        kw = dict(raw)
        try:
            if "noise" in kw:
                kw["noise"] = NoiseModel(**kw["noise"])
            if "exploration" in kw:
                kw["exploration"] = ExplorationConfig(**kw["exploration"])
            if "gains" in kw:
                kw["gains"] = ImpedanceGains(**kw["gains"])
            return cls(**kw)
        except ConfigError:
            raise
        except (TypeError, ContactSenseError) as exc:
            raise ConfigError(str(exc)) from exc

    @classmethod
    def load(cls, path) -> "ExperimentConfig":
        try:
            with open(path) as fh:
                raw = json.load(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid JSON in {path}: {exc}") from exc
        if not isinstance(raw, dict):
            raise ConfigError(f"config {path} must be a JSON object")
        return cls.from_dict(raw)


@dataclass
class RunSummary:
    scenario: str
    seed: int
    param: float
    error: float  # squared normal error, or |mu_hat - mu*|; NaN when the run failed
    steps: int
    converged: bool
    normal_trace: list = field(default_factory=list)
    friction_trace: list = field(default_factory=list)
    pdf_rows: list = field(default_factory=list)


def _normal_run(cfg: ExperimentConfig, scenario: str, inclination: float, friction: float, seed: int):
    patch = make_wedge(inclination, friction, cfg.extent)
    rng = Rng(seed)
    try:
        res = estimate_until_confident(patch, ORIGIN, cfg.exploration, cfg.noise, rng,
                                       eps_lambda=cfg.eps_lambda, max_rounds=cfg.max_rounds,
                                       residual_tol=cfg.residual_tol)
    except ContactSenseError:
        return RunSummary(scenario, seed, inclination, math.nan, 0, False), None, patch, rng
    err = squared_error(res.estimate.normal, patch.true_normal) if res.estimate is not None else math.nan
    trace = [(r.round, r.k, *r.n_tilde, r.kappa, r.alpha, r.beta, r.confidence) for r in res.trace]
    summary = RunSummary(scenario, seed, inclination, err, res.rounds, res.converged, normal_trace=trace)
    return summary, res, patch, rng


def pdf_snapshots(result: FrictionResult, points: int = PDF_GRID_POINTS) -> list:
    """Beta posterior density on an even grid at steps K-30, K-20, K-10, K (clamped at 0)."""
    final = len(result.trace)
    steps = sorted({max(0, final - off) for off in PDF_SNAPSHOT_OFFSETS})
    grid = np.linspace(0.0, 1.0, points)
    rows = []
    for step in steps:
        st = result.state_at(step)
        rows.extend((step, float(x), beta_pdf(float(x), st.a, st.b)) for x in grid)
    return rows


def _friction_run(cfg: ExperimentConfig, scenario: str, patch, n_hat, contacts, rng, mu_true: float, seed: int):
    try:
        res = estimate_friction(patch, n_hat, contacts, cfg.gains, cfg.noise, rng,
                                eps_mu=cfg.eps_mu, delta_mu=cfg.delta_mu, max_steps=cfg.max_steps,
                                speed=cfg.speed, slip_eps=cfg.slip_eps,
                                slip_eps_relative=cfg.slip_eps_relative)
    except ContactSenseError:
        return RunSummary(scenario, seed, mu_true, math.nan, 0, False)
    trace = [(r.k, r.z, r.mu, r.a, r.b, r.p_stop) for r in res.trace]
    return RunSummary(scenario, seed, mu_true, abs(res.state.mu - mu_true), len(res.trace),
                      res.converged, friction_trace=trace, pdf_rows=pdf_snapshots(res))


def run_normal_sweep(cfg: ExperimentConfig) -> list:
    if not cfg.inclinations:
        raise ConfigError("inclination list must be nonempty")
    out = []
    for theta in cfg.inclinations:
        for seed in cfg.seeds:
            summary, *_ = _normal_run(cfg, Scenario.NORMAL_SWEEP.value, theta, NORMAL_SWEEP_FRICTION, seed)
            out.append(summary)
    return out


def run_friction_sweep(cfg: ExperimentConfig) -> list:
    """Friction estimation on flat ground with the true normal handed to the estimator."""
    if not cfg.frictions:
        raise ConfigError("friction list must be nonempty")
    if any(not 0 < m <= 1 for m in cfg.frictions):
        raise ConfigError("frictions must lie in (0, 1]")
    out = []
    for mu in cfg.frictions:
        for seed in cfg.seeds:
            patch = make_wedge(0.0, mu, cfg.extent)
            rng = Rng(seed)
            contacts = run_exploration(patch, ORIGIN, cfg.exploration, cfg.noise, rng)
            out.append(_friction_run(cfg, Scenario.FRICTION_SWEEP.value, patch, patch.true_normal,
                                     contacts, rng, mu, seed))
    return out


def run_single(cfg: ExperimentConfig) -> list:
    """Full pipeline: estimate the normal, then probe friction with the estimated normal."""
    out = []
    for theta in cfg.inclinations:
        for mu in cfg.frictions:
            for seed in cfg.seeds:
                summary, res, patch, rng = _normal_run(cfg, "SINGLE_RUN:normal", theta, mu, seed)
                out.append(summary)
                if res is None or res.estimate is None:
                    out.append(RunSummary("SINGLE_RUN:friction", seed, mu, math.nan, 0, False))
                    continue
                out.append(_friction_run(cfg, "SINGLE_RUN:friction", patch, res.estimate.normal,
                                         res.contacts, rng, mu, seed))
    return out


def run_experiment(cfg: ExperimentConfig) -> list:
    return {
        Scenario.NORMAL_SWEEP: run_normal_sweep,
        Scenario.FRICTION_SWEEP: run_friction_sweep,
        Scenario.SINGLE_RUN: run_single,
    }[cfg.scenario](cfg)


def aggregate(summaries) -> dict:
    """Mean and population std of finite per-run errors, grouped by scenario label."""
    groups = {}
    for s in summaries:
        groups.setdefault(s.scenario, []).append(s)
    out = {}
    for name, runs in groups.items():
        errs = np.array([r.error for r in runs if math.isfinite(r.error)])
        out[name] = {
            "runs": len(runs),
            "finite_runs": int(errs.size),
            "mean_error": float(errs.mean()) if errs.size else None,
            "std_error": float(errs.std()) if errs.size else None,
            "converged_fraction": sum(r.converged for r in runs) / len(runs),
            "mean_steps": float(np.mean([r.steps for r in runs])),
        }
    return out


# --------------------------------------------------------------------------
# output

SUMMARY_HEADER = ["scenario", "seed", "param", "error", "steps", "converged"]
NORMAL_TRACE_HEADER = ["scenario", "seed", "param", "round", "k", "n_tilde_x", "n_tilde_y",
                       "n_tilde_z", "kappa", "alpha", "beta", "confidence"]
FRICTION_TRACE_HEADER = ["scenario", "seed", "param", "k", "z", "mu", "a", "b", "p_stop"]
PDF_HEADER = ["scenario", "seed", "param", "step", "mu", "density"]


def fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.17g}"
    return str(value)


def _write_csv(path: Path, header, rows):
    try:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            for row in rows:
                w.writerow([fmt(v) for v in row])
    except OSError as exc:
        raise OSError(f"failed to write {path}: {exc}") from exc


def emit_results(summaries, output_dir, cfg: ExperimentConfig | None = None) -> dict:
    """Write summary/trace/pdf CSVs and a manifest that reproduces the run."""
    out = Path(output_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create output directory {out}: {exc}") from exc

    def keyed(s, rows):
        return ((s.scenario, s.seed, s.param, *r) for r in rows)

    paths = {
        "summary": out / "summary.csv",
        "trace_normal": out / "trace_normal.csv",
        "trace_friction": out / "trace_friction.csv",
        "pdf_grid": out / "pdf_grid.csv",
        "manifest": out / "manifest.json",
    }
    _write_csv(paths["summary"], SUMMARY_HEADER,
               ((s.scenario, s.seed, s.param, s.error, s.steps, s.converged) for s in summaries))
    _write_csv(paths["trace_normal"], NORMAL_TRACE_HEADER,
               (r for s in summaries for r in keyed(s, s.normal_trace)))
    _write_csv(paths["trace_friction"], FRICTION_TRACE_HEADER,
               (r for s in summaries for r in keyed(s, s.friction_trace)))
    _write_csv(paths["pdf_grid"], PDF_HEADER,
               (r for s in summaries for r in keyed(s, s.pdf_rows)))

    manifest = {
        "version": __version__,
        "config": cfg.to_dict() if cfg is not None else None,
        "aggregates": aggregate(summaries),
        "files": sorted(p.name for k, p in paths.items() if k != "manifest"),
    }
    try:
        with open(paths["manifest"], "w", newline="\n") as fh:
            json.dump(manifest, fh, indent=2, sort_keys=True)
            fh.write("\n")
    except OSError as exc:
        raise OSError(f"failed to write {paths['manifest']}: {exc}") from exc
    return paths
