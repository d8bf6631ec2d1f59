"""Friction estimate accuracy and probing cost against the reduction step delta_mu.

    python3 scripts/friction_step_sweep.py --seeds 100 --velocity-sigma 0.002
"""
import argparse
from dataclasses import replace

import numpy as np

from contact_sense.experiment import ExperimentConfig, run_friction_sweep
from contact_sense.terrain import NoiseModel


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--seeds", type=int, default=100)
    p.add_argument("--steps", type=float, nargs="+", default=[0.01, 0.02, 0.05, 0.1])
    p.add_argument("--velocity-sigma", type=float, default=0.0)
    args = p.parse_args()

    base = ExperimentConfig(scenario="FRICTION_SWEEP", seeds=tuple(range(args.seeds)),
                            noise=NoiseModel(0.002, args.velocity_sigma))
    print(f"{'delta_mu':>8} {'mean_abs_err':>12} {'overshoot':>9} {'steps':>7} {'conv':>5}")
    for dm in args.steps:
        runs = run_friction_sweep(replace(base, delta_mu=dm))
        err = np.array([r.error for r in runs])
        over = np.mean([r.friction_trace[-1][2] > r.param + 1e-12 for r in runs if r.friction_trace])
        print(f"{dm:8.3f} {np.nanmean(err):12.4e} {over:9.3f} "
              f"{np.mean([r.steps for r in runs]):7.1f} {np.mean([r.converged for r in runs]):5.2f}")


if __name__ == "__main__":
    main()
