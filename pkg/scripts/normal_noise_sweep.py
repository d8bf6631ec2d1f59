"""Mean squared normal error against contact noise level, one row per sigma.

    python3 scripts/normal_noise_sweep.py --seeds 100
"""
import argparse
from dataclasses import replace

import numpy as np

from contact_sense.experiment import ExperimentConfig, run_normal_sweep
from contact_sense.terrain import NoiseModel


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--seeds", type=int, default=100)
    p.add_argument("--sigmas", type=float, nargs="+", default=[0.0, 0.001, 0.002, 0.004, 0.008])
    args = p.parse_args()

    base = ExperimentConfig(seeds=tuple(range(args.seeds)))
    print(f"{'sigma':>8} {'mean_sq_err':>12} {'std':>12} {'rounds':>7} {'conv':>5}")
    for sigma in args.sigmas:
        runs = run_normal_sweep(replace(base, noise=NoiseModel(sigma, base.noise.sigma_velocity)))
        err = np.array([r.error for r in runs])
        print(f"{sigma:8.4f} {err.mean():12.4e} {err.std():12.4e} "
              f"{np.mean([r.steps for r in runs]):7.2f} {np.mean([r.converged for r in runs]):5.2f}")


if __name__ == "__main__":
    main()
