"""``contact-sense`` command line entry point."""
from __future__ import annotations

import argparse
import dataclasses
import json
import sys

from .errors import ConfigError
from .experiment import ExperimentConfig, Scenario, aggregate, emit_results, run_experiment


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--noise-sigma", type=float, help="contact position noise std (m)")
    common.add_argument("--velocity-sigma", type=float, help="foot velocity noise std (m/s)")
    common.add_argument("--out", help="output directory")
    common.add_argument("--config", help="JSON experiment config; flags override its values")

    p = argparse.ArgumentParser(prog="contact-sense", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", parents=[common], help="run an experiment from a config file")
    run.add_argument("--seed", type=int, action="append", help="replace the seed list (repeatable)")

    normal = sub.add_parser("normal", parents=[common], help="surface normal estimation on a wedge")
    normal.add_argument("--inclination", type=float, action="append", required=True,
                        help="wedge inclination in radians (repeatable)")
    normal.add_argument("--seed", type=int, action="append", help="seed (repeatable)")

    friction = sub.add_parser("friction", parents=[common], help="friction estimation on flat ground")
    friction.add_argument("--mu", type=float, action="append", required=True,
                          help="true friction coefficient (repeatable)")
    friction.add_argument("--seed", type=int, action="append", help="seed (repeatable)")
    friction.add_argument("--delta-mu", type=float, help="friction reduction step")
    return p


def build_config(args) -> ExperimentConfig:
    base = ExperimentConfig.load(args.config).to_dict() if args.config else ExperimentConfig().to_dict()
    if args.command == "run" and not args.config:
        raise ConfigError("run needs --config")
    if args.command == "normal":
        base["scenario"] = Scenario.NORMAL_SWEEP.value
        base["inclinations"] = args.inclination
    elif args.command == "friction":
        base["scenario"] = Scenario.FRICTION_SWEEP.value
        base["frictions"] = args.mu
        if args.delta_mu is not None:
            base["delta_mu"] = args.delta_mu
    if args.seed:
        base["seeds"] = args.seed
    elif args.command != "run" and not args.config:
        base["seeds"] = [0]
    if args.noise_sigma is not None:
        base["noise"]["sigma_contact"] = args.noise_sigma
    if args.velocity_sigma is not None:
        base["noise"]["sigma_velocity"] = args.velocity_sigma
    if args.out is not None:
        base["output_dir"] = args.out
    return ExperimentConfig.from_dict(base)


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        cfg = build_config(args)
        summaries = run_experiment(cfg)
        paths = emit_results(summaries, cfg.output_dir, cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 3
    for name, stats in aggregate(summaries).items():
        mean, std = stats["mean_error"], stats["std_error"]
        shown = "n/a" if mean is None else f"{mean:.3e} +/- {std:.3e}"
        print(f"{name}: runs={stats['runs']} error={shown} "
              f"converged={stats['converged_fraction']:.2f} mean_steps={stats['mean_steps']:.1f}")
    print(f"wrote {paths['manifest'].parent}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
