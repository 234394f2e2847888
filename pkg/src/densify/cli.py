"""Command-line front end.

Subcommands: validate (feasibility + scaling echo), sweep (Monte Carlo
density sweeps to CSV), asymptote (dense-limit report), compare (sweep vs
report convergence verdict).  The DENSIFY_THREADS environment variable caps
worker processes.
"""

from __future__ import annotations

import argparse
import sys

from .config import ConfigError, load_config
from .harness import cmd_asymptote, cmd_compare, cmd_sweep, cmd_validate


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="densify",
        description="Density scaling of SINR and area spectral efficiency "
        "in beamforming cellular networks",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_config_args(p, trials=False):
        p.add_argument("--config", required=True, help="experiment YAML file")
        p.add_argument("--out", help="output directory (overrides config)")
        p.add_argument("--seed", type=int, help="master seed (overrides config)")
        if trials:
            p.add_argument("--trials", type=int, help="trials per density point")

    p = sub.add_parser("validate", help="check path-loss feasibility, echo scaling constants")
    add_config_args(p)

    p = sub.add_parser("sweep", help="run the density sweeps and write CSVs")
    add_config_args(p, trials=True)

    # --trials does not change the limit, but it participates in the config
    # hash, so it must match an overridden sweep for compare to pair them.
    p = sub.add_parser("asymptote", help="evaluate the dense-network limit")
    add_config_args(p, trials=True)
    p.add_argument(
        "--mc",
        nargs="?",
        const=100_000,
        default=None,
        type=int,
        metavar="DRAWS",
        help="cross-check the limit with a Monte Carlo sample (default 100000 draws)",
    )

    p = sub.add_parser("compare", help="verdict on sweep-vs-limit convergence")
    p.add_argument("sweep_csv", help="sweep CSV from the linear regime")
    p.add_argument("report_json", help="asymptote.json from the same config")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "compare":
        return cmd_compare(args.sweep_csv, args.report_json)
    try:
        config = load_config(
            args.config,
            seed_override=args.seed,
            trials_override=getattr(args, "trials", None),
            out_override=args.out,
        )
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    if args.command == "validate":
        return cmd_validate(config)
    if args.command == "sweep":
        return cmd_sweep(config)
    if args.command == "asymptote":
        return cmd_asymptote(config, mc_draws=args.mc)
    raise AssertionError(f"unhandled command {args.command}")


if __name__ == "__main__":
    sys.exit(main())
