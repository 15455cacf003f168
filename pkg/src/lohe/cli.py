"""Command-line experiment driver.

    lohe <subcommand> --config <path> --out <dir> [--seed <u64>] [--threads <n>]

Subcommands: simulate, converge, practical-sync, reduction-checks,
field-fluctuation.  Each writes <subcommand>.csv and manifest.json into the
output directory.  Exit status: 0 when all certified bounds and identities
hold, 2 when one fails, 1 on usage or configuration errors.
"""

from __future__ import annotations

import argparse
import dataclasses
import sys
from pathlib import Path

from . import __version__
from ._kernels import BACKEND
from .config import ConfigError, parse_config
from .csvio import write_manifest
from .experiments import (
    run_converge,
    run_field_fluctuation,
    run_practical_sync,
    run_reduction_checks,
    run_simulate,
)

SUBCOMMANDS = {
    "simulate": lambda cfg, threads: run_simulate(cfg),
    "converge": run_converge,
    "practical-sync": lambda cfg, threads: run_practical_sync(cfg),
    "reduction-checks": lambda cfg, threads: run_reduction_checks(cfg),
    "field-fluctuation": lambda cfg, threads: run_field_fluctuation(cfg),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lohe",
        description="Run verification experiments for the coupled "
                    "unitary-oscillator model and its mean-field limit.")
    sub = parser.add_subparsers(dest="subcommand", required=True)
    for name in SUBCOMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="JSON scenario file")
        p.add_argument("--out", required=True, help="output directory")
        p.add_argument("--seed", type=int, default=None,
                       help="override the config seed")
        p.add_argument("--threads", type=int, default=1,
                       help="parallel jobs for sweeps (output is identical "
                            "for any thread count)")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        text = Path(args.config).read_text()
    except OSError as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return 1
    try:
        cfg = parse_config(text)
        if args.seed is not None:
            cfg = dataclasses.replace(cfg, seed=args.seed)
        if args.threads < 1:
            raise ConfigError("--threads must be >= 1")
        report, checks = SUBCOMMANDS[args.subcommand](cfg, args.threads)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    report.write(out / f"{args.subcommand}.csv")
    write_manifest(out / "manifest.json", args.subcommand, cfg.resolved(),
                   checks, __version__, BACKEND)

    failed = [k for k, v in checks.items() if isinstance(v, bool) and not v]
    for name, value in checks.items():
        tag = value if not isinstance(value, bool) else ("ok" if value else "FAILED")
        print(f"{args.subcommand}: {name} = {tag}")
    if failed:
        print(f"{args.subcommand}: bound violations: {', '.join(failed)}",
              file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
