"""Command-line interface.

Subcommands:
  run <config>       execute an experiment (a run manifest is also accepted)
  validate <config>  check a configuration and report every problem
  oracle <suite>     print independent reference values for a named suite

Exit codes: 0 success, 1 configuration error, 2 runtime failure.
"""

from __future__ import annotations

import argparse
import sys

from .harness import ConfigError, load_config, run_experiment
from .oracles import ORACLE_SUITES


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="paelast",
        description="Photoacoustic elastography with band-limitation texture.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run an experiment from a JSON config or manifest")
    p_run.add_argument("config", help="path to the configuration file")
    p_run.add_argument("--no-plots", action="store_true", help="skip plot emission")

    p_val = sub.add_parser("validate", help="validate a configuration file")
    p_val.add_argument("config", help="path to the configuration file")

    p_orc = sub.add_parser("oracle", help="print reference values from an oracle suite")
    p_orc.add_argument("suite", choices=sorted(ORACLE_SUITES), help="suite name")

    args = parser.parse_args(argv)

    if args.command == "validate":
        try:
            load_config(args.config)
        except ConfigError as exc:
            print(exc, file=sys.stderr)
            return 1
        print("configuration is valid")
        return 0

    if args.command == "run":
        try:
            cfg = load_config(args.config)
        except ConfigError as exc:
            print(exc, file=sys.stderr)
            return 1
        try:
            result = run_experiment(cfg, emit=not args.no_plots)
        except Exception as exc:  # config was valid: any failure here is runtime
            print(f"run failed: {exc}", file=sys.stderr)
            return 2
        for label, message in sorted(result.failures.items()):
            print(f"mode {label} failed: {message}", file=sys.stderr)
        if not result.modes:
            print("all texture modes failed", file=sys.stderr)
            return 2
        print(f"run complete: {len(result.modes)} mode(s), outputs in {result.run_dir}")
        return 0

    if args.command == "oracle":
        try:
            ORACLE_SUITES[args.suite]()
        except Exception as exc:
            print(f"oracle suite failed: {exc}", file=sys.stderr)
            return 2
        return 0

    return 2  # unreachable with required=True


if __name__ == "__main__":
    sys.exit(main())
