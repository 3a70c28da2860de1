"""Command line entry point: ``heyde run | list-scenarios | describe``.

Exit codes: 0 all expectations met, 1 expectation mismatch, 2 configuration
error, 3 capacity error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .errors import CapacityError
from .report import emit_report
from .scenario import ConfigError, bundled_scenarios, describe, load_scenario, run_scenario

EXIT_OK, EXIT_MISMATCH, EXIT_CONFIG, EXIT_CAPACITY = 0, 1, 2, 3


def _tolerance(text: str) -> tuple[str, float]:
    key, sep, value = text.partition("=")
    if not sep:
        raise argparse.ArgumentTypeError(f"expected KEY=VALUE, got {text!r}")
    try:
        return key.strip(), float(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"tolerance {key!r} needs a number, got {value!r}")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="heyde", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="run a scenario file or bundled scenario")
    run.add_argument("scenario")
    run.add_argument("--format", choices=("text", "structured"), default="text")
    run.add_argument("--seed", type=int, default=None)
    run.add_argument("--workers", type=int, default=1)
    run.add_argument("--tolerance", type=_tolerance, action="append", default=[],
                     metavar="KEY=VALUE")
    run.add_argument("--out", type=Path, default=None)
    run.add_argument("--timings", action="store_true", help="include wall-clock times")
    sub.add_parser("list-scenarios", help="list bundled scenarios")
    desc = sub.add_parser("describe", help="summarize a scenario without running it")
    desc.add_argument("scenario")
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "list-scenarios":
            for name in bundled_scenarios():
                print(name)
            return EXIT_OK
        if args.command == "describe":
            print(describe(load_scenario(args.scenario)))
            return EXIT_OK
        if args.workers < 1:
            raise ConfigError("--workers must be at least 1")
        sc = load_scenario(args.scenario, seed=args.seed, tolerances=dict(args.tolerance))
        report = run_scenario(sc, workers=args.workers)
    except ConfigError as exc:
        print(f"heyde: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except CapacityError as exc:
        print(f"heyde: capacity error: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    data = emit_report(report, args.format, args.timings)
    if args.out is not None:
        args.out.write_bytes(data)
    else:
        sys.stdout.buffer.write(data)
        sys.stdout.flush()
    return EXIT_OK if report.all_met else EXIT_MISMATCH


if __name__ == "__main__":
    sys.exit(main())
