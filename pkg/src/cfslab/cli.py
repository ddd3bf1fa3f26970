"""``cfslab <experiment> --config <file> [--out <dir>] [--seed N]``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time

from . import harness
from .errors import CfslabError, InvalidArgument, NumericalFailure

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_NUMERICAL = 3
EXIT_ASSERTION = 4

log = logging.getLogger("cfslab")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="cfslab", description="Run a numerical experiment on the regularized Dirac sea.")
    p.add_argument("experiment", choices=harness.EXPERIMENTS)
    p.add_argument("--config", required=True, help="JSON configuration file")
    p.add_argument("--out", help="directory for report.json and CSV tables (default: print JSON to stdout)")
    p.add_argument("--seed", type=int, default=0, help="seed for randomized cases (default 0)")
    p.add_argument("--format", choices=("json", "csv"), default="json", help="also write CSV tables when 'csv'")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def _load_config(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise InvalidArgument(f"cannot read config {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise InvalidArgument(f"config {path} is not valid JSON: {exc}") from None


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INVALID
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(name)s: %(message)s")
    start = time.perf_counter()
    try:
        config = _load_config(args.config)
        report = harness.run(args.experiment, config, args.seed)
        files = harness.emit(report, args.out, args.format)
    except InvalidArgument as exc:
        print(f"cfslab: invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except NumericalFailure as exc:
        print(f"cfslab: numerical failure: {exc}", file=sys.stderr)
        if exc.diagnostics:
            print(json.dumps(exc.diagnostics, default=str), file=sys.stderr)
        return EXIT_NUMERICAL
    except CfslabError as exc:
        print(f"cfslab: {exc}", file=sys.stderr)
        return exc.exit_code
    if args.out is None:
        sys.stdout.write(files["report.json"])
    log.info("%s finished in %.3f s", args.experiment, time.perf_counter() - start)
    for a in report.assertions:
        if not a["passed"]:
            print(f"cfslab: assertion failed: {a['name']} ({a['anchor']})", file=sys.stderr)
    return EXIT_OK if report.passed else EXIT_ASSERTION


if __name__ == "__main__":
    sys.exit(main())
