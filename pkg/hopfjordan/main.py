"""Command-line entrypoint and parser factory.

Usage: ``python -m hopfjordan {validate,jordan,root} ...``. Exit codes are
0 on success, 1 on a domain failure, 2 on unreadable or malformed input.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional

from .cli import commands
from .core import config
from .core.errors import HopfJordanError

logger = logging.getLogger(__name__)


def _positive_float(value: str) -> float:
    x = float(value)
    if not x > 0:
        raise argparse.ArgumentTypeError("must be positive")
    return x


def create_parser() -> argparse.ArgumentParser:
    """Build the argument parser with one subcommand per operation."""
    parser = argparse.ArgumentParser(prog=config.settings.app_name)
    parser.add_argument("-v", "--verbose", action="count", default=0, help="raise log level (repeatable)")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=_positive_float, default=None, help="residual tolerance")
    common.add_argument("--format", dest="fmt", choices=("text", "json"), default="text")

    validate = sub.add_parser("validate", parents=[common], help="run the model validation certificates")
    validate.add_argument("path", type=Path)
    validate.add_argument("--seed", type=int, default=None)

    jordan = sub.add_parser("jordan", parents=[common], help="compute the certified Jordan index")
    jordan.add_argument("path", type=Path)
    jordan.add_argument("--out", type=Path, default=None, help="write the JSON report here")
    jordan.add_argument("--cap", type=int, default=None, help="coset enumeration cap")
    jordan.add_argument("--seed", type=int, default=None)
    jordan.add_argument("--timings", action="store_true", help="include wall-clock per stage")

    root = sub.add_parser("root", parents=[common], help="commutant-preserving m-th root of a matrix")
    root.add_argument("path", type=Path)
    root.add_argument("m", type=int)
    return parser


def _configure_logging(verbose: int) -> None:
    level = logging.getLevelName(config.settings.log_level.upper())
    if not isinstance(level, int):
        level = logging.WARNING
    level = max(logging.DEBUG, level - 10 * verbose)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)


def main(argv: Optional[List[str]] = None) -> int:
    args = create_parser().parse_args(argv)
    _configure_logging(args.verbose)
    try:
        if args.command == "validate":
            return commands.cmd_validate(args.path, tol=args.tol, seed=args.seed, fmt=args.fmt)
        if args.command == "jordan":
            return commands.cmd_jordan(
                args.path,
                out=args.out,
                tol=args.tol,
                cap=args.cap,
                seed=args.seed,
                fmt=args.fmt,
                timings=args.timings,
            )
        return commands.cmd_root(args.path, args.m, tol=args.tol, fmt=args.fmt)
    except HopfJordanError as exc:
        where = f" (stage {exc.stage})" if exc.stage else ""
        print(f"error{where}: {exc}", file=sys.stderr)
        return exc.exit_code
