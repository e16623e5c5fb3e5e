"""Command-line interface: ``swansusy verify|spectrum|sweep <config>``.

Exit codes: 0 all checks passed, 1 a check failed, 2 configuration error,
3 numerical abort (the partial report is still written).
"""

from __future__ import annotations

import argparse
import sys

from .config import RunConfig, load_config, parse_config
from .errors import ConfigError
from .report import dumps_csv, dumps_json
from .runner import NUMERICAL_ERRORS, run_spectrum, run_sweep, run_verify

__all__ = ["main", "build_parser", "parse_config", "run_verify", "run_spectrum", "run_sweep",
           "EXIT_OK", "EXIT_FAIL", "EXIT_CONFIG", "EXIT_NUMERICAL"]

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="swansusy",
        description="Verify the Swanson oscillator metric family and its supersymmetric extension.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, text in (("verify", "run the configured verification checks"),
                       ("spectrum", "tabulate the lowest levels of h and h_S"),
                       ("sweep", "tabulate the scalar parameters over the z grid")):
        p = sub.add_parser(name, help=text)
        p.add_argument("config", help="TOML run configuration")
        p.add_argument("--output", help="write the report here instead of stdout")
        p.add_argument("--format", choices=("json", "csv"), help="report format (default: json)")
        if name == "spectrum":
            p.add_argument("--levels", type=int, help="number of levels per operator")
    return parser


def render(report, fmt: str) -> str:
    if fmt == "csv":
        return dumps_csv(report.rows())
    return dumps_json(report.as_dict()) + "\n"


def _emit(text: str, path):
    if path:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _execute(args, config: RunConfig):
    if args.command == "verify":
        report = run_verify(config)
        if not report.complete:
            code = EXIT_NUMERICAL
        else:
            code = EXIT_OK if report.ok else EXIT_FAIL
        return report, code
    if args.command == "spectrum":
        return run_spectrum(config, args.levels), EXIT_OK
    return run_sweep(config), EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = load_config(args.config)
        if args.command == "spectrum" and args.levels is not None and args.levels < 1:
            raise ConfigError("--levels: must be positive", field="levels")
    except ConfigError as exc:
        print(f"swansusy: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    fmt = args.format or config.output_format
    path = args.output or config.output_path
    try:
        report, code = _execute(args, config)
    except NUMERICAL_ERRORS as exc:
        print(f"swansusy: numerical abort: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    _emit(render(report, fmt), path)
    if code == EXIT_NUMERICAL:
        print("swansusy: numerical abort; partial report written", file=sys.stderr)
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
