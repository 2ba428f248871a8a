"""Command line entry point: ``weakgeo run | battery | list-suites``.

Exit codes: 0 all checks pass, 1 tolerance failure, 2 config parse error,
3 validation error or unknown suite, 4 physics guard (orthogonal
post-selection, grid overflow, ...).
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path

from .batteries import SUITES, run_battery, suite_names
from .exceptions import PhysicsGuardError, WeakGeoError
from .scenarios import ConfigParseError, ConfigValidationError, load_config, run_scenario

EXIT_OK, EXIT_TOLERANCE, EXIT_PARSE, EXIT_VALIDATION, EXIT_PHYSICS = 0, 1, 2, 3, 4

log = logging.getLogger("weakgeo")


def _out_dir(args) -> Path:
    return Path(args.out or os.environ.get("WEAKGEO_OUT") or "weakgeo-out")


def _finish(report, out: Path) -> int:
    rpath, cpath = report.write(out)
    for chk in report.checks:
        status = "PASS" if chk.passed else "FAIL"
        err = chk.rel_error if chk.relative else chk.abs_error
        print(f"{status} {chk.name:<40} err={err:.3e} tol={chk.tolerance:.1e} [{chk.formula}]")
    if report.tolerance_scale != 1.0:
        print(f"note: tolerances scaled by {report.tolerance_scale}")
    print(f"wrote {rpath} and {cpath}")
    return EXIT_OK if report.passed else EXIT_TOLERANCE


def cmd_run(args) -> int:
    try:
        cfg = load_config(args.config)
    except ConfigParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except ConfigValidationError as exc:
        print(f"validation error: {args.config}: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    try:
        report = run_scenario(cfg, args.tolerance_scale)
    except ConfigValidationError as exc:
        print(f"validation error: {args.config}: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except PhysicsGuardError as exc:
        print(f"physics guard: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_PHYSICS
    except (WeakGeoError, ValueError) as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    return _finish(report, _out_dir(args))


def cmd_battery(args) -> int:
    if args.suite not in suite_names():
        print(f"unknown suite {args.suite!r}; try 'weakgeo list-suites'", file=sys.stderr)
        return EXIT_VALIDATION
    try:
        report = run_battery(args.suite, args.seed, args.count, args.tolerance_scale, args.workers)
    except PhysicsGuardError as exc:
        print(f"physics guard: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_PHYSICS
    return _finish(report, _out_dir(args))


def cmd_list(args) -> int:
    for name in suite_names():
        desc = SUITES[name].description if name in SUITES else "qubit weak value equals conj of the stereographic coordinate"
        print(f"{name:<20} {desc}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="weakgeo", description="Pre-measurement and weak-value geometry checks")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--out", help="output directory (default: $WEAKGEO_OUT or ./weakgeo-out)")
        p.add_argument("--tolerance-scale", type=float, default=1.0,
                       help="multiply every tolerance by this factor (recorded in the report)")

    p_run = sub.add_parser("run", help="run a scenario config")
    p_run.add_argument("config")
    common(p_run)
    p_run.set_defaults(func=cmd_run)

    p_bat = sub.add_parser("battery", help="run a randomized verification suite")
    p_bat.add_argument("suite")
    p_bat.add_argument("--seed", type=int, default=0)
    p_bat.add_argument("--count", type=int, default=None)
    p_bat.add_argument("--workers", type=int, default=None)
    common(p_bat)
    p_bat.set_defaults(func=cmd_battery)

    p_list = sub.add_parser("list-suites", help="list battery suites")
    p_list.set_defaults(func=cmd_list)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
