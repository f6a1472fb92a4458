"""Command-line front end: ``single``, ``sweep``, ``figure`` and ``validate``.

Exit codes: 0 success, 1 usage error (bad flags or configuration),
2 validation failure, 3 numerical error.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace

from .config import ScenarioConfig
from .errors import GHError, InvalidParameter
from .figures import FIGURE_IDS, emit_figure_dataset
from .grid import QuadratureGrid
from .shifts_numeric import AMPLITUDE_MODES, KINEMATICS_MODES, ScatterMode
from .sweep import rows_to_csv, run_sweep, write_csv
from .validation import LEVELS, validate_suite

EXIT_OK, EXIT_USAGE, EXIT_VALIDATION, EXIT_NUMERICAL = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ghvortex", description="Goos-Hanchen shifts and Wigner delays "
                     "of Gaussian and vortex wavepackets at potential barriers.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def scenario_flags(p):
        p.add_argument("--config", required=True, help="scenario JSON file")
        p.add_argument("--out", help="output CSV (default: the config's output, else stdout)")
        p.add_argument("--mode", choices=AMPLITUDE_MODES, help="amplitude mode override")
        p.add_argument("--kinematics", choices=KINEMATICS_MODES, help="kinematics override")
        p.add_argument("--grid", help="momentum grid override, e.g. 257x257")

    scenario_flags(sub.add_parser("single", help="evaluate one incidence angle"))
    sw = sub.add_parser("sweep", help="evaluate an angle sweep")
    scenario_flags(sw)
    sw.add_argument("--threads", type=int, default=1)

    fig = sub.add_parser("figure", help="emit a figure dataset and gnuplot script")
    fig.add_argument("--figure", required=True, choices=FIGURE_IDS)
    fig.add_argument("--out", default=".", help="output directory")
    fig.add_argument("--threads", type=int, default=1)

    val = sub.add_parser("validate", help="run the self-check suite")
    val.add_argument("--level", choices=LEVELS, default="fast")
    val.add_argument("--out", help="also write the report to this file")
    return parser


def _load_config(args) -> ScenarioConfig:
    try:
        cfg = ScenarioConfig.load(args.config)
    except OSError as exc:
        raise UsageError(f"cannot read configuration: {exc}") from None
    mode = ScatterMode(args.mode or cfg.mode.amplitude, args.kinematics or cfg.mode.kinematics)
    grid = QuadratureGrid.parse(args.grid) if args.grid else cfg.grid
    return replace(cfg, mode=mode, grid=grid).validate()


def _emit(text: str, path) -> None:
    if path:
        write_csv(path, text)
    else:
        sys.stdout.write(text)


def _cmd_single(args) -> int:
    cfg = _load_config(args)
    if cfg.sweep.n_points != 1:
        raise UsageError("'single' needs a configuration with one incidence angle "
                         f"(n_points = {cfg.sweep.n_points}); use 'sweep'")
    rows = run_sweep(cfg)
    _emit(rows_to_csv(rows, cfg, title="single"), args.out or cfg.output)
    if rows[0]["status"] != "ok":
        print(f"numerical error: {rows[0]['status']}", file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


def _cmd_sweep(args) -> int:
    if args.threads < 1:
        raise UsageError("--threads must be >= 1")
    cfg = _load_config(args)
    rows = run_sweep(cfg, threads=args.threads)
    _emit(rows_to_csv(rows, cfg), args.out or cfg.output)
    bad = sum(r["status"] != "ok" for r in rows)
    if bad:
        print(f"{bad} of {len(rows)} points recorded errors (see status column)", file=sys.stderr)
    return EXIT_OK


def _cmd_figure(args) -> int:
    if args.threads < 1:
        raise UsageError("--threads must be >= 1")
    csv_path, gp_path = emit_figure_dataset(args.figure, args.out, threads=args.threads)
    print(csv_path)
    print(gp_path)
    return EXIT_OK


def _cmd_validate(args) -> int:
    report = validate_suite(args.level, progress=lambda c: print(
        f"{'PASS' if c.passed else 'FAIL'}  {c.name:<34s} {c.seconds:7.2f}s  {c.detail}",
        flush=True))
    print(report.lines()[-1])
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write("\n".join(report.lines()) + "\n")
    return EXIT_OK if report.passed else EXIT_VALIDATION


COMMANDS = {"single": _cmd_single, "sweep": _cmd_sweep, "figure": _cmd_figure,
            "validate": _cmd_validate}


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InvalidParameter as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (GHError, ArithmeticError) as exc:
        print(f"numerical error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
