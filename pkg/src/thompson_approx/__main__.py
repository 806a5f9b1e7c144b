#!/usr/bin/env python3
"""Command-line front end for thompson-approx."""

import argparse
import csv
import json
import logging
import sys
import time
from collections.abc import Callable, Sequence
from pathlib import Path
from typing import NoReturn

import numpy as np

from thompson_approx.core import funcspec
from thompson_approx.core.analysis import (
    certified_sup_distance,
    discreteness_experiment,
    discreteness_floor,
    lift_alignment,
)
from thompson_approx.core.approx import approximate
from thompson_approx.core.config import Settings, get_settings
from thompson_approx.core.dyadic import Dyadic
from thompson_approx.core.errors import (
    ConstructionError,
    DegenerateRectangleError,
    InvalidDiffeoError,
    InvalidElementError,
    RotationInputError,
    SpaceMismatchError,
    ThompsonError,
)
from thompson_approx.core.interp import dyadic_interpolation, plan_interpolation
from thompson_approx.core.plmap import PLMap, Space, compose, invert, validate_thompson
from thompson_approx.paths import get_log_dir
from thompson_approx.services.element_io import (
    ReportFile,
    load_element,
    save_element,
    save_report,
)
from thompson_approx.services.plot_service import render_element, save_png

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INVALID = 2
EXIT_CERTIFICATION = 3

logger = logging.getLogger(__name__)


def setup_logging(debug: bool = False, log_file: bool = False, log_dir: Path | None = None) -> None:
    log_level = logging.DEBUG if debug else logging.INFO
    log_format = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"

    # stdout carries command output
    handlers: list[logging.Handler] = [logging.StreamHandler(sys.stderr)]

    if log_file:
        try:
            log_dir = log_dir or get_log_dir()
            log_dir.mkdir(parents=True, exist_ok=True)
            file_handler = logging.FileHandler(log_dir / "thompson-approx.log", encoding="utf-8")
            file_handler.setFormatter(logging.Formatter(log_format))
            handlers.append(file_handler)
        except (PermissionError, OSError) as e:
            print(f"Warning: Could not create log file: {e}", file=sys.stderr)

    logging.basicConfig(level=log_level, format=log_format, handlers=handlers, force=True)


class _ArgumentParser(argparse.ArgumentParser):
    """Usage errors exit with status 1."""

    def error(self, message: str) -> NoReturn:
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def exit_code_for(exc: BaseException) -> int:
    if isinstance(exc, ConstructionError):
        return EXIT_CERTIFICATION
    if isinstance(
        exc,
        InvalidDiffeoError
        | InvalidElementError
        | SpaceMismatchError
        | RotationInputError
        | DegenerateRectangleError,
    ):
        return EXIT_INVALID
    return EXIT_USAGE


# --- helpers ---------------------------------------------------------------


def _function_from_args(
    args: argparse.Namespace, default_space: Space = Space.INTERVAL
) -> funcspec.DiffeoSpec | None:
    """f from --family or --f; --f without --space takes default_space."""
    if getattr(args, "family", None):
        return funcspec.parse_family(args.family, args.space)
    if getattr(args, "f", None):
        return funcspec.parse(args.f, args.space or default_space)
    return None


def _add_function_args(parser: argparse.ArgumentParser, required: bool) -> None:
    group = parser.add_mutually_exclusive_group(required=required)
    group.add_argument("--f", metavar="EXPR", help='Expression in x, e.g. "x + 0.3*x*(1-x)"')
    group.add_argument("--family", metavar="NAME", help='Built-in family, e.g. "bump:0.3"')
    parser.add_argument(
        "--space",
        choices=[s.value for s in Space],
        default=None,
        help="interval or circle (default: the family's own space, for --f the element's space, else interval)",
    )


def _fmt(value: float, digits: int) -> str:
    return f"{value:.{digits}g}"


def _print_validation(g: PLMap) -> bool:
    result = validate_thompson(g)
    group = "F" if g.space is Space.INTERVAL else "T"
    print(f"{'valid' if result.ok else 'invalid'} {group} element, {g.pieces} pieces")
    print(f"slopes: [{', '.join(result.slopes)}]")
    for v in result.violations:
        print(f"violation ({v.kind}): {v.message}")
    return result.ok


# --- commands --------------------------------------------------------------


def cmd_approximate(args: argparse.Namespace, settings: Settings) -> int:
    f = _function_from_args(args)
    assert f is not None
    g, params = approximate(f, args.epsilon, args.S, settings)

    started = time.perf_counter()
    cert = certified_sup_distance(f, g, args.grid, settings)
    certify_time = time.perf_counter() - started
    validation = validate_thompson(g)

    save_element(g, args.out)
    if args.report:
        report = ReportFile(
            command="approximate",
            source=f.label,
            space=g.space,
            epsilon=params.epsilon,
            S=params.S,
            Delta=params.Delta,
            n=params.n,
            delta=params.delta,
            pieces=g.pieces,
            certificate=cert,
            validation=validation,
            timing={"construct": params.elapsed, "certify": certify_time},
        )
        save_report(report, args.report)

    print(f"pieces: {g.pieces}, Delta: {params.Delta}, n: {params.n}")
    print(f"sup distance in [{cert.lower:.6g}, {cert.upper:.6g}], epsilon {args.epsilon:g}")
    if not validation.ok:
        logger.error("Constructed map failed group validation")
        return EXIT_INVALID
    if not cert.upper < args.epsilon:
        logger.error(f"Certificate upper bound {cert.upper:.6g} is not below {args.epsilon:g}")
        return EXIT_CERTIFICATION
    return EXIT_OK


def cmd_compose(args: argparse.Namespace, settings: Settings) -> int:
    g = compose(load_element(args.a), load_element(args.b))
    save_element(g, args.out)
    print(f"composition: {g.pieces} pieces -> {args.out}")
    return EXIT_OK


def cmd_invert(args: argparse.Namespace, settings: Settings) -> int:
    g = invert(load_element(args.a))
    save_element(g, args.out)
    print(f"inverse: {g.pieces} pieces -> {args.out}")
    return EXIT_OK


def cmd_validate(args: argparse.Namespace, settings: Settings) -> int:
    return EXIT_OK if _print_validation(load_element(args.file)) else EXIT_INVALID


def cmd_sample(args: argparse.Namespace, settings: Settings) -> int:
    if args.points < 2:
        logger.error("--points must be at least 2")
        return EXIT_USAGE
    g = load_element(args.file)
    f = _function_from_args(args, g.space)
    if f is not None and f.space is not g.space:
        raise SpaceMismatchError(f"--f is a {f.space.value} map, the element is {g.space.value}")

    xs = np.arange(args.points + 1, dtype=float) / args.points
    columns = {"x": xs, "g": np.asarray(g.eval_real(xs), dtype=float)}
    if f is not None:
        columns["f"] = np.asarray(f.value(xs), dtype=float) + lift_alignment(f, g)
        columns["diff"] = columns["f"] - columns["g"]

    digits = settings.sample_digits
    args.csv.parent.mkdir(parents=True, exist_ok=True)
    with open(args.csv, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(columns)
        for row in zip(*columns.values(), strict=True):
            writer.writerow(_fmt(float(v), digits) for v in row)
    logger.info(f"Wrote {args.points + 1} samples to {args.csv}")
    return EXIT_OK


def cmd_gap(args: argparse.Namespace, settings: Settings) -> int:
    f = _function_from_args(args)
    assert f is not None
    funcspec.require_valid_diffeo(f)
    try:
        x_star, mu = discreteness_floor(f, args.grid or settings.gap_grid)
    except RotationInputError:
        print("rotation")
        return EXIT_INVALID
    print(f"x_star: {x_star:.17g}")
    print(f"mu: {mu:.17g}")
    return EXIT_OK


def cmd_interp(args: argparse.Namespace, settings: Settings) -> int:
    try:
        p = (Dyadic.parse(args.p1), Dyadic.parse(args.p2))
        q = (Dyadic.parse(args.q1), Dyadic.parse(args.q2))
    except ValueError as e:
        logger.error(str(e))
        return EXIT_USAGE
    plan = plan_interpolation(p, q)
    points = dyadic_interpolation(p, q)
    slopes = [
        str((yb - ya).to_fraction() / (xb - xa).to_fraction())
        for (xa, ya), (xb, yb) in zip(points, points[1:], strict=False)
    ]
    payload = {
        "m_a": plan.m_a,
        "k_a": plan.k_a,
        "m_b": plan.m_b,
        "k_b": plan.k_b,
        "d": plan.d,
        "l": plan.l,
        "refined_side": "x" if plan.a_is_x else "y",
        "points": [[str(x), str(y)] for x, y in points],
        "slopes": slopes,
    }
    text = json.dumps(payload, indent=2)
    if args.out:
        args.out.write_text(text + "\n")
    print(text)
    return EXIT_OK


def cmd_experiment(args: argparse.Namespace, settings: Settings) -> int:
    f = _function_from_args(args)
    assert f is not None
    if args.min_exp > args.max_exp or args.min_exp < 1:
        logger.error("Need 1 <= --min-exp <= --max-exp")
        return EXIT_USAGE
    epsilons = [2.0**-k for k in range(args.min_exp, args.max_exp + 1)]
    rows = discreteness_experiment(f, epsilons, args.grid, settings)

    header = ["epsilon", "Delta", "n", "pieces", "lower", "upper", "derivative_lb", "mu"]
    print(",".join(header))
    for row in rows:
        print(",".join(str(getattr(row, h)) for h in header))
    if args.csv:
        args.csv.parent.mkdir(parents=True, exist_ok=True)
        with open(args.csv, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(header)
            writer.writerows([getattr(row, h) for h in header] for row in rows)
    return EXIT_OK if all(row.certified for row in rows) else EXIT_CERTIFICATION


def cmd_plot(args: argparse.Namespace, settings: Settings) -> int:
    g = load_element(args.file)
    f = _function_from_args(args, g.space)
    if f is not None and f.space is not g.space:
        raise SpaceMismatchError(f"--f is a {f.space.value} map, the element is {g.space.value}")
    save_png(render_element(g, f, mode=args.mode), args.png)
    return EXIT_OK


# --- parser ----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = _ArgumentParser(
        prog="thompson-approx",
        description="Approximate diffeomorphisms by elements of Thompson's groups F and T",
    )
    parser.add_argument("--debug", action="store_true", help="Enable debug logging")
    parser.add_argument("--log-file", action="store_true", help="Also log to the log directory")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_ArgumentParser)

    p = sub.add_parser("approximate", help="Build g in F or T within epsilon of f")
    _add_function_args(p, required=True)
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--S", type=float, default=None, help="Derivative bound (default: estimated)")
    p.add_argument("--grid", type=int, default=None, help="Certification grid size")
    p.add_argument("--out", type=Path, required=True, help="Element file to write")
    p.add_argument("--report", type=Path, default=None, help="JSON report to write")
    p.set_defaults(handler=cmd_approximate)

    p = sub.add_parser("compose", help="Write A o B")
    p.add_argument("a", type=Path)
    p.add_argument("b", type=Path)
    p.add_argument("--out", type=Path, required=True)
    p.set_defaults(handler=cmd_compose)

    p = sub.add_parser("invert", help="Write the inverse of A")
    p.add_argument("a", type=Path)
    p.add_argument("--out", type=Path, required=True)
    p.set_defaults(handler=cmd_invert)

    p = sub.add_parser("validate", help="Check group membership of an element file")
    p.add_argument("file", type=Path)
    p.set_defaults(handler=cmd_validate)

    p = sub.add_parser("sample", help="Sample an element (and optionally f) to CSV")
    p.add_argument("file", type=Path)
    p.add_argument("--points", type=int, required=True)
    _add_function_args(p, required=False)
    p.add_argument("--csv", type=Path, required=True)
    p.set_defaults(handler=cmd_sample)

    p = sub.add_parser("gap", help="Report the power-of-2 gap floor of f'")
    _add_function_args(p, required=True)
    p.add_argument("--grid", type=int, default=None)
    p.set_defaults(handler=cmd_gap)

    p = sub.add_parser("interp", help="Dyadic interpolation from (P1, P2) to (Q1, Q2)")
    for name in ("p1", "p2", "q1", "q2"):
        p.add_argument(name, help='Dyadic rational such as "11/64" or "3/2^5"')
    p.add_argument("--out", type=Path, default=None)
    p.set_defaults(handler=cmd_interp)

    p = sub.add_parser("experiment", help="C^0 convergence versus C^1 gap table")
    _add_function_args(p, required=True)
    p.add_argument("--min-exp", type=int, default=3)
    p.add_argument("--max-exp", type=int, default=10)
    p.add_argument("--grid", type=int, default=None)
    p.add_argument("--csv", type=Path, default=None)
    p.set_defaults(handler=cmd_experiment)

    p = sub.add_parser("plot", help="Render an element file to PNG")
    p.add_argument("file", type=Path)
    _add_function_args(p, required=False)
    p.add_argument("--mode", choices=["lift", "circle"], default="lift")
    p.add_argument("--png", type=Path, required=True)
    p.set_defaults(handler=cmd_plot)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_USAGE

    settings = get_settings()
    if args.debug:
        settings.debug = True
    setup_logging(
        debug=settings.debug,
        log_file=args.log_file or settings.log_to_file,
        log_dir=settings.log_dir,
    )

    handler: Callable[[argparse.Namespace, Settings], int] = args.handler
    try:
        return handler(args, settings)
    except ThompsonError as e:
        logger.error(f"{args.command}: {e}")
        return exit_code_for(e)
    except OSError as e:
        logger.error(f"{args.command}: {e}")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
