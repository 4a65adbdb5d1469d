"""Command-line interface: ``rpr-cusps {cusps,trace,scan,dkp}``.

Exit codes:
    0  success (also when no cusp or no assembly mode exists)
    2  malformed input: geometry file, numeric argument or option
    3  precision exhausted; the message names the failing stage
    4  any other numerical failure of the computation
    5  an output file could not be written

Angles are printed in degrees with 10 decimals, lengths with 10 decimals,
residuals with 4 significant digits and L1 sample values with 6 decimals.
"""

import argparse
import math
import os
import sys

from mpmath import mp

from . import io as rio
from .errors import GeometryError, PrecisionExhausted, RprError
from .geometry import exact_number
from .kinematics import DEFAULT_CLUSTER_TOL, DEFAULT_MODE_TOL, coincidence_multiplicity, direct_kinematics
from .pipeline import DEFAULT_MERGE_RADIUS, SliceProblem, analyze_slice, scan_l1, scan_values
from .polysolve import DEFAULT_DIGITS, working_precision
from .tracer import curve_rows, emit_plot, trace_slice

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_PRECISION = 3
EXIT_NUMERIC = 4
EXIT_OUTPUT = 5


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _positive_float(text):
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")
    if not v > 0 or math.isinf(v):
        raise argparse.ArgumentTypeError(f"must be positive: {text!r}")
    return v


def _digits(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if v < 30:
        raise argparse.ArgumentTypeError("at least 30 digits are required")
    return v


def _jobs(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if v < 1:
        raise argparse.ArgumentTypeError("--jobs must be at least 1")
    return v


def _samples(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if v < 16:
        raise argparse.ArgumentTypeError("at least 16 samples are required")
    return v


def _length(text):
    try:
        v = exact_number(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")
    return v


def _positive_length(text):
    v = _length(text)
    if v <= 0:
        raise argparse.ArgumentTypeError(f"must be positive: {text!r}")
    return v


def _common(p, digits=DEFAULT_DIGITS):
    p.add_argument("--geometry", required=True, help="geometry JSON with a2x, a3x, a3y, d1, d2, d3")
    p.add_argument("--digits", type=_digits, default=digits, help=f"working precision in decimal digits (default {digits})")


def _tolerances(p):
    p.add_argument("--cluster-tol", type=_positive_float, default=DEFAULT_CLUSTER_TOL, help="DKP coincidence tolerance in radians")
    p.add_argument("--mode-tol", type=_positive_float, default=DEFAULT_MODE_TOL, help="residual bound for accepting an assembly mode")
    p.add_argument("--merge-radius", type=_positive_float, default=DEFAULT_MERGE_RADIUS, help="deduplication radius in half-angle space")
    p.add_argument("--jobs", type=_jobs, default=os.cpu_count() or 1, help="worker processes (default: available CPUs)")


def build_parser():
    parser = _Parser(prog="rpr-cusps", description="Cusp points of 3-RPR planar parallel manipulators.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("cusps", help="cusp points of one L1 slice")
    _common(p)
    p.add_argument("--l1", type=_positive_length, required=True)
    _tolerances(p)
    p.add_argument("--out", help="CSV output (default: standard output)")
    p.add_argument("--svg", help="also plot the singular curves with the cusps")
    p.add_argument("--samples", type=_samples, default=360, help="alpha samples for --svg (default 360)")

    p = sub.add_parser("trace", help="singular curves of one L1 slice")
    _common(p, digits=30)
    p.add_argument("--l1", type=_positive_length, required=True)
    p.add_argument("--samples", type=_samples, default=360, help="alpha samples (default 360, at least 16)")
    p.add_argument("--out", help="CSV of curve points (default: standard output)")
    p.add_argument("--svg", help="SVG plot of the curves")
    p.add_argument("--with-cusps", action="store_true", help="compute the cusps and mark them on the plot")
    _tolerances(p)

    p = sub.add_parser("scan", help="cusp counts over a range of L1")
    _common(p)
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--range", nargs=3, type=_length, metavar=("MIN", "MAX", "STEP"))
    g.add_argument("--values", nargs="+", type=_positive_length, metavar="L1")
    _tolerances(p)
    p.add_argument("--out", help="CSV of l1,cusp_count (default: standard output)")
    p.add_argument("--cusps-out", help="CSV of every cusp row, prefixed by l1")

    p = sub.add_parser("dkp", help="assembly modes for given leg lengths")
    _common(p)
    p.add_argument("--lengths", nargs=3, type=_length, required=True, metavar=("L1", "L2", "L3"))
    p.add_argument("--cluster-tol", type=_positive_float, default=DEFAULT_CLUSTER_TOL)
    p.add_argument("--mode-tol", type=_positive_float, default=DEFAULT_MODE_TOL)
    return parser


def _emit(path, text):
    if path is None:
        sys.stdout.write(text)
    else:
        rio.atomic_write(path, text)


def _problem(args, l1):
    return SliceProblem(
        args.geom,
        l1,
        digits=args.digits,
        cluster_tol=args.cluster_tol,
        mode_tol=args.mode_tol,
        merge_radius=args.merge_radius,
        jobs=args.jobs,
    )


def _warn(msg):
    print(f"warning: {msg}", file=sys.stderr)


def cmd_cusps(args):
    result = analyze_slice(_problem(args, args.l1))
    for w in result.warnings:
        _warn(w)
    text = rio.cusps_csv(result.cusps)
    svg = None
    if args.svg:
        curves = trace_slice(args.geom, args.l1, args.samples)
        svg = emit_plot(curves, result.cusps)
    _emit(args.out, text)
    if svg is not None:
        rio.atomic_write(args.svg, svg)
    print(f"{len(result.cusps)} cusp(s) at L1 = {rio.fmt_l1(args.l1)}", file=sys.stderr)
    return EXIT_OK


def cmd_trace(args):
    curves = trace_slice(args.geom, args.l1, args.samples, digits=args.digits)
    if not curves.branches:
        _warn(f"no singular curve found at L1 = {rio.fmt_l1(args.l1)}")
    if curves.degenerate_points:
        _warn(f"{curves.degenerate_points} point(s) with a collapsed leg were dropped")
    cusps = []
    if args.with_cusps:
        cusps = analyze_slice(_problem(args, args.l1)).cusps
    _emit(args.out, rio.trace_csv(curve_rows(curves)))
    if args.svg:
        rio.atomic_write(args.svg, emit_plot(curves, cusps))
    return EXIT_OK


def cmd_scan(args):
    if args.range:
        try:
            values = scan_values(*args.range)
        except ValueError as exc:
            raise UsageError(str(exc))
    else:
        values = list(args.values)
    report = scan_l1(
        args.geom,
        values,
        jobs=args.jobs,
        digits=args.digits,
        cluster_tol=args.cluster_tol,
        mode_tol=args.mode_tol,
        merge_radius=args.merge_radius,
    )
    counts, cusp_rows = [], []
    for s in report.samples:
        l1 = rio.fmt_l1(s.l1)
        if s.error:
            _warn(f"L1 = {l1}: {s.error}")
            counts.append([l1, ""])
            continue
        counts.append([l1, str(s.count)])
        for c in s.cusps:
            cusp_rows.append([l1] + rio.cusp_row(c))
    for a, na, b, nb in report.transitions:
        print(f"transition: {na} cusp(s) at L1 = {rio.fmt_l1(a)} -> {nb} cusp(s) at L1 = {rio.fmt_l1(b)}", file=sys.stderr)
    if not report.transitions:
        print("no change of cusp count over the scanned values", file=sys.stderr)
    if args.cusps_out:
        rio.atomic_write(args.cusps_out, rio.csv_text(("l1",) + rio.CUSP_HEADER, cusp_rows))
    _emit(args.out, rio.csv_text(("l1", "cusp_count"), counts))
    return EXIT_OK


def cmd_dkp(args):
    if any(v < 0 for v in args.lengths):
        raise UsageError("leg lengths must be non-negative")
    with working_precision(args.digits):
        modes = direct_kinematics(args.geom, args.lengths, args.cluster_tol, args.mode_tol)
        if not modes:
            print("0 solutions")
            return EXIT_OK
        print("mode  theta1_deg          theta2_deg          theta3_deg          residual    cluster")
        for i, m in enumerate(modes):
            th = [rio.fmt_angle(mp.degrees(x)) for x in m.theta]
            print(f"{i:<5} {th[0]:>19} {th[1]:>19} {th[2]:>19} {rio.fmt_residual(m.residual):>11} {m.cluster_id:>7}")
        print(f"{len(modes)} solutions")
        print(f"max coincidence multiplicity: {coincidence_multiplicity(modes, args.cluster_tol)}")
    return EXIT_OK


COMMANDS = {"cusps": cmd_cusps, "trace": cmd_trace, "scan": cmd_scan, "dkp": cmd_dkp}


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        args.geom = rio.load_geometry(args.geometry)
    except (rio.InputError, GeometryError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except PrecisionExhausted as exc:
        stage = exc.stage or "unknown stage"
        print(f"error: precision exhausted in {stage}: {exc}; rerun with a larger --digits", file=sys.stderr)
        return EXIT_PRECISION
    except RprError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"error: cannot write output: {exc}", file=sys.stderr)
        return EXIT_OUTPUT


if __name__ == "__main__":
    sys.exit(main())
