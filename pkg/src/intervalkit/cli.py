"""Command-line front end.

Exit codes: 0 success, 1 selftest failure, 2 parse/usage error, 3 evaluation
error, 4 solver error, 5 comparison error.
"""

from __future__ import annotations

import argparse
import re
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .core import ExtendedInterval, Interval, format_center_radius, format_endpoints
from .errors import (ConfigError, DegenerateInterval, ExprSyntaxError, GridMismatch,
                     IntervalError, NonConvergence, RhsEvaluation)
from .evaluate import eval_value
from .expr import parse

EXIT_OK, EXIT_FAIL, EXIT_PARSE, EXIT_EVAL, EXIT_SOLVER, EXIT_COMPARE = 0, 1, 2, 3, 4, 5


class _Exit(Exception):
    def __init__(self, code, message):
        super().__init__(message)
        self.code = code


def _g(v) -> str:
    return format(float(v), ".17g")


def _parse(src: str, what: str = "expression"):
    try:
        return parse(src)
    except ExprSyntaxError as exc:
        raise _Exit(EXIT_PARSE, f"{what}: {exc}") from None
    except DegenerateInterval as exc:
        raise _Exit(EXIT_PARSE, f"{what}: {exc}") from None


def _print_value(v):
    if isinstance(v, Interval):
        print(format_endpoints(v))
        print(format_center_radius(v))
    elif isinstance(v, ExtendedInterval):
        print(f"[{_g(v.lo)},{_g(v.hi)}]")
        print(f"<{_g(v.center)};{_g(v.radius)}>")
    else:
        print(_g(v))


# --- eval --------------------------------------------------------------------------------

def cmd_eval(args):
    node = _parse(args.expr)
    x = None
    if args.x is not None:
        xnode = _parse(args.x, "--x")
        try:
            x = eval_value(xnode)
        except IntervalError as exc:
            raise _Exit(EXIT_EVAL, f"--x: {exc}") from None
        if isinstance(x, ExtendedInterval):
            x = x.to_interval()
        elif not isinstance(x, Interval):
            raise _Exit(EXIT_PARSE, "--x must be an interval such as [5,9]")
    try:
        v = eval_value(node, args.t, x)
    except IntervalError as exc:
        raise _Exit(EXIT_EVAL, str(exc)) from None
    _print_value(v)
    return EXIT_OK


# --- diff --------------------------------------------------------------------------------

def _handle(args, domain):
    from .calculus import IvfHandle

    node = _parse(args.expr)
    try:
        return IvfHandle.from_expr(node, domain, var=args.var)
    except IntervalError as exc:
        raise _Exit(EXIT_EVAL, str(exc)) from None
    except ValueError as exc:
        raise _Exit(EXIT_PARSE, str(exc)) from None


def cmd_diff(args):
    from .calculus import derive, find_switching_points, gh_derive

    if args.domain is not None:
        domain = tuple(args.domain)
    elif args.at is not None:
        domain = (args.at - 1.0, args.at + 1.0)
    elif args.grid is not None:
        domain = (args.grid[0] - 1.0, args.grid[1] + 1.0)
    else:
        raise _Exit(EXIT_PARSE, "--switching needs --domain A B")
    f = _handle(args, domain)
    try:
        if args.switching:
            for p in find_switching_points(f, grid_n=args.grid_n):
                print(_g(p))
            return EXIT_OK
        if args.at is not None:
            if args.gh:
                v = gh_derive(f, args.at).value
                print(f"[{_g(v.lo)},{_g(v.hi)}]")
            else:
                _print_value(derive(f, args.at).value)
            return EXIT_OK
        a, b, n = args.grid
        n = int(n)
        if n < 2:
            raise _Exit(EXIT_PARSE, "--grid needs at least 2 points")
        print("t,d_l,d_r,d_c,d_w")
        for t in np.linspace(a, b, n):
            if args.gh:
                v = gh_derive(f, t).value
                row = (t, v.lo, v.hi, v.center, v.radius)
            else:
                v = derive(f, t).value
                row = (t, v.lo, v.hi, v.center, v.radius)
            print(",".join(_g(c) for c in row))
    except IntervalError as exc:
        raise _Exit(EXIT_EVAL, str(exc)) from None
    return EXIT_OK


# --- integrate ---------------------------------------------------------------------------

def cmd_integrate(args):
    from .quadrature import ir_integral

    if not args.a < args.b:
        raise _Exit(EXIT_PARSE, "integration needs A < B")
    f = _handle(args, (args.a, args.b))
    try:
        res = ir_integral(f, args.a, args.b, args.tol)
    except IntervalError as exc:
        raise _Exit(EXIT_EVAL, str(exc)) from None
    _print_value(res.value)
    if args.verbose:
        print(f"estimated error {res.estimated_error:.3g}, {res.evaluations} evaluations")
    return EXIT_OK


# --- solve -------------------------------------------------------------------------------

def _safe(label: str) -> str:
    return re.sub(r"[^A-Za-z0-9.+-]+", "_", label.replace("@", "_at_")).strip("_")


def cmd_solve(args):
    from .ide import GhResult, solve
    from .io import load_config, write_csv

    cfg = Path(args.config)
    try:
        p = load_config(cfg)
    except OSError as exc:
        raise _Exit(EXIT_PARSE, f"cannot read config: {exc}") from None
    except (ConfigError, ExprSyntaxError, DegenerateInterval) as exc:
        raise _Exit(EXIT_PARSE, f"{cfg}: {exc}") from None
    except IntervalError as exc:
        raise _Exit(EXIT_EVAL, f"{cfg}: {exc}") from None
    out = Path(args.out) if args.out else cfg.parent
    out.mkdir(parents=True, exist_ok=True)
    t0 = time.perf_counter()
    try:
        res = solve(p)
    except NonConvergence as exc:
        raise _Exit(EXIT_SOLVER, f"solver failed: {exc}") from None
    except RhsEvaluation as exc:
        raise _Exit(EXIT_SOLVER, f"solver failed at t={float(exc.t)!r}: {exc}") from None
    except IntervalError as exc:
        raise _Exit(EXIT_SOLVER, f"solver failed: {exc}") from None
    runtime = time.perf_counter() - t0
    stem = cfg.stem
    lines = [f"config: {cfg}", f"method: {p.method}", f"step: {_g(p.grid[1] - p.grid[0])}",
             f"nodes: {len(p.grid)}", f"runtime_s: {runtime:.4f}"]
    files = []
    if isinstance(res, GhResult):
        for tr in res:
            files.append(write_csv(tr, out / f"{stem}_{_safe(tr.label)}.csv"))
        lines.append(f"branches_kept: {len(res.trajectories)}")
        for d in res.discarded:
            lines.append(f"discarded: {d.branch.label} at t={_g(d.t)}: {d.reason}")
    else:
        files.append(write_csv(res, out / f"{stem}.csv"))
        meta = res.meta
        if "iterations" in meta:
            lines.append(f"iterations: {meta['iterations']}")
            lines.append(f"residual: {meta['residual']:.3e}")
        if "samples" in meta:
            lines.append(f"samples: {meta['samples']}")
    lines += [f"wrote: {f}" for f in files]
    text = "\n".join(lines) + "\n"
    (out / f"{stem}_summary.txt").write_text(text)
    sys.stdout.write(text)
    return EXIT_OK


# --- compare -----------------------------------------------------------------------------

def cmd_compare(args):
    from .ide import compare
    from .io import read_csv, write_svg

    trajs = []
    for i, path in enumerate(args.csv):
        try:
            trajs.append(read_csv(path))
        except OSError as exc:
            raise _Exit(EXIT_PARSE, f"cannot read {path}: {exc}") from None
        except ValueError as exc:
            raise _Exit(EXIT_PARSE, str(exc)) from None
    try:
        report = compare(trajs)
    except GridMismatch as exc:
        raise _Exit(EXIT_COMPARE, f"grid mismatch: {exc}") from None
    print("i j sup_deviation t_at labels")
    for i, j, dev, t in report.pairs:
        print(f"{i} {j} {_g(dev)} {_g(t)} {report.labels[i]} {report.labels[j]}")
    if args.csv_out:
        with open(args.csv_out, "w", encoding="ascii") as fh:
            fh.write(",".join(report.header()) + "\n")
            for row in report.rows():
                fh.write(",".join(_g(v) for v in row) + "\n")
    if args.svg:
        write_svg(trajs, args.svg, title=args.title or " vs ".join(report.labels))
    return EXIT_OK


# --- selftest ----------------------------------------------------------------------------

def cmd_selftest(args):
    from .acceptance import format_row, run

    numbers = args.only or list(range(1, 12))
    t0 = time.perf_counter()
    results = run(numbers)
    for r in results:
        print(format_row(r))
    n_ok = sum(r.passed for r in results)
    print(f"{n_ok}/{len(results)} criteria passed in {time.perf_counter() - t0:.2f} s")
    return EXIT_OK if n_ok == len(results) else EXIT_FAIL


# --- argument parsing ----------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="intervalkit",
                                 description="Interval calculus in center/log-radius form.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", help="evaluate an expression")
    p.add_argument("expr")
    p.add_argument("--t", type=float, default=0.0, help="value of t (default 0)")
    p.add_argument("--x", help="interval value of x, e.g. [5,9]")
    p.set_defaults(fn=cmd_eval)

    p = sub.add_parser("diff", help="differentiate an interval-valued function")
    p.add_argument("expr")
    mode = p.add_mutually_exclusive_group(required=True)
    mode.add_argument("--at", type=float, help="single point")
    mode.add_argument("--grid", type=float, nargs=3, metavar=("A", "B", "N"),
                      help="N evenly spaced points on [A, B], printed as CSV")
    mode.add_argument("--switching", action="store_true", help="print switching points")
    p.add_argument("--gh", action="store_true", help="use the gH-derivative")
    p.add_argument("--domain", type=float, nargs=2, metavar=("A", "B"),
                   help="domain of the function (default: one unit around the points)")
    p.add_argument("--var", choices=("t", "x"), help="variable name (default: t, or x if "
                   "the expression only uses x)")
    p.add_argument("--grid-n", type=int, default=256, help="scan size for --switching")
    p.set_defaults(fn=cmd_diff)

    p = sub.add_parser("integrate", help="interval Riemann integral over [A, B]")
    p.add_argument("expr")
    p.add_argument("a", type=float)
    p.add_argument("b", type=float)
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--var", choices=("t", "x"))
    p.add_argument("-v", "--verbose", action="store_true")
    p.set_defaults(fn=cmd_integrate)

    p = sub.add_parser("solve", help="solve an interval differential equation from a config")
    p.add_argument("config")
    p.add_argument("--out", help="output directory (default: next to the config)")
    p.set_defaults(fn=cmd_solve)

    p = sub.add_parser("compare", help="pairwise deviations between trajectory CSVs")
    p.add_argument("csv", nargs="+")
    p.add_argument("--svg", help="write an overlay plot")
    p.add_argument("--csv-out", "--rows", dest="csv_out", help="write per-node rows")
    p.add_argument("--title")
    p.set_defaults(fn=cmd_compare)

    p = sub.add_parser("selftest", help="run the acceptance checks")
    p.add_argument("--only", type=int, nargs="+", metavar="N")
    p.set_defaults(fn=cmd_selftest)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    try:
        return args.fn(args)
    except _Exit as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
