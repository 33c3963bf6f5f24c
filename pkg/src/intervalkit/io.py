"""Trajectory CSV files, SVG overlays and problem configuration files."""

from __future__ import annotations

import csv
import io
import math
import sys
from pathlib import Path
from xml.sax.saxutils import escape

import numpy as np

from .errors import ConfigError, ExprSyntaxError, IntervalError
from .evaluate import eval_value
from .expr import parse
from .ide import METHODS, TYPE_I, TYPE_II, GhBranch, IdeProblem, enumerate_branches
from .trajectory import Trajectory

if sys.version_info >= (3, 11):
    import tomllib
else:  # pragma: no cover - exercised only on 3.10
    import tomli as tomllib

CSV_HEADER = ("t", "x_l", "x_r", "x_c", "x_w")


def _g(v: float) -> str:
    return format(float(v), ".17g")


# --- CSV -------------------------------------------------------------------------------

def format_csv(traj: Trajectory) -> str:
    """One row per node; every number printed with 17 significant digits."""
    if traj.center is not None:
        c, w = traj.center, np.exp(traj.log_radius)
    else:
        c, w = 0.5 * (traj.lo + traj.hi), 0.5 * (traj.hi - traj.lo)
    buf = io.StringIO()
    buf.write(",".join(CSV_HEADER) + "\n")
    for row in zip(traj.grid, traj.lo, traj.hi, c, w):
        buf.write(",".join(_g(v) for v in row) + "\n")
    return buf.getvalue()


def write_csv(traj: Trajectory, path) -> Path:
    path = Path(path)
    path.write_text(format_csv(traj), encoding="ascii")
    return path


def read_csv(path, label: str | None = None) -> Trajectory:
    """Read a trajectory file.  Endpoints come back bit-for-bit."""
    path = Path(path)
    with path.open(newline="", encoding="ascii") as fh:
        rows = list(csv.reader(fh))
    if not rows or tuple(h.strip() for h in rows[0]) != CSV_HEADER:
        raise ValueError(f"{path}: expected header {','.join(CSV_HEADER)}")
    body = [r for r in rows[1:] if r]
    if not body:
        raise ValueError(f"{path}: no data rows")
    try:
        data = np.array([[float(v) for v in r] for r in body])
    except ValueError as exc:
        raise ValueError(f"{path}: {exc}") from None
    if data.shape[1] != len(CSV_HEADER):
        raise ValueError(f"{path}: every row needs {len(CSV_HEADER)} columns")
    return Trajectory.from_endpoints(data[:, 0], data[:, 1], data[:, 2],
                                     label=label if label is not None else path.stem)


# --- SVG -------------------------------------------------------------------------------

_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b",
           "#e377c2", "#17becf")


def _ticks(lo, hi, n=5):
    if hi <= lo:
        return [lo]
    raw = (hi - lo) / n
    mag = 10.0 ** math.floor(math.log10(raw))
    step = min((m * mag for m in (1, 2, 2.5, 5, 10) if m * mag >= raw), default=raw)
    first = math.ceil(lo / step) * step
    out = []
    k = 0
    while first + k * step <= hi + 1e-9 * step:
        out.append(first + k * step)
        k += 1
    return out


def render_svg(trajs, title: str = "", width: int = 800, height: int = 500) -> str:
    """Overlay of ``x_l`` (dashed) and ``x_r`` (solid) for each trajectory."""
    trajs = list(trajs)
    if not trajs:
        raise ValueError("nothing to plot")
    left, right, top, bottom = 70, 180, 40, 50
    pw, ph = width - left - right, height - top - bottom
    t_lo = min(float(tr.grid[0]) for tr in trajs)
    t_hi = max(float(tr.grid[-1]) for tr in trajs)
    y_lo = min(float(np.min(tr.lo)) for tr in trajs)
    y_hi = max(float(np.max(tr.hi)) for tr in trajs)
    if y_hi == y_lo:
        y_lo, y_hi = y_lo - 1.0, y_hi + 1.0
    pad = 0.05 * (y_hi - y_lo)
    y_lo, y_hi = y_lo - pad, y_hi + pad

    def sx(t):
        return left + (t - t_lo) / (t_hi - t_lo) * pw

    def sy(y):
        return top + (y_hi - y) / (y_hi - y_lo) * ph

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
           f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="12">',
           f'<rect width="{width}" height="{height}" fill="white"/>']
    if title:
        out.append(f'<text x="{left + pw / 2:.1f}" y="22" text-anchor="middle" '
                   f'font-size="14">{escape(title)}</text>')
    # axes and ticks
    out.append(f'<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" '
               'stroke="#444"/>')
    for t in _ticks(t_lo, t_hi):
        x = sx(t)
        out.append(f'<line x1="{x:.2f}" y1="{top + ph}" x2="{x:.2f}" y2="{top + ph + 5}" '
                   'stroke="#444"/>')
        out.append(f'<text x="{x:.2f}" y="{top + ph + 18}" text-anchor="middle">{t:g}</text>')
    for y in _ticks(y_lo, y_hi):
        v = sy(y)
        out.append(f'<line x1="{left - 5}" y1="{v:.2f}" x2="{left}" y2="{v:.2f}" stroke="#444"/>')
        out.append(f'<line x1="{left}" y1="{v:.2f}" x2="{left + pw}" y2="{v:.2f}" '
                   'stroke="#ddd"/>')
        out.append(f'<text x="{left - 8}" y="{v + 4:.2f}" text-anchor="end">{y:.4g}</text>')
    out.append(f'<text x="{left + pw / 2:.1f}" y="{height - 10}" text-anchor="middle">t</text>')
    # curves; long trajectories are thinned to keep the file small
    for i, tr in enumerate(trajs):
        color = _COLORS[i % len(_COLORS)]
        stride = max(1, len(tr.grid) // 2000)
        idx = np.unique(np.r_[np.arange(0, len(tr.grid), stride), len(tr.grid) - 1])
        for ys, dash in ((tr.lo, ' stroke-dasharray="6 3"'), (tr.hi, "")):
            pts = " ".join(f"{sx(float(tr.grid[k])):.2f},{sy(float(ys[k])):.2f}" for k in idx)
            out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5"{dash} '
                       f'points="{pts}"/>')
        ly = top + 10 + 20 * i
        lx = left + pw + 15
        out.append(f'<line x1="{lx}" y1="{ly}" x2="{lx + 25}" y2="{ly}" stroke="{color}" '
                   'stroke-width="2"/>')
        out.append(f'<text x="{lx + 32}" y="{ly + 4}">{escape(tr.label or f"#{i}")}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def write_svg(trajs, path, title: str = "") -> Path:
    path = Path(path)
    path.write_text(render_svg(trajs, title), encoding="utf-8")
    return path


# --- problem configuration -----------------------------------------------------------

_TOP_KEYS = {"rhs", "t0", "t_end", "x0", "method", "step", "picard", "gh", "sweep"}
_TABLE_KEYS = {
    "picard": {"tol", "max_iter"},
    "gh": {"switch_times", "branches"},
    "sweep": {"density", "threads"},
}


def _reject_unknown(table: dict, allowed: set, where: str):
    extra = sorted(set(table) - allowed)
    if extra:
        raise ConfigError(f"unknown key(s) in {where}: {', '.join(extra)}")


def _real(v, key):
    """A number, or a constant expression such as ``"pi/2"``."""
    if isinstance(v, bool):
        raise ConfigError(f"{key} must be a number")
    if isinstance(v, (int, float)):
        return float(v)
    if isinstance(v, str):
        try:
            val = eval_value(parse(v))
        except (ExprSyntaxError, IntervalError) as exc:
            raise ConfigError(f"{key}: {exc}") from None
        if isinstance(val, float) and math.isfinite(val):
            return val
    raise ConfigError(f"{key} must be a real constant, got {v!r}")


def _int(v, key):
    if isinstance(v, bool) or not isinstance(v, int):
        raise ConfigError(f"{key} must be an integer, got {v!r}")
    return v


def _branch_type(v, key):
    if v in (1, "i", "I"):
        return TYPE_I
    if v in (-1, "ii", "II"):
        return TYPE_II
    raise ConfigError(f"{key}: branch type must be 1, -1, 'i' or 'ii', got {v!r}")


def _gh_branches(table):
    times = tuple(_real(v, "gh.switch_times") for v in table.get("switch_times", []))
    spec = table.get("branches", "all")
    if spec == "all":
        return enumerate_branches(times)
    if not isinstance(spec, list) or not spec:
        raise ConfigError("gh.branches must be \"all\" or a non-empty list")
    out = []
    for item in spec:
        types = item if isinstance(item, list) else [item]
        types = tuple(_branch_type(v, "gh.branches") for v in types)
        try:
            out.append(GhBranch(types, times))
        except ValueError as exc:
            raise ConfigError(f"gh.branches: {exc}") from None
    return out


def parse_config(text: str) -> IdeProblem:
    """Build an :class:`IdeProblem` from TOML text; unknown keys are errors."""
    try:
        doc = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"malformed config: {exc}") from None
    _reject_unknown(doc, _TOP_KEYS, "config")
    for name, allowed in _TABLE_KEYS.items():
        if name in doc:
            if not isinstance(doc[name], dict):
                raise ConfigError(f"[{name}] must be a table")
            _reject_unknown(doc[name], allowed, f"[{name}]")
    for key in ("rhs", "t0", "t_end", "x0"):
        if key not in doc:
            raise ConfigError(f"missing required key {key!r}")
    if not isinstance(doc["rhs"], str) or not isinstance(doc["x0"], str):
        raise ConfigError("rhs and x0 must be expression strings")
    method = doc.get("method", "rk4")
    if method not in METHODS:
        raise ConfigError(f"method must be one of {', '.join(METHODS)}, got {method!r}")
    picard = doc.get("picard", {})
    sweep = doc.get("sweep", {})
    kwargs = dict(
        rhs=parse(doc["rhs"]),
        t0=_real(doc["t0"], "t0"),
        t_end=_real(doc["t_end"], "t_end"),
        x0=doc["x0"],
        method=method,
        step=_real(doc.get("step", 1e-3), "step"),
        picard_tol=_real(picard.get("tol", 1e-10), "picard.tol"),
        picard_max_iter=_int(picard.get("max_iter", 50), "picard.max_iter"),
        sweep_density=_int(sweep.get("density", 5), "sweep.density"),
        sweep_threads=_int(sweep.get("threads", 0), "sweep.threads") or None,
    )
    if "gh" in doc:
        kwargs["gh_branches"] = _gh_branches(doc["gh"])
    try:
        return IdeProblem(**kwargs)
    except (ExprSyntaxError, IntervalError):
        raise
    except (ValueError, TypeError) as exc:
        raise ConfigError(str(exc)) from None


def load_config(path) -> IdeProblem:
    return parse_config(Path(path).read_text(encoding="utf-8"))


__all__ = ["CSV_HEADER", "format_csv", "write_csv", "read_csv", "render_svg", "write_svg",
           "parse_config", "load_config"]
