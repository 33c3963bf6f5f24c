"""Solvers for interval differential equations ``x' = f(t, x)``, ``x(t0) = x0``.

``solve_new`` reduces the problem to a real system for (center, log_radius)
and integrates it with classic RK4.  ``solve_picard`` iterates the integral
operator ``x -> x0 + int f(s, x(s)) ds`` on the same grid.  ``solve_gh``
integrates the endpoint systems that the gH-derivative produces, one per
branch assignment.  ``solve_param_sweep`` replaces every interval constant
by a real parameter and takes the pointwise envelope of a family of real
solutions.

The solvers do not check the growth and integrability hypotheses that
guarantee a solution exists; that is the caller's business.
"""

from __future__ import annotations

import bisect
import itertools
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import cumulative_simpson

from .core import ExtendedInterval, Interval, from_endpoints
from .errors import (BranchInfeasible, IntervalError,
                     NonConvergence, NonFinite, RhsEvaluation)
from .evaluate import check_params, compile_components, compile_param, eval_endpoint_pair
from .expr import interval_literals, parse
from .metric import sup_distance
from .trajectory import Trajectory, check_same_grid

METHODS = ("rk4", "picard", "gh_branch", "param_sweep")
TYPE_I, TYPE_II = 1, -1


@dataclass(frozen=True)
class GhBranch:
    """Differentiability type per segment (+1 for (i), -1 for (ii)).

    ``switch_times`` splits ``[t0, t_end]`` into ``len(types)`` segments.
    """

    types: tuple
    switch_times: tuple = ()

    def __post_init__(self):
        types = tuple(int(v) for v in self.types)
        times = tuple(float(v) for v in self.switch_times)
        if any(v not in (TYPE_I, TYPE_II) for v in types):
            raise ValueError(f"branch types must be +1 or -1, got {self.types!r}")
        if len(types) != len(times) + 1:
            raise ValueError("need exactly one type per segment")
        if list(times) != sorted(times):
            raise ValueError("switch times must be increasing")
        object.__setattr__(self, "types", types)
        object.__setattr__(self, "switch_times", times)

    @property
    def label(self) -> str:
        tags = "-".join("i" if v == TYPE_I else "ii" for v in self.types)
        if not self.switch_times:
            return tags
        return tags + "@" + ",".join(format(s, ".6g") for s in self.switch_times)

    def type_at(self, t: float) -> int:
        return self.types[bisect.bisect_right(self.switch_times, t)]


def enumerate_branches(switch_times=()) -> list[GhBranch]:
    """Every type assignment for the given switch times (2**(k+1) of them)."""
    k = len(switch_times)
    return [GhBranch(types, tuple(switch_times))
            for types in itertools.product((TYPE_I, TYPE_II), repeat=k + 1)]


def _as_x0(v):
    if isinstance(v, (Interval, ExtendedInterval)):
        return v
    if isinstance(v, str):
        from .evaluate import eval_interval
        node = parse(v)
        lits = interval_literals(node)
        if len(lits) == 1 and lits[0] is node:
            return node.value
        return eval_interval(node, 0.0)
    if isinstance(v, (tuple, list)) and len(v) == 2:
        lo, hi = float(v[0]), float(v[1])
        return from_endpoints(lo, hi) if lo < hi else ExtendedInterval(lo, hi)
    raise TypeError(f"cannot use {v!r} as an initial interval")


def _as_branch(b):
    if isinstance(b, GhBranch):
        return b
    if isinstance(b, dict):
        return GhBranch(tuple(b["types"]), tuple(b.get("switch_times", ())))
    b = tuple(b)
    if b and isinstance(b[0], (tuple, list)):
        return GhBranch(tuple(b[0]), tuple(b[1]) if len(b) > 1 else ())
    return GhBranch(b)


@dataclass
class IdeProblem:
    rhs: object
    t0: float
    t_end: float
    x0: object
    method: str = "rk4"
    step: float = 1e-3
    picard_tol: float = 1e-10
    picard_max_iter: int = 50
    sweep_density: int = 5
    gh_branches: list = field(default_factory=list)
    sweep_threads: int | None = None

    def __post_init__(self):
        if isinstance(self.rhs, str):
            self.rhs = parse(self.rhs)
        self.x0 = _as_x0(self.x0)
        self.t0, self.t_end, self.step = float(self.t0), float(self.t_end), float(self.step)
        if not self.t0 < self.t_end:
            raise ValueError("need t0 < t_end")
        if self.method not in METHODS:
            raise ValueError(f"method must be one of {METHODS}, got {self.method!r}")
        span = self.t_end - self.t0
        if not (0 < self.step <= span / 8 * (1 + 1e-12)):
            raise ValueError(f"step must be in (0, {span / 8!r}]")
        if self.sweep_density < 3:
            raise ValueError("sweep_density must be at least 3")
        self.gh_branches = [_as_branch(b) for b in self.gh_branches]

    @property
    def grid(self) -> np.ndarray:
        n = max(8, int(round((self.t_end - self.t0) / self.step)))
        return np.linspace(self.t0, self.t_end, n + 1)

    def x0_interval(self) -> Interval:
        if isinstance(self.x0, Interval):
            return self.x0
        return self.x0.to_interval()


# --- new calculus: RK4 on (center, log_radius) -------------------------------------

def _rk4(fn, grid, y0):
    """Classic RK4 for a small real system; ``fn(t, y) -> tuple``."""
    n = len(grid)
    out = np.empty((n, len(y0)))
    y = tuple(float(v) for v in y0)
    out[0] = y
    for k in range(n - 1):
        t, h = grid[k], grid[k + 1] - grid[k]
        y = _rk4_step(fn, t, h, y)
        if not all(math.isfinite(v) for v in y):
            raise NonFinite(f"solution left the finite range near t={grid[k + 1]!r}")
        out[k + 1] = y
    return out


def _rk4_step(fn, t, h, y):
    h2 = 0.5 * h
    k1 = fn(t, y)
    k2 = fn(t + h2, tuple(a + h2 * b for a, b in zip(y, k1)))
    k3 = fn(t + h2, tuple(a + h2 * b for a, b in zip(y, k2)))
    k4 = fn(t + h, tuple(a + h * b for a, b in zip(y, k3)))
    return tuple(a + h / 6.0 * (b1 + 2.0 * b2 + 2.0 * b3 + b4)
                 for a, b1, b2, b3, b4 in zip(y, k1, k2, k3, k4))


def _guarded(f):
    def g(t, y):
        try:
            return f(t, *y)
        except RhsEvaluation:
            raise
        except (IntervalError, ArithmeticError, ValueError) as exc:
            raise RhsEvaluation(t, exc) from None
    return g


def solve_new(p: IdeProblem) -> Trajectory:
    """RK4 on ``u' = F_c(t, <u; e^v>)``, ``v' = rho_F(t, <u; e^v>)``."""
    f = compile_components(p.rhs)
    x0 = p.x0_interval()
    grid = p.grid
    ys = _rk4(_guarded(f), grid, (x0.center, x0.log_radius))
    return Trajectory.from_components(grid, ys[:, 0], ys[:, 1], label="new",
                                      meta={"method": "rk4", "step": grid[1] - grid[0]})


# --- Picard iteration ---------------------------------------------------------------

def solve_picard(p: IdeProblem) -> Trajectory:
    """Fixed-point iteration of the integral operator on the solver grid.

    Starts from the constant trajectory ``x0``; integrals are cumulative
    composite Simpson sums over the grid nodes.
    """
    f = compile_components(p.rhs, vector=True)
    x0 = p.x0_interval()
    grid = p.grid
    c = np.full(grid.shape, x0.center)
    r = np.full(grid.shape, x0.log_radius)
    prev = Trajectory.from_components(grid, c, r)
    residual = math.inf
    for it in range(1, p.picard_max_iter + 1):
        try:
            with np.errstate(all="ignore"):
                fc, fr = f(grid, c, r)
        except (IntervalError, ArithmeticError) as exc:
            raise RhsEvaluation(_first_failure(p.rhs, grid, c, r), exc) from None
        fc = np.broadcast_to(fc, grid.shape)
        fr = np.broadcast_to(fr, grid.shape)
        bad = ~(np.isfinite(fc) & np.isfinite(fr))
        if bad.any():
            raise RhsEvaluation(float(grid[np.argmax(bad)]), "non-finite rhs")
        c = x0.center + cumulative_simpson(fc, x=grid, initial=0.0)
        r = x0.log_radius + cumulative_simpson(fr, x=grid, initial=0.0)
        cur = Trajectory.from_components(grid, c, r, label="picard")
        residual = sup_distance(cur, prev)
        prev = cur
        if residual < p.picard_tol:
            cur.meta.update(method="picard", iterations=it, residual=residual)
            return cur
    prev.meta.update(method="picard", iterations=p.picard_max_iter, residual=residual)
    raise NonConvergence(prev, residual, p.picard_max_iter)


def _first_failure(rhs, grid, c, r):
    f = compile_components(rhs)
    for t, cc, rr in zip(grid, c, r):
        try:
            f(float(t), float(cc), float(rr))
        except (IntervalError, ArithmeticError):
            return float(t)
    return float("nan")


# --- gH branch systems ---------------------------------------------------------------

@dataclass
class DiscardedBranch:
    branch: GhBranch
    t: float
    reason: str


@dataclass
class GhResult:
    trajectories: list
    discarded: list

    def __iter__(self):
        return iter(self.trajectories)

    def __len__(self):
        return len(self.trajectories)

    def __getitem__(self, i):
        return self.trajectories[i]


class _Infeasible(Exception):
    def __init__(self, t, reason):
        self.t, self.reason = t, reason


def _feasible(t, y):
    """Clamp a roundoff-sized inversion to a point; reject a real one."""
    gap = y[0] - y[1]
    if gap <= 0:
        return y
    if gap > 1e-9 * (1.0 + max(abs(y[0]), abs(y[1]))):
        raise _Infeasible(t, f"left endpoint exceeds right by {gap:.3e}")
    m = 0.5 * (y[0] + y[1])
    return m, m


def _gh_one(p: IdeProblem, branch: GhBranch, grid):
    rhs = p.rhs

    def field(t, y, kind):
        y = _feasible(t, y)
        try:
            fl, fr = eval_endpoint_pair(rhs, t, y[0], y[1])
        except IntervalError as exc:
            raise RhsEvaluation(t, exc) from None
        return (fl, fr) if kind == TYPE_I else (fr, fl)

    out = np.empty((len(grid), 2))
    y = (p.x0.lo, p.x0.hi)
    out[0] = y
    switches = branch.switch_times
    for k in range(len(grid) - 1):
        t, t1 = float(grid[k]), float(grid[k + 1])
        cuts = [s for s in switches if t < s < t1]
        a = t
        for b in cuts + [t1]:
            kind = branch.type_at(a)
            y = _rk4_step(lambda s, z: field(s, z, kind), a, b - a, y)
            a = b
        if not all(math.isfinite(v) for v in y):
            raise _Infeasible(t1, "solution became non-finite")
        y = _feasible(t1, y)
        out[k + 1] = y
    return out


def solve_gh(p: IdeProblem, branches=None) -> GhResult:
    """Integrate the endpoint system for each branch assignment.

    Type (i) uses ``(x_l', x_r') = (f_l, f_r)``, type (ii) uses
    ``(f_r, f_l)``.  A branch whose left endpoint overtakes the right one is
    dropped and listed in ``discarded``; small inversions from roundoff are
    clamped to a point.
    """
    branches = list(branches if branches is not None else p.gh_branches)
    if not branches:
        branches = [GhBranch((TYPE_I,)), GhBranch((TYPE_II,))]
    grid = p.grid
    kept, dropped = [], []
    for br in branches:
        try:
            ys = _gh_one(p, br, grid)
        except _Infeasible as exc:
            dropped.append(DiscardedBranch(br, exc.t, exc.reason))
            continue
        kept.append(Trajectory.from_endpoints(grid, ys[:, 0], ys[:, 1], label=f"gh[{br.label}]",
                                              meta={"method": "gh_branch", "branch": br}))
    if not kept:
        detail = "; ".join(f"{d.branch.label} at t={d.t:.6g}: {d.reason}" for d in dropped)
        raise BranchInfeasible(f"every branch was discarded ({detail})")
    return GhResult(kept, dropped)


# --- parametric sweep ----------------------------------------------------------------

def _thread_count(requested):
    if requested is None:
        env = os.environ.get("INTERVALKIT_THREADS", "0").strip() or "0"
        try:
            requested = int(env)
        except ValueError:
            requested = 0
    if requested <= 0:
        requested = os.cpu_count() or 1
    return max(1, requested)


def _sweep_chunk(fn, grid, x, params):
    """Vectorised RK4 over a batch of (x0, params) samples; returns min/max."""
    lo = np.empty(len(grid))
    hi = np.empty(len(grid))
    lo[0], hi[0] = x.min(), x.max()
    with np.errstate(all="ignore"):
        for k in range(len(grid) - 1):
            t, h = grid[k], grid[k + 1] - grid[k]
            k1 = fn(t, x, params)
            k2 = fn(t + 0.5 * h, x + 0.5 * h * k1, params)
            k3 = fn(t + 0.5 * h, x + 0.5 * h * k2, params)
            k4 = fn(t + h, x + h * k3, params)
            x = x + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            if not np.all(np.isfinite(x)):
                raise RhsEvaluation(float(grid[k + 1]), "non-finite value in parameter sweep")
            lo[k + 1], hi[k + 1] = x.min(), x.max()
    return lo, hi


def sweep_samples(p: IdeProblem):
    """Tensor grid of initial values and parameter values (each axis uses
    ``sweep_density`` evenly spaced samples, interior points included)."""
    lits = interval_literals(p.rhs)
    axes = []
    x0 = p.x0
    if x0.lo == x0.hi:
        axes.append(np.array([x0.lo]))
    else:
        axes.append(np.linspace(x0.lo, x0.hi, p.sweep_density))
    for lit in lits:
        lo, hi = lit.bounds
        axes.append(np.linspace(lo, hi, p.sweep_density))
    mesh = np.meshgrid(*axes, indexing="ij")
    cols = [m.ravel() for m in mesh]
    return cols[0], cols[1:]


def solve_param_sweep(p: IdeProblem) -> Trajectory:
    """Pointwise envelope of the real solutions over the sample grid."""
    x, params = sweep_samples(p)
    check_params(p.rhs, params)
    fn = compile_param(p.rhs)
    grid = p.grid

    def rhs(t, xs, ps):
        v = fn(t, xs, ps)
        return np.broadcast_to(v, xs.shape) if np.ndim(v) == 0 else v

    n = len(x)
    workers = min(_thread_count(p.sweep_threads), max(1, n // 64))
    bounds = np.linspace(0, n, workers + 1).astype(int)
    chunks = [(x[a:b], [q[a:b] for q in params]) for a, b in zip(bounds, bounds[1:]) if b > a]
    if len(chunks) == 1:
        results = [_sweep_chunk(rhs, grid, *chunks[0])]
    else:
        with ThreadPoolExecutor(max_workers=len(chunks)) as ex:
            results = list(ex.map(lambda c: _sweep_chunk(rhs, grid, *c), chunks))
    lo = np.min([r[0] for r in results], axis=0)
    hi = np.max([r[1] for r in results], axis=0)
    return Trajectory.from_endpoints(grid, lo, hi, label="sweep",
                                     meta={"method": "param_sweep", "samples": n})


def solve(p: IdeProblem):
    """Dispatch on ``p.method``; gh returns a :class:`GhResult`."""
    if p.method == "rk4":
        return solve_new(p)
    if p.method == "picard":
        return solve_picard(p)
    if p.method == "gh_branch":
        return solve_gh(p)
    return solve_param_sweep(p)


# --- comparison ------------------------------------------------------------------------

@dataclass
class ComparisonReport:
    labels: list
    pairs: list  # (i, j, sup deviation, t at which it occurs)
    grid: np.ndarray
    lows: list
    highs: list

    def deviation(self, i, j) -> float:
        for a, b, d, _ in self.pairs:
            if (a, b) == (i, j) or (a, b) == (j, i):
                return d
        raise KeyError((i, j))

    def rows(self):
        """Per-node rows: t followed by lo/hi of every trajectory."""
        for k, t in enumerate(self.grid):
            row = [float(t)]
            for lo, hi in zip(self.lows, self.highs):
                row += [float(lo[k]), float(hi[k])]
            yield row

    def header(self):
        cols = ["t"]
        for i, _ in enumerate(self.labels):
            cols += [f"lo_{i}", f"hi_{i}"]
        return cols


def compare(trajs) -> ComparisonReport:
    """Pairwise sup over nodes of ``max(|lo - lo'|, |hi - hi'|)``."""
    trajs = list(trajs)
    if len(trajs) < 1:
        raise ValueError("nothing to compare")
    for tr in trajs[1:]:
        check_same_grid(trajs[0], tr)
    pairs = []
    for i, j in itertools.combinations(range(len(trajs)), 2):
        a, b = trajs[i], trajs[j]
        dev = np.maximum(np.abs(a.lo - b.lo), np.abs(a.hi - b.hi))
        k = int(np.argmax(dev))
        pairs.append((i, j, float(dev[k]), float(a.grid[k])))
    return ComparisonReport([t.label for t in trajs], pairs, trajs[0].grid,
                            [t.lo for t in trajs], [t.hi for t in trajs])


__all__ = ["IdeProblem", "GhBranch", "GhResult", "DiscardedBranch", "ComparisonReport",
           "enumerate_branches", "solve", "solve_new", "solve_picard", "solve_gh",
           "solve_param_sweep", "sweep_samples", "compare", "METHODS"]
