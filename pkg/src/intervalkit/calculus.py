"""Differentiation and continuity probes for interval-valued functions.

The derivative of ``f = <f_c; f_w>`` is ``<f_c'; exp((ln f_w)')>``: an
ordinary derivative of the center and a multiplicative derivative of the
radius.  In (center, log_radius) coordinates both are plain derivatives, so
each is computed by Richardson-extrapolated central differences.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

from .core import ExtendedInterval, Interval, from_endpoints
from .errors import DomainBoundary, IntervalError, NonDifferentiable, NonFinite
from .evaluate import compile_components
from .expr import IntervalOf, parse, substitute_var, variables

H0 = 1e-4
LEVELS = 3
BISECT_TOL = 1e-10


class IvfHandle:
    """An interval-valued function of one real variable on a closed domain.

    Build one with :meth:`from_expr`, :meth:`from_function`,
    :meth:`from_endpoint_functions` or :meth:`from_components`.
    """

    def __init__(self, *, domain, components=None, endpoints=None, expr=None):
        lo, hi = float(domain[0]), float(domain[1])
        if not lo < hi:
            raise ValueError(f"domain needs lo < hi, got {domain!r}")
        if components is None and endpoints is None:
            raise ValueError("need a components or endpoints evaluator")
        self.domain = (lo, hi)
        self.expr = expr
        self._components = components
        self._endpoints = endpoints
        # Both ends must evaluate.
        self.endpoints(lo)
        self.endpoints(hi)

    # --- constructors ----------------------------------------------------------------
    @classmethod
    def from_expr(cls, src, domain, var: str | None = None):
        """Expression in ``t``.  If it only uses ``x``, that is taken as the
        variable instead (``var`` forces the choice)."""
        node = parse(src) if isinstance(src, str) else src
        names = variables(node)
        if var is None:
            var = "x" if names == {"x"} else "t"
        if var == "x":
            if "t" in names:
                raise ValueError("expression uses both t and x; pick one variable")
            node = substitute_var(node, "x", "t")
        elif "x" in names:
            raise ValueError("an interval-valued function may not depend on x")
        comp = compile_components(node)
        endpoints = None
        if isinstance(node, IntervalOf) and node.form == "endpoints":
            fl = compile_components(node.first)
            fr = compile_components(node.second)
            # real subexpressions embed as (v, v); take the center
            endpoints = lambda t: (fl(t, 0.0, 0.0)[0], fr(t, 0.0, 0.0)[0])  # noqa: E731
        return cls(domain=domain, components=lambda t: comp(t, 0.0, 0.0),
                   endpoints=endpoints, expr=node)

    @classmethod
    def from_function(cls, fn: Callable[[float], Interval], domain):
        def comp(t):
            v = fn(t)
            if isinstance(v, ExtendedInterval):
                v = v.to_interval()
            return v.center, v.log_radius
        return cls(domain=domain, components=comp)

    @classmethod
    def from_endpoint_functions(cls, fl, fr, domain):
        return cls(domain=domain, endpoints=lambda t: (fl(t), fr(t)))

    @classmethod
    def from_components(cls, fc, frho, domain):
        return cls(domain=domain, components=lambda t: (fc(t), frho(t)))

    # --- evaluation ----------------------------------------------------------------
    def components(self, t: float) -> tuple[float, float]:
        if self._components is not None:
            return self._components(t)
        l, r = self._endpoints(t)
        w = 0.5 * (r - l)
        if not w > 0:
            raise NonFinite(f"zero width at t={t!r}; log-radius undefined")
        return 0.5 * (l + r), math.log(w)

    def endpoints(self, t: float) -> tuple[float, float]:
        if self._endpoints is not None:
            return self._endpoints(t)
        c, p = self._components(t)
        w = math.exp(p)
        return c - w, c + w

    def __call__(self, t: float) -> Interval:
        if self._components is not None:
            return Interval(*self._components(t))
        return from_endpoints(*self._endpoints(t))


@dataclass(frozen=True)
class DerivativeResult:
    value: Interval
    estimated_error: float


@dataclass(frozen=True)
class GhDerivativeResult:
    value: ExtendedInterval
    estimated_error: float


# --- finite differences --------------------------------------------------------------

def _richardson(d, order_step):
    """Extrapolate estimates d[i] taken at h0/2**i.

    ``order_step`` is 2 for central differences (even error powers) and 1 for
    one-sided ones.  Returns (value, last correction).
    """
    row = list(d)
    corr = 0.0
    for j in range(1, len(row)):
        fac = 2.0 ** (order_step * j) - 1.0
        new = [row[i] + (row[i] - row[i - 1]) / fac for i in range(1, len(row))]
        corr = abs(new[-1] - row[-1])
        row = new
    return row[-1], corr


def _sample(g, t, hs):
    """g at t and t +/- h for each h; returns (g0, plus list, minus list)."""
    try:
        g0 = g(t)
        plus = [g(t + h) for h in hs]
        minus = [g(t - h) for h in hs]
    except IntervalError:
        raise
    except (OverflowError, ValueError, ZeroDivisionError) as exc:
        raise NonFinite(f"evaluation failed near t={t!r}: {exc}") from None
    vals = [g0, *plus, *minus]
    for v in vals:
        if not all(math.isfinite(c) for c in v):
            raise NonFinite(f"non-finite sample near t={t!r}")
    return g0, plus, minus


def _check_interior(f: IvfHandle, t: float, h0: float):
    lo, hi = f.domain
    if t - lo < 2 * h0 or hi - t < 2 * h0:
        raise DomainBoundary(
            f"t={t!r} is within {2 * h0:g} of the domain boundary [{lo!r}, {hi!r}]")


def _derivatives(g, t, h0, check_sides):
    """Richardson derivatives of each component of the vector function g."""
    hs = [h0 / 2 ** i for i in range(LEVELS)]
    g0, plus, minus = _sample(g, t, hs)
    out, errs = [], []
    for k in range(len(g0)):
        central = [(p[k] - m[k]) / (2 * h) for p, m, h in zip(plus, minus, hs)]
        val, err = _richardson(central, 2)
        if check_sides:
            fwd, ef = _richardson([(p[k] - g0[k]) / h for p, h in zip(plus, hs)], 1)
            bwd, eb = _richardson([(g0[k] - m[k]) / h for m, h in zip(minus, hs)], 1)
            floor = 1e-8 * (1.0 + abs(val) + abs(g0[k]))
            if abs(fwd - bwd) > 100.0 * (ef + eb + err) + floor:
                raise NonDifferentiable(
                    f"one-sided derivatives disagree at t={t!r}: {fwd:.6g} vs {bwd:.6g}")
        out.append(val)
        errs.append(err)
    return out, errs


def derive(f: IvfHandle, t: float, h0: float = H0) -> DerivativeResult:
    """Derivative of ``f`` at an interior point ``t``."""
    t = float(t)
    _check_interior(f, t, h0)
    (dc, dp), errs = _derivatives(f.components, t, h0, True)
    if not (math.isfinite(dc) and math.isfinite(dp)):
        raise NonFinite(f"non-finite derivative at t={t!r}")
    return DerivativeResult(Interval(dc, dp), max(errs))


def gh_derive(f: IvfHandle, t: float, h0: float = H0) -> GhDerivativeResult:
    """gH-derivative ``[min(f_l', f_r'), max(f_l', f_r')]`` at ``t``."""
    t = float(t)
    _check_interior(f, t, h0)
    (dl, dr), errs = _derivatives(f.endpoints, t, h0, True)
    return GhDerivativeResult(ExtendedInterval(min(dl, dr), max(dl, dr)), max(errs))


def _width_slope(f, t, h0):
    (dp,), (err,) = _derivatives(lambda s: (f.components(s)[1],), t, h0, False)
    return dp, err


def find_switching_points(f: IvfHandle, grid_n: int = 256, h0: float = H0,
                          xtol: float = BISECT_TOL) -> list[float]:
    """Points where the width derivative changes sign.

    Samples the derivative of ``ln f_w`` (same sign as ``f_w'``) on
    ``grid_n`` nodes and bisects every sign change down to ``xtol``.
    Derivatives below a noise floor count as zero; a run of zeros only
    counts when the sign on either side differs.
    """
    if grid_n < 16:
        raise ValueError("grid_n must be at least 16")
    lo, hi = f.domain
    a, b = lo + 2 * h0, hi - 2 * h0
    ts = [a + (b - a) * i / (grid_n - 1) for i in range(grid_n)]

    def sign(t):
        d, err = _width_slope(f, t, h0)
        if abs(d) <= max(1e-9, 10 * err):
            return 0
        return 1 if d > 0 else -1

    signs = [sign(t) for t in ts]
    roots = []
    last = None  # index of the previous nonzero sample
    for i, s in enumerate(signs):
        if s == 0:
            continue
        if last is not None and signs[last] != s:
            roots.append(_bisect_root(lambda t: _width_slope(f, t, h0)[0],
                                      ts[last], ts[i], signs[last], xtol))
        last = i
    return roots


def _bisect_root(g, a, b, sa, xtol):
    # Raw signs here: the noise floor would stop the search early.
    while b - a > xtol:
        m = 0.5 * (a + b)
        gm = g(m)
        if gm == 0:
            return m
        if (gm > 0) == (sa > 0):
            a = m
        else:
            b = m
    return 0.5 * (a + b)


def check_continuity(f: IvfHandle, grid_n: int = 200, tol: float = 1e-6,
                     refinements: int = 50) -> bool:
    """Sampling test for continuity.

    Uses the endpoint functions, since ``f`` is continuous exactly when
    ``f_l`` and ``f_r`` are.  Every grid cell whose endpoint increment exceeds
    ``tol`` is halved repeatedly, following the half with the larger
    increment.  A jump keeps its size under refinement while a continuous
    function's increment shrinks with the cell, so the function is reported
    discontinuous if any cell still exceeds ``tol`` after ``refinements``
    halvings.  This is a heuristic: it cannot see features between samples
    that are narrower than the grid and leave no trace at the nodes.
    """
    if grid_n < 2:
        raise ValueError("grid_n must be at least 2")
    lo, hi = f.domain
    ts = [lo + (hi - lo) * i / (grid_n - 1) for i in range(grid_n)]
    vals = [f.endpoints(t) for t in ts]

    def jump(u, v):
        return max(abs(u[0] - v[0]), abs(u[1] - v[1]))

    for i in range(grid_n - 1):
        a, b = ts[i], ts[i + 1]
        fa, fb = vals[i], vals[i + 1]
        if jump(fa, fb) <= tol:
            continue
        for _ in range(refinements):
            m = 0.5 * (a + b)
            if not a < m < b:
                break
            fm = f.endpoints(m)
            if jump(fa, fm) >= jump(fm, fb):
                b, fb = m, fm
            else:
                a, fa = m, fm
            if jump(fa, fb) <= tol:
                break
        if jump(fa, fb) > tol:
            return False
    return True
