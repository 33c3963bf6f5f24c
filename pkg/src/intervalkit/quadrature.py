"""Interval Riemann integral and the checks built on it.

The integral of ``f = <f_c; f_w>`` over ``[a, b]`` is
``<int f_c; exp(int ln f_w)>``, i.e. two ordinary integrals in
(center, log_radius) coordinates.  Each is computed by adaptive Simpson.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

from .calculus import H0, IvfHandle, _derivatives, derive
from .core import ExtendedInterval, Interval, add, from_real, mul, sub
from .errors import IntervalError, MaxDepthExceeded, NonFinite, NonPositiveIntegrand
from .metric import distance

INITIAL_PANELS = 8
MAX_DEPTH = 40
_EPS = 2.220446049250313e-16


@dataclass(frozen=True)
class QuadratureResult:
    value: Interval
    estimated_error: float
    evaluations: int


def adaptive_simpson(g: Callable[[float], float], a: float, b: float, tol: float,
                     panels: int = INITIAL_PANELS, max_depth: int = MAX_DEPTH):
    """Integrate a real function; returns (value, error estimate, #calls).

    A panel is accepted when the two-half estimate differs from the whole
    by at most ``15 * tol_panel``; the accepted value carries the usual
    Richardson correction.  The tolerance is floored at ``50 eps |S|`` so
    that roundoff never forces a split.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    calls = 0

    def G(t):
        nonlocal calls
        calls += 1
        try:
            v = g(t)
        except IntervalError:
            raise
        except (OverflowError, ValueError, ZeroDivisionError) as exc:
            raise NonFinite(f"integrand failed at t={float(t)!r}: {exc}") from None
        if not math.isfinite(v):
            raise NonFinite(f"non-finite integrand at t={t!r}")
        return v

    def simpson(fa, fm, fb, h):
        return h / 6.0 * (fa + 4.0 * fm + fb)

    total = 0.0
    err = 0.0
    xs = [a + (b - a) * i / panels for i in range(panels + 1)]
    fx = [G(x) for x in xs]
    for i in range(panels):
        lo, hi = xs[i], xs[i + 1]
        m = 0.5 * (lo + hi)
        f_lo, f_hi, f_m = fx[i], fx[i + 1], G(m)
        stack = [(lo, hi, f_lo, f_m, f_hi, simpson(f_lo, f_m, f_hi, hi - lo), tol / panels, 0)]
        while stack:
            l, r, fl, fm, fr, whole, eps, depth = stack.pop()
            m = 0.5 * (l + r)
            lm, rm = 0.5 * (l + m), 0.5 * (m + r)
            flm, frm = G(lm), G(rm)
            left = simpson(fl, flm, fm, m - l)
            right = simpson(fm, frm, fr, r - m)
            delta = left + right - whole
            if abs(delta) <= max(15.0 * eps, 50.0 * _EPS * abs(left + right)):
                total += left + right + delta / 15.0
                err += abs(delta) / 15.0
                continue
            if depth + 1 >= max_depth:
                raise MaxDepthExceeded(
                    f"adaptive Simpson reached depth {max_depth} on [{l!r}, {r!r}]")
            stack.append((m, r, fm, frm, fr, right, 0.5 * eps, depth + 1))
            stack.append((l, m, fl, flm, fm, left, 0.5 * eps, depth + 1))
    return total, err, calls


def _check_range(f: IvfHandle, a: float, b: float):
    if not a < b:
        raise ValueError(f"integration needs a < b, got a={a!r}, b={b!r}")
    lo, hi = f.domain
    if a < lo or b > hi:
        raise ValueError(f"[{a!r}, {b!r}] is not inside the domain [{lo!r}, {hi!r}]")


def ir_integral(f: IvfHandle, a: float, b: float, tol: float = 1e-10) -> QuadratureResult:
    """Interval Riemann integral of ``f`` over ``[a, b]``."""
    a, b = float(a), float(b)
    _check_range(f, a, b)
    cache: dict[float, tuple[float, float]] = {}

    def comp(t):
        v = cache.get(t)
        if v is None:
            v = cache[t] = f.components(t)
        return v

    part = tol / math.sqrt(2.0)
    ic, ec, _ = adaptive_simpson(lambda t: comp(t)[0], a, b, part)
    ip, ep, _ = adaptive_simpson(lambda t: comp(t)[1], a, b, part)
    try:
        value = Interval(ic, ip)
    except IntervalError as exc:
        raise NonFinite(str(exc)) from None
    return QuadratureResult(value, math.hypot(ec, ep), len(cache))


def endpoint_integral(g: Callable[[float], ExtendedInterval], a: float, b: float,
                      tol: float = 1e-10) -> ExtendedInterval:
    """Classical integral of an endpoint-valued function: ``[int g_l, int g_r]``.

    Used for gH-derivatives, whose integral is taken endpoint by endpoint.
    """
    cache: dict[float, ExtendedInterval] = {}

    def val(t):
        v = cache.get(t)
        if v is None:
            v = cache[t] = g(t)
        return v

    lo, _, _ = adaptive_simpson(lambda t: val(t).lo, float(a), float(b), tol / 2)
    hi, _, _ = adaptive_simpson(lambda t: val(t).hi, float(a), float(b), tol / 2)
    return ExtendedInterval(lo, hi)


def mult_integral(g: Callable[[float], float], a: float, b: float, tol: float = 1e-10) -> float:
    """Multiplicative integral ``exp(int_a^b ln g)`` of a positive function."""
    def lng(t):
        v = g(t)
        if not v > 0:
            raise NonPositiveIntegrand(f"integrand {v!r} is not positive at t={t!r}")
        return math.log(v)
    val, _, _ = adaptive_simpson(lng, float(a), float(b), tol)
    return math.exp(val)


def derivative_handle(F: IvfHandle, h0: float = H0) -> IvfHandle:
    """``t -> derive(F, t).value`` on the part of F's domain where it is defined."""
    lo, hi = F.domain

    def comp(t):
        v = derive(F, t, h0).value
        return v.center, v.log_radius
    m = 2 * h0 * (1 + 1e-8)
    return IvfHandle(domain=(lo + m, hi - m), components=comp)


@dataclass(frozen=True)
class Sides:
    lhs: Interval
    rhs: Interval

    @property
    def distance(self) -> float:
        return distance(self.lhs, self.rhs)


def ftc_sides(F: IvfHandle, a: float, b: float, tol: float = 1e-10) -> Sides:
    """``F(b) - F(a)`` and the integral of ``F'`` over ``[a, b]``.

    ``F`` must be defined a little beyond ``[a, b]`` (``2 * H0`` on each side)
    because the derivative is only taken at interior points.
    """
    lhs = sub(F(b), F(a))
    rhs = ir_integral(derivative_handle(F), a, b, tol).value
    return Sides(lhs, rhs)


def verify_ftc(F: IvfHandle, a: float, b: float, tol: float = 1e-8) -> bool:
    return ftc_sides(F, a, b, tol / 4).distance < tol


class _RealFn:
    """Real-valued factor; embeds as ``(g, g)`` in product integrands."""

    def __init__(self, g, domain):
        self.g = g
        self.domain = domain

    def components(self, t):
        v = float(self.g(t))
        return v, v

    def derivative_components(self, t, h0=H0):
        (d,), _ = _derivatives(lambda s: (float(self.g(s)),), t, h0, True)
        return d, d

    def __call__(self, t):
        return from_real(self.g(t))


def _factor(G, domain):
    if isinstance(G, IvfHandle):
        return G
    if callable(G):
        return _RealFn(G, domain)
    raise TypeError("G must be an IvfHandle or a real function")


def _deriv_components(H, t):
    if isinstance(H, _RealFn):
        return H.derivative_components(t)
    v = derive(H, t).value
    return v.center, v.log_radius


def by_parts_sides(F: IvfHandle, G, a: float, b: float, tol: float = 1e-10) -> Sides:
    """Both sides of the product rule for integrals.

    ``G`` may be an :class:`IvfHandle` or a plain real function; a real
    ``G`` is embedded pointwise.
    """
    Gh = _factor(G, F.domain)
    lhs = sub(mul(F(b), Gh(b)), mul(F(a), Gh(a)))
    lo, hi = F.domain
    if isinstance(Gh, IvfHandle):
        lo, hi = max(lo, Gh.domain[0]), min(hi, Gh.domain[1])
    m = 2 * H0 * (1 + 1e-8)
    dom = (lo + m, hi - m)

    def dF_G(t):
        fc, fp = _deriv_components(F, t)
        gc, gp = Gh.components(t)
        return fc * gc, fp * gp

    def F_dG(t):
        fc, fp = F.components(t)
        gc, gp = _deriv_components(Gh, t)
        return fc * gc, fp * gp

    i1 = ir_integral(IvfHandle(domain=dom, components=dF_G), a, b, tol).value
    i2 = ir_integral(IvfHandle(domain=dom, components=F_dG), a, b, tol).value
    return Sides(lhs, add(i1, i2))


def verify_by_parts(F: IvfHandle, G, a: float, b: float, tol: float = 1e-8) -> bool:
    return by_parts_sides(F, G, a, b, tol / 4).distance < tol
