"""Interval numbers in (center, log-radius) coordinates.

An interval ``[l, r]`` with ``l < r`` is stored as ``(c, rho)`` where
``c = (l + r) / 2`` and ``rho = ln((r - l) / 2)``.  The arithmetic defined
here is linear in those coordinates:

======================  ===========================
operation               (center, log_radius)
======================  ===========================
``a + b``               ``(ac + bc, pa + pb)``
``-a``                  ``(-ac, -pa)``
``k * a``               ``(k ac, k pa)``
``a * b``               ``(ac bc, pa pb)``
``a / b``               ``(ac / bc, pa / pb)``
``a ** n``              ``(ac**n, pa**n)``
======================  ===========================

Reals embed as ``lam -> (lam, lam)``, so ``0 -> [-1, 1]`` (additive zero) and
``1 -> [1-e, 1+e]`` (multiplicative identity).

The endpoint (Moore / Hukuhara) operations live next to it and return
:class:`ExtendedInterval`, which admits zero width.
"""

from __future__ import annotations

import enum
import math
import numbers
from dataclasses import dataclass

from .errors import (DegenerateInterval, DivisionUndefined, HDiffNotExists,
                     IntervalOverflow, MooreDivByZeroSpanning, NotInvertible)

EPS_DIV = 1e-12
CLASSIFY_TOL = 1e-9


def _fmt(v: float) -> str:
    return format(v, ".17g")


@dataclass(frozen=True, slots=True)
class Interval:
    center: float
    log_radius: float

    def __post_init__(self):
        if not (math.isfinite(self.center) and math.isfinite(self.log_radius)):
            raise IntervalOverflow(
                f"non-finite interval components ({self.center!r}, {self.log_radius!r})")

    # --- derived quantities -------------------------------------------------
    @property
    def radius(self) -> float:
        return math.exp(self.log_radius)

    @property
    def lo(self) -> float:
        return self.center - math.exp(self.log_radius)

    @property
    def hi(self) -> float:
        return self.center + math.exp(self.log_radius)

    def to_endpoints(self) -> tuple[float, float]:
        w = math.exp(self.log_radius)
        return self.center - w, self.center + w

    def to_extended(self) -> "ExtendedInterval":
        return ExtendedInterval(*self.to_endpoints())

    # --- operators ----------------------------------------------------------
    def __add__(self, other):
        o = _coerce(other)
        return NotImplemented if o is None else add(self, o)

    def __radd__(self, other):
        o = _coerce(other)
        return NotImplemented if o is None else add(o, self)

    def __sub__(self, other):
        o = _coerce(other)
        return NotImplemented if o is None else sub(self, o)

    def __rsub__(self, other):
        o = _coerce(other)
        return NotImplemented if o is None else sub(o, self)

    def __mul__(self, other):
        o = _coerce(other)
        return NotImplemented if o is None else mul(self, o)

    def __rmul__(self, other):
        o = _coerce(other)
        return NotImplemented if o is None else mul(o, self)

    def __truediv__(self, other):
        o = _coerce(other)
        return NotImplemented if o is None else div(self, o)

    def __rtruediv__(self, other):
        o = _coerce(other)
        return NotImplemented if o is None else div(o, self)

    def __neg__(self):
        return neg(self)

    def __pos__(self):
        return self

    def __pow__(self, n):
        return pow_n(self, n)

    def __str__(self):
        return format_endpoints(self)


@dataclass(frozen=True, slots=True)
class ExtendedInterval:
    """Endpoint pair with ``lo <= hi``; zero width is allowed."""

    lo: float
    hi: float

    def __post_init__(self):
        if not (self.lo <= self.hi):
            raise DegenerateInterval(f"reversed endpoint pair [{self.lo!r}, {self.hi!r}]")

    @property
    def center(self) -> float:
        return 0.5 * (self.lo + self.hi)

    @property
    def radius(self) -> float:
        return 0.5 * (self.hi - self.lo)

    @property
    def is_degenerate(self) -> bool:
        return self.lo == self.hi

    def to_interval(self) -> Interval:
        return from_endpoints(self.lo, self.hi)

    def __str__(self):
        return f"[{_fmt(self.lo)},{_fmt(self.hi)}]"


class OrderRelation(enum.Enum):
    EQUAL = "Equal"
    LESS = "Less"
    GREATER = "Greater"
    INCOMPARABLE = "Incomparable"


def _coerce(v):
    if isinstance(v, Interval):
        return v
    if isinstance(v, numbers.Real) and not isinstance(v, bool):
        return from_real(float(v))
    return None


# --- construction ------------------------------------------------------------

def from_endpoints(l: float, r: float) -> Interval:
    l = float(l)
    r = float(r)
    if not (math.isfinite(l) and math.isfinite(r)):
        raise DegenerateInterval(f"non-finite endpoint in [{l!r}, {r!r}]")
    if not l < r:
        raise DegenerateInterval(f"interval [{l!r}, {r!r}] needs l < r")
    w = 0.5 * (r - l)
    if w == 0.0:
        # r - l underflowed; no positive radius is representable.
        raise DegenerateInterval(f"interval [{l!r}, {r!r}] is too narrow")
    return Interval(0.5 * (l + r), math.log(w))


def from_center_radius(c: float, w: float) -> Interval:
    if not (w > 0 and math.isfinite(w)):
        raise DegenerateInterval(f"radius must be positive and finite, got {w!r}")
    return Interval(float(c), math.log(w))


def from_real(lam: float) -> Interval:
    return Interval(float(lam), float(lam))


ZERO = Interval(0.0, 0.0)
ONE = Interval(1.0, 1.0)


# --- the new arithmetic ------------------------------------------------------

def add(a: Interval, b: Interval) -> Interval:
    return Interval(a.center + b.center, a.log_radius + b.log_radius)


def neg(a: Interval) -> Interval:
    return Interval(-a.center, -a.log_radius)


def sub(a: Interval, b: Interval) -> Interval:
    return Interval(a.center - b.center, a.log_radius - b.log_radius)


def scalar_mul(k: float, a: Interval) -> Interval:
    if not math.isfinite(k):
        raise IntervalOverflow(f"non-finite scalar {k!r}")
    return Interval(k * a.center, k * a.log_radius)


def mul(a: Interval, b: Interval) -> Interval:
    return Interval(a.center * b.center, a.log_radius * b.log_radius)


def inv(a: Interval) -> Interval:
    if abs(a.center) <= EPS_DIV or abs(a.log_radius) <= EPS_DIV:
        raise NotInvertible(f"{format_center_radius(a)} has center 0 or radius 1")
    return Interval(1.0 / a.center, 1.0 / a.log_radius)


def div(a: Interval, b: Interval) -> Interval:
    if abs(b.center) <= EPS_DIV or abs(b.log_radius) <= EPS_DIV:
        raise DivisionUndefined(
            f"divisor {format_center_radius(b)} has center 0 or radius 1")
    return Interval(a.center / b.center, a.log_radius / b.log_radius)


def pow_n(a: Interval, n: int) -> Interval:
    if isinstance(n, bool) or not isinstance(n, numbers.Integral) or n < 0:
        raise ValueError(f"exponent must be a nonnegative integer, got {n!r}")
    n = int(n)
    if n == 0:
        return ONE
    try:
        return Interval(a.center ** n, a.log_radius ** n)
    except OverflowError as exc:
        raise IntervalOverflow(str(exc)) from None


# --- orderings -----------------------------------------------------------------

def phi(a: Interval, b: Interval) -> float:
    """Signed order indicator: ``phi(a, b) <= 0`` exactly when ``a <= b``.

    When centers differ this is the center gap; otherwise it is
    ``a_w / b_w - 1``, computed as ``expm1`` of the log-radius gap so its sign
    is exact.
    """
    dc = a.center - b.center
    if dc != 0.0:
        return dc
    return math.expm1(a.log_radius - b.log_radius)


def _cmp(x, y):
    if x < y:
        return OrderRelation.LESS
    if x > y:
        return OrderRelation.GREATER
    return OrderRelation.EQUAL


def cmp_total(a: Interval, b: Interval) -> OrderRelation:
    """Lexicographic order on (center, radius)."""
    r = _cmp(a.center, b.center)
    return r if r is not OrderRelation.EQUAL else _cmp(a.log_radius, b.log_radius)


def cmp_preceq(a: Interval, b: Interval) -> OrderRelation:
    rc = _cmp(a.center, b.center)
    rw = _cmp(a.log_radius, b.log_radius)
    if rc is rw:
        return rc
    if rc is OrderRelation.EQUAL:
        return rw
    if rw is OrderRelation.EQUAL:
        return rc
    return OrderRelation.INCOMPARABLE


def _ends(v):
    if isinstance(v, (Interval, ExtendedInterval)):
        if isinstance(v, Interval):
            return v.to_endpoints()
        return v.lo, v.hi
    if isinstance(v, numbers.Real) and not isinstance(v, bool):
        f = float(v)
        return f, f
    if isinstance(v, tuple) and len(v) == 2:
        return float(v[0]), float(v[1])
    raise TypeError(f"cannot read endpoints from {type(v).__name__}")


def cmp_subset(a, b) -> OrderRelation:
    """Inclusion: ``LESS`` means a is a proper subset of b."""
    al, ar = _ends(a)
    bl, br = _ends(b)
    if al == bl and ar == br:
        return OrderRelation.EQUAL
    if bl <= al and ar <= br:
        return OrderRelation.LESS
    if al <= bl and br <= ar:
        return OrderRelation.GREATER
    return OrderRelation.INCOMPARABLE


# --- classical endpoint arithmetic --------------------------------------------

def moore_add(a, b) -> ExtendedInterval:
    al, ar = _ends(a)
    bl, br = _ends(b)
    return ExtendedInterval(al + bl, ar + br)


def moore_sub(a, b) -> ExtendedInterval:
    al, ar = _ends(a)
    bl, br = _ends(b)
    return ExtendedInterval(al - br, ar - bl)


def h_sub(a, b) -> ExtendedInterval:
    al, ar = _ends(a)
    bl, br = _ends(b)
    lo, hi = al - bl, ar - br
    if lo > hi:
        raise HDiffNotExists(
            f"Hukuhara difference of [{al!r},{ar!r}] and [{bl!r},{br!r}] needs a_w >= b_w")
    return ExtendedInterval(lo, hi)


def gh_sub(a, b) -> ExtendedInterval:
    al, ar = _ends(a)
    bl, br = _ends(b)
    x, y = al - bl, ar - br
    return ExtendedInterval(min(x, y), max(x, y))


def _mul_ends(al, ar, bl, br):
    # Sign-case table; only the mixed/mixed case needs a comparison.
    if al >= 0:
        if bl >= 0:
            return al * bl, ar * br
        if br <= 0:
            return ar * bl, al * br
        return ar * bl, ar * br
    if ar <= 0:
        if bl >= 0:
            return al * br, ar * bl
        if br <= 0:
            return ar * br, al * bl
        return al * br, al * bl
    if bl >= 0:
        return al * br, ar * br
    if br <= 0:
        return ar * bl, al * bl
    return min(al * br, ar * bl), max(al * bl, ar * br)


def moore_mul(a, b) -> ExtendedInterval:
    al, ar = _ends(a)
    bl, br = _ends(b)
    return ExtendedInterval(*_mul_ends(al, ar, bl, br))


def moore_div(a, b) -> ExtendedInterval:
    al, ar = _ends(a)
    bl, br = _ends(b)
    if bl <= 0.0 <= br:
        raise MooreDivByZeroSpanning(f"divisor [{bl!r},{br!r}] contains 0")
    return ExtendedInterval(*_mul_ends(al, ar, 1.0 / br, 1.0 / bl))


def moore_scalar(k: float, a) -> ExtendedInterval:
    al, ar = _ends(a)
    if k >= 0:
        return ExtendedInterval(k * al, k * ar)
    return ExtendedInterval(k * ar, k * al)


# --- new vs classical --------------------------------------------------------

_CLASSICAL_TAGS = ("add", "scalar", "sub", "gh_sub")


def _pair(op, a, b):
    if op == "add":
        return add(a, b), moore_add(a, b)
    if op == "scalar":
        return scalar_mul(b, a), moore_scalar(b, a)
    if op == "sub":
        return sub(a, b), moore_sub(a, b)
    if op == "gh_sub":
        return sub(a, b), gh_sub(a, b)
    raise ValueError(f"op must be one of {_CLASSICAL_TAGS}, got {op!r}")


def classify_vs_classical(op: str, a: Interval, b, tol: float = CLASSIFY_TOL) -> OrderRelation:
    """Inclusion relation of the new-arithmetic result to the classical one.

    ``op`` is ``"add"``, ``"sub"``, ``"gh_sub"`` or ``"scalar"`` (then ``b``
    is the real factor k).  ``LESS`` means the new result is strictly inside
    the classical one.  Endpoints within ``tol`` (scaled by magnitude) count
    as equal.
    """
    new, old = _pair(op, a, b)
    nl, nr = new.to_endpoints()
    ol, orr = old.lo, old.hi
    scale = max(1.0, abs(nl), abs(nr), abs(ol), abs(orr))
    t = tol * scale
    if abs(nl - ol) <= t and abs(nr - orr) <= t:
        return OrderRelation.EQUAL
    if nl >= ol - t and nr <= orr + t:
        return OrderRelation.LESS
    if ol >= nl - t and orr <= nr + t:
        return OrderRelation.GREATER
    return OrderRelation.INCOMPARABLE


def predict_vs_classical(op: str, a: Interval, b, tol: float = CLASSIFY_TOL) -> OrderRelation:
    """The same relation, read off the radius conditions instead of endpoints.

    * add: compare ``1/a_w + 1/b_w`` with 1
    * scalar: compare ``|k| a_w`` with ``a_w ** k``
    * sub: compare ``a_w / b_w`` with ``a_w + b_w``
    * gh_sub: compare ``a_w / b_w`` with ``|a_w - b_w|``
    """
    aw = a.radius
    if op == "add":
        bw = b.radius
        lhs, rhs = 1.0 / aw + 1.0 / bw, 1.0
        # larger lhs means a smaller new radius
        if math.isclose(lhs, rhs, rel_tol=tol, abs_tol=tol):
            return OrderRelation.EQUAL
        return OrderRelation.LESS if lhs > rhs else OrderRelation.GREATER
    if op == "scalar":
        new_w, old_w = math.exp(b * a.log_radius), abs(b) * aw
    elif op == "sub":
        bw = b.radius
        new_w, old_w = aw / bw, aw + bw
    elif op == "gh_sub":
        bw = b.radius
        new_w, old_w = aw / bw, abs(aw - bw)
    else:
        raise ValueError(f"op must be one of {_CLASSICAL_TAGS}, got {op!r}")
    if math.isclose(new_w, old_w, rel_tol=tol, abs_tol=tol):
        return OrderRelation.EQUAL
    return OrderRelation.LESS if new_w < old_w else OrderRelation.GREATER


# --- text forms ----------------------------------------------------------------

def format_endpoints(a: Interval) -> str:
    l, r = a.to_endpoints()
    return f"[{_fmt(l)},{_fmt(r)}]"


def format_center_radius(a: Interval) -> str:
    return f"<{_fmt(a.center)};{_fmt(a.radius)}>"
