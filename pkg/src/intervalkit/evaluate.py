"""Evaluators for expression trees.

* :func:`eval_interval` walks the tree with :class:`Interval` values.  It is the
  reference semantics and is kept deliberately plain.
* :func:`compile_components` turns a tree into a closure over raw
  ``(center, log_radius)`` floats or numpy arrays.  The solvers use it; tests
  check it against the reference walker.
* :func:`eval_param` reads every interval literal as a real parameter.
* :func:`eval_endpoint_pair` uses the classical endpoint arithmetic.
"""

from __future__ import annotations

import functools
import math
from types import SimpleNamespace

import numpy as np

from . import core
from .core import EPS_DIV, ExtendedInterval, Interval
from .errors import (DegenerateInterval, DivisionUndefined, EvalTypeError,
                     HDiffNotExists, IntervalError, MooreDivByZeroSpanning,
                     NonFinite, ParamArityMismatch, ParamOutOfRange)
from .expr import (CLASSICAL, TRANSCENDENTAL, Binary, Call, IntervalLit,
                   IntervalOf, Power, RealLit, Unary, Var, interval_literals)
from .expr import walk as _walk

_REAL_FN = {"sin": math.sin, "cos": math.cos, "exp": math.exp, "ln": math.log, "abs": abs}
_MOORE_FN = {"madd": core.moore_add, "msub": core.moore_sub, "hsub": core.h_sub,
             "ghsub": core.gh_sub, "mmul": core.moore_mul, "mdiv": core.moore_div}


def _guard_math(fn, *args):
    try:
        return fn(*args)
    except IntervalError:
        raise
    except ZeroDivisionError as exc:
        raise DivisionUndefined(str(exc)) from None
    except (ValueError, OverflowError) as exc:
        raise NonFinite(str(exc)) from None


# --- reference evaluator -------------------------------------------------------------

def _as_interval(v):
    if isinstance(v, Interval):
        return v
    if isinstance(v, ExtendedInterval):
        return v.to_interval()
    return core.from_real(v)


def _is_real(v):
    return not isinstance(v, (Interval, ExtendedInterval))


def _ref(node, t, x):
    if isinstance(node, RealLit):
        return node.value
    if isinstance(node, Var):
        return t if node.name == "t" else x
    if isinstance(node, IntervalLit):
        return node.value
    if isinstance(node, IntervalOf):
        a, b = _ref(node.first, t, x), _ref(node.second, t, x)
        if not (_is_real(a) and _is_real(b)):
            raise EvalTypeError("interval bounds must be real-valued")
        if node.form == "center":
            return core.from_center_radius(a, b)
        return core.from_endpoints(a, b)
    if isinstance(node, Unary):
        v = _ref(node.child, t, x)
        return -v if _is_real(v) else core.neg(_as_interval(v))
    if isinstance(node, Power):
        v = _ref(node.base, t, x)
        if _is_real(v):
            return _guard_math(pow, v, node.n)
        return core.pow_n(_as_interval(v), node.n)
    if isinstance(node, Binary):
        a, b = _ref(node.lhs, t, x), _ref(node.rhs, t, x)
        if _is_real(a) and _is_real(b):
            if node.op == "+":
                return a + b
            if node.op == "-":
                return a - b
            if node.op == "*":
                return a * b
            if b == 0:
                raise DivisionUndefined("real division by zero")
            return a / b
        a, b = _as_interval(a), _as_interval(b)
        if node.op == "+":
            return core.add(a, b)
        if node.op == "-":
            return core.sub(a, b)
        if node.op == "*":
            return core.mul(a, b)
        return core.div(a, b)
    if isinstance(node, Call):
        args = [_ref(a, t, x) for a in node.args]
        if node.fn in TRANSCENDENTAL:
            if not _is_real(args[0]):
                raise EvalTypeError(f"{node.fn} is defined for real arguments only")
            return _guard_math(_REAL_FN[node.fn], args[0])
        if node.fn == "smul":
            k, a = _smul_args(args, _is_real)
            return core.moore_scalar(k, a)
        return _MOORE_FN[node.fn](*args)
    raise TypeError(f"not an expression node: {node!r}")


def _smul_args(args, is_real):
    a, b = args
    if is_real(a):
        return a, b
    if is_real(b):
        return b, a
    raise EvalTypeError("smul needs one real argument")


def eval_value(e, t: float = 0.0, x=None):
    """Like :func:`eval_interval` but without the final embedding.

    Returns a float, an :class:`Interval` or an :class:`ExtendedInterval`,
    whichever the outermost operation produced.  ``x`` is required only if
    the expression mentions it.
    """
    if x is None and any(isinstance(n, Var) and n.name == "x" for n in _walk(e)):
        raise EvalTypeError("expression uses x but no value for x was given")
    try:
        return _ref(e, float(t), x)
    except IntervalError:
        raise
    except OverflowError as exc:
        raise NonFinite(str(exc)) from None


def eval_interval(e, t: float, x: Interval | None = None) -> Interval:
    """Value of ``e`` at ``(t, x)`` in the new arithmetic.

    Reals are embedded as ``<lam; e^lam>`` when they meet an interval, and a
    real-valued result is embedded the same way.  Classical function results
    are converted back to :class:`Interval` when combined.
    """
    if x is None:
        x = core.ZERO
    try:
        v = _ref(e, float(t), x)
    except IntervalError:
        raise
    except OverflowError as exc:
        raise NonFinite(str(exc)) from None
    return _as_interval(v)


# --- compiled component evaluator ----------------------------------------------------

_SCALAR = SimpleNamespace(
    sin=math.sin, cos=math.cos, exp=math.exp, log=math.log, abs=abs,
    minimum=min, maximum=max, any=bool,
    where=lambda c, a, b: a if c else b)

_ARRAY = SimpleNamespace(
    sin=np.sin, cos=np.cos, exp=np.exp, log=np.log, abs=np.abs,
    minimum=np.minimum, maximum=np.maximum, any=np.any, where=np.where)

_LIBFN = {"sin": "sin", "cos": "cos", "exp": "exp", "ln": "log", "abs": "abs"}

# Each compiled node is a pair (kind, fn) with kind one of
#   "real": fn(t, c, p) -> real
#   "ival": fn(t, c, p) -> (center, log_radius)
#   "ext":  fn(t, c, p) -> (lo, hi)


def _to_ival(kind, fn, L):
    if kind == "ival":
        return fn
    if kind == "real":
        def f(t, c, p):
            v = fn(t, c, p)
            return v, v
        return f

    def f(t, c, p):
        lo, hi = fn(t, c, p)
        w = 0.5 * (hi - lo)
        if L.any(w <= 0):
            raise DegenerateInterval("classical result has zero width")
        return 0.5 * (lo + hi), L.log(w)
    return f


def _to_ext(kind, fn, L):
    if kind == "ext":
        return fn
    if kind == "real":
        def f(t, c, p):
            v = fn(t, c, p)
            return v, v
        return f

    def f(t, c, p):
        cc, pp = fn(t, c, p)
        w = L.exp(pp)
        return cc - w, cc + w
    return f


def _moore_binary(op, fa, fb, L):
    if op == "madd":
        def f(t, c, p):
            al, ar = fa(t, c, p)
            bl, br = fb(t, c, p)
            return al + bl, ar + br
    elif op == "msub":
        def f(t, c, p):
            al, ar = fa(t, c, p)
            bl, br = fb(t, c, p)
            return al - br, ar - bl
    elif op == "hsub":
        def f(t, c, p):
            al, ar = fa(t, c, p)
            bl, br = fb(t, c, p)
            lo, hi = al - bl, ar - br
            if L.any(lo > hi):
                raise HDiffNotExists("Hukuhara difference needs a_w >= b_w")
            return lo, hi
    elif op == "ghsub":
        def f(t, c, p):
            al, ar = fa(t, c, p)
            bl, br = fb(t, c, p)
            u, v = al - bl, ar - br
            return L.minimum(u, v), L.maximum(u, v)
    elif op in ("mmul", "mdiv"):
        def f(t, c, p):
            al, ar = fa(t, c, p)
            bl, br = fb(t, c, p)
            if op == "mdiv":
                if L.any((bl <= 0) & (br >= 0)):
                    raise MooreDivByZeroSpanning("divisor contains 0")
                bl, br = 1.0 / br, 1.0 / bl
            p1, p2, p3, p4 = al * bl, al * br, ar * bl, ar * br
            return (L.minimum(L.minimum(p1, p2), L.minimum(p3, p4)),
                    L.maximum(L.maximum(p1, p2), L.maximum(p3, p4)))
    else:
        raise ValueError(op)
    return f


def _compile(node, L):
    if isinstance(node, RealLit):
        v = node.value
        return "real", lambda t, c, p: v
    if isinstance(node, Var):
        if node.name == "t":
            return "real", lambda t, c, p: t
        return "ival", lambda t, c, p: (c, p)
    if isinstance(node, IntervalLit):
        val = node.value
        vc, vp = val.center, val.log_radius
        return "ival", lambda t, c, p: (vc, vp)
    if isinstance(node, IntervalOf):
        ka, fa = _compile(node.first, L)
        kb, fb = _compile(node.second, L)
        if ka != "real" or kb != "real":
            raise EvalTypeError("interval bounds must be real-valued")
        if node.form == "center":
            def f(t, c, p):
                cc, w = fa(t, c, p), fb(t, c, p)
                if L.any(w <= 0):
                    raise DegenerateInterval("radius must be positive")
                return cc, L.log(w)
        else:
            def f(t, c, p):
                lo, hi = fa(t, c, p), fb(t, c, p)
                w = 0.5 * (hi - lo)
                if L.any(w <= 0):
                    raise DegenerateInterval("interval needs left < right")
                return 0.5 * (lo + hi), L.log(w)
        return "ival", f
    if isinstance(node, Unary):
        k, fa = _compile(node.child, L)
        if k == "real":
            return "real", lambda t, c, p: -fa(t, c, p)
        fa = _to_ival(k, fa, L)

        def f(t, c, p):
            cc, pp = fa(t, c, p)
            return -cc, -pp
        return "ival", f
    if isinstance(node, Power):
        k, fa = _compile(node.base, L)
        n = node.n
        if k == "real":
            return "real", lambda t, c, p: fa(t, c, p) ** n
        if n == 0:
            return "ival", lambda t, c, p: (1.0, 1.0)
        fa = _to_ival(k, fa, L)

        def f(t, c, p):
            cc, pp = fa(t, c, p)
            return cc ** n, pp ** n
        return "ival", f
    if isinstance(node, Binary):
        return _compile_binary(node, L)
    if isinstance(node, Call):
        kinds, fns = zip(*(_compile(a, L) for a in node.args))
        if node.fn in TRANSCENDENTAL:
            if kinds[0] != "real":
                raise EvalTypeError(f"{node.fn} is defined for real arguments only")
            g, fa = getattr(L, _LIBFN[node.fn]), fns[0]
            return "real", lambda t, c, p: g(fa(t, c, p))
        if node.fn == "smul":
            if kinds[0] == "real":
                fk, fa, ka = fns[0], fns[1], kinds[1]
            elif kinds[1] == "real":
                fk, fa, ka = fns[1], fns[0], kinds[0]
            else:
                raise EvalTypeError("smul needs one real argument")
            fa = _to_ext(ka, fa, L)

            def f(t, c, p):
                k = fk(t, c, p)
                al, ar = fa(t, c, p)
                return L.where(k >= 0, k * al, k * ar), L.where(k >= 0, k * ar, k * al)
            return "ext", f
        fa = _to_ext(kinds[0], fns[0], L)
        fb = _to_ext(kinds[1], fns[1], L)
        return "ext", _moore_binary(node.fn, fa, fb, L)
    raise TypeError(f"not an expression node: {node!r}")


def _compile_binary(node, L):
    ka, fa = _compile(node.lhs, L)
    kb, fb = _compile(node.rhs, L)
    op = node.op
    if ka == "real" and kb == "real":
        if op == "+":
            return "real", lambda t, c, p: fa(t, c, p) + fb(t, c, p)
        if op == "-":
            return "real", lambda t, c, p: fa(t, c, p) - fb(t, c, p)
        if op == "*":
            return "real", lambda t, c, p: fa(t, c, p) * fb(t, c, p)

        def f(t, c, p):
            b = fb(t, c, p)
            if L.any(b == 0):
                raise DivisionUndefined("real division by zero")
            return fa(t, c, p) / b
        return "real", f
    fa = _to_ival(ka, fa, L)
    fb = _to_ival(kb, fb, L)
    if op == "+":
        def f(t, c, p):
            ac, ap = fa(t, c, p)
            bc, bp = fb(t, c, p)
            return ac + bc, ap + bp
    elif op == "-":
        def f(t, c, p):
            ac, ap = fa(t, c, p)
            bc, bp = fb(t, c, p)
            return ac - bc, ap - bp
    elif op == "*":
        def f(t, c, p):
            ac, ap = fa(t, c, p)
            bc, bp = fb(t, c, p)
            return ac * bc, ap * bp
    else:
        def f(t, c, p):
            ac, ap = fa(t, c, p)
            bc, bp = fb(t, c, p)
            if L.any(abs(bc) <= EPS_DIV) or L.any(abs(bp) <= EPS_DIV):
                raise DivisionUndefined("divisor has center 0 or radius 1")
            return ac / bc, ap / bp
    return "ival", f


@functools.lru_cache(maxsize=256)
def _compiled(node, vector: bool):
    L = _ARRAY if vector else _SCALAR
    kind, fn = _compile(node, L)
    return _to_ival(kind, fn, L)


def compile_components(e, vector: bool = False):
    """Closure ``(t, c, p) -> (c', p')`` matching :func:`eval_interval`.

    With ``vector=True`` the inputs may be numpy arrays; division and
    domain checks then apply to every element.  Non-finite values are not
    trapped in vector mode, so callers should check the result.
    """
    fn = _compiled(e, bool(vector))
    if vector:
        return fn

    def scalar(t, c, p):
        return _guard_math(fn, t, c, p)
    return scalar


# --- parametric (real) evaluator ---------------------------------------------------

def _param_fn(node):
    """Closure ``(t, x, params) -> real`` using numpy ufuncs."""
    if isinstance(node, RealLit):
        v = node.value
        return lambda t, x, P: v
    if isinstance(node, Var):
        return (lambda t, x, P: t) if node.name == "t" else (lambda t, x, P: x)
    if isinstance(node, IntervalLit):
        i = node.param_id
        return lambda t, x, P: P[i]
    if isinstance(node, IntervalOf):
        raise EvalTypeError("interval built from subexpressions has no parametric reading")
    if isinstance(node, Unary):
        f = _param_fn(node.child)
        return lambda t, x, P: -f(t, x, P)
    if isinstance(node, Power):
        f, n = _param_fn(node.base), node.n
        return lambda t, x, P: f(t, x, P) ** n
    if isinstance(node, Binary) or (isinstance(node, Call) and node.fn in CLASSICAL):
        if isinstance(node, Binary):
            fa, fb, op = _param_fn(node.lhs), _param_fn(node.rhs), node.op
        else:
            fa, fb = (_param_fn(a) for a in node.args)
            op = {"madd": "+", "msub": "-", "hsub": "-", "ghsub": "-",
                  "mmul": "*", "mdiv": "/", "smul": "*"}[node.fn]
        if op == "+":
            return lambda t, x, P: fa(t, x, P) + fb(t, x, P)
        if op == "-":
            return lambda t, x, P: fa(t, x, P) - fb(t, x, P)
        if op == "*":
            return lambda t, x, P: fa(t, x, P) * fb(t, x, P)
        return lambda t, x, P: np.divide(fa(t, x, P), fb(t, x, P))
    if isinstance(node, Call):
        g, f = getattr(_ARRAY, _LIBFN[node.fn]), _param_fn(node.args[0])
        return lambda t, x, P: g(f(t, x, P))
    raise TypeError(f"not an expression node: {node!r}")


@functools.lru_cache(maxsize=256)
def compile_param(e):
    """Unchecked vectorised closure ``(t, x, params) -> real``."""
    return _param_fn(e)


def check_params(e, params) -> None:
    lits = interval_literals(e)
    if len(params) != len(lits):
        raise ParamArityMismatch(
            f"expression has {len(lits)} interval literal(s), got {len(params)} parameter(s)")
    for lit, v in zip(lits, params):
        lo, hi = lit.bounds
        arr = np.asarray(v, dtype=float)
        if np.any(arr < lo) or np.any(arr > hi) or np.any(np.isnan(arr)):
            raise ParamOutOfRange(
                f"parameter {lit.param_id} = {v!r} outside [{lo!r}, {hi!r}]")


def eval_param(e, t, x, params):
    """Real reading of ``e``: the i-th interval literal is replaced by
    ``params[i]`` and every operation is ordinary real arithmetic.
    Accepts numpy arrays for ``t``, ``x`` and the parameters."""
    check_params(e, params)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        out = compile_param(e)(t, x, list(params))
    if np.ndim(out) == 0:
        out = float(out)
        if not math.isfinite(out):
            raise NonFinite(f"non-finite value at t={t!r}, x={x!r}")
    return out


# --- classical endpoint evaluator ---------------------------------------------------

def _pow_range(lo, hi, n):
    if n == 0:
        return 1.0, 1.0
    a, b = lo ** n, hi ** n
    if n % 2 == 1:
        return a, b
    if lo >= 0:
        return a, b
    if hi <= 0:
        return b, a
    return 0.0, max(a, b)


def _trig_range(fn, lo, hi, peak, trough):
    """Range of sin/cos over [lo, hi]; peak/trough are phase offsets of the
    extrema within one period."""
    tau = 2 * math.pi
    if hi - lo >= tau:
        return -1.0, 1.0
    a, b = fn(lo), fn(hi)
    lo_v, hi_v = min(a, b), max(a, b)
    k = math.ceil((lo - peak) / tau)
    if peak + k * tau <= hi:
        hi_v = 1.0
    k = math.ceil((lo - trough) / tau)
    if trough + k * tau <= hi:
        lo_v = -1.0
    return lo_v, hi_v


def _ep_unary_fn(name, lo, hi):
    if name == "sin":
        return _trig_range(math.sin, lo, hi, math.pi / 2, -math.pi / 2)
    if name == "cos":
        return _trig_range(math.cos, lo, hi, 0.0, math.pi)
    if name == "exp":
        return math.exp(lo), math.exp(hi)
    if name == "ln":
        return math.log(lo), math.log(hi)
    # abs
    if lo >= 0:
        return lo, hi
    if hi <= 0:
        return -hi, -lo
    return 0.0, max(-lo, hi)


def _ep(node, t, xl, xh):
    if isinstance(node, RealLit):
        return node.value, node.value
    if isinstance(node, Var):
        return (t, t) if node.name == "t" else (xl, xh)
    if isinstance(node, IntervalLit):
        return node.bounds
    if isinstance(node, IntervalOf):
        a = _ep(node.first, t, xl, xh)
        b = _ep(node.second, t, xl, xh)
        if a[0] != a[1] or b[0] != b[1]:
            raise EvalTypeError("interval bounds must be real-valued")
        if node.form == "center":
            if not b[0] >= 0:
                raise DegenerateInterval("radius must be nonnegative")
            return a[0] - b[0], a[0] + b[0]
        if not a[0] <= b[0]:
            raise DegenerateInterval("interval needs left <= right")
        return a[0], b[0]
    if isinstance(node, Unary):
        lo, hi = _ep(node.child, t, xl, xh)
        return -hi, -lo
    if isinstance(node, Power):
        lo, hi = _ep(node.base, t, xl, xh)
        return _pow_range(lo, hi, node.n)
    if isinstance(node, Binary) or (isinstance(node, Call) and node.fn in CLASSICAL):
        args = node.args if isinstance(node, Call) else (node.lhs, node.rhs)
        a = _ep(args[0], t, xl, xh)
        b = _ep(args[1], t, xl, xh)
        op = node.fn if isinstance(node, Call) else node.op
        if op in ("+", "madd"):
            return a[0] + b[0], a[1] + b[1]
        if op in ("-", "msub"):
            return a[0] - b[1], a[1] - b[0]
        if op in ("*", "mmul"):
            r = core.moore_mul(a, b)
            return r.lo, r.hi
        if op in ("/", "mdiv"):
            r = core.moore_div(a, b)
            return r.lo, r.hi
        if op == "hsub":
            r = core.h_sub(a, b)
            return r.lo, r.hi
        if op == "ghsub":
            r = core.gh_sub(a, b)
            return r.lo, r.hi
        # smul
        k, v = _smul_args((a, b), lambda q: q[0] == q[1])
        r = core.moore_scalar(k[0], v)
        return r.lo, r.hi
    if isinstance(node, Call):
        lo, hi = _ep(node.args[0], t, xl, xh)
        return _ep_unary_fn(node.fn, lo, hi)
    raise TypeError(f"not an expression node: {node!r}")


def eval_endpoint_pair(e, t: float, x_lo: float, x_hi: float) -> tuple[float, float]:
    """Classical endpoint value of ``e``; reals act as zero-width pairs."""
    return _guard_math(_ep, e, float(t), float(x_lo), float(x_hi))
