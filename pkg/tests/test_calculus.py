import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from intervalkit.calculus import (IvfHandle, check_continuity, derive, find_switching_points,
                                  gh_derive)
from intervalkit.core import (ZERO, Interval, add, div, from_endpoints, mul, scalar_mul, sub)
from intervalkit.errors import DomainBoundary, NonDifferentiable

from conftest import close_iv, ends_close

F = IvfHandle.from_expr("[t, t^2+1]", (-1.0, 1.0))
KINKED = IvfHandle.from_expr("[x^2/2, 1 + x^2/2 + 2*sin(x)^2]", (0.0, 2 * math.pi))


def _analytic_F(t):
    return Interval(t + 0.5, (2 * t - 1) / (t * t - t + 1))


def test_derive_examples():
    r = derive(F, 0.0)
    assert close_iv(r.value, Interval(0.5, -1.0), tol=1e-9)
    assert r.estimated_error >= 0 and math.isfinite(r.estimated_error)
    const = IvfHandle.from_expr("[2,5]", (0.0, 1.0))
    assert close_iv(derive(const, 0.5).value, ZERO, tol=1e-12)
    v = derive(KINKED, math.pi / 2).value
    assert ends_close(v, math.pi / 2 - 1, math.pi / 2 + 1, tol=1e-8)


@pytest.mark.parametrize("t", np.linspace(-0.9, 0.9, 13))
def test_derive_matches_closed_form(t):
    assert close_iv(derive(F, t).value, _analytic_F(t), tol=1e-8)


def test_derive_near_boundary():
    with pytest.raises(DomainBoundary):
        derive(F, 1.0)
    with pytest.raises(DomainBoundary):
        gh_derive(F, -1.0 + 1e-4)


def test_gh_derive_examples():
    assert ends_close(gh_derive(F, 0.0).value, 0.0, 1.0, tol=1e-9)
    const = IvfHandle.from_expr("[2,5]", (0.0, 1.0))
    v = gh_derive(const, 0.5).value
    assert abs(v.lo) < 1e-12 and abs(v.hi) < 1e-12
    x = math.pi / 4
    # endpoint derivatives x and x + 2 sin 2x, by hand
    assert ends_close(gh_derive(KINKED, x).value, x, x + 2 * math.sin(2 * x), tol=1e-8)


def test_abs_kink_is_not_differentiable_either_way():
    f = IvfHandle.from_expr("[-abs(t), abs(t)+1]", (-1.0, 1.0))
    with pytest.raises(NonDifferentiable):
        derive(f, 0.0)
    with pytest.raises(NonDifferentiable):
        gh_derive(f, 0.0)
    derive(f, 0.5)
    gh_derive(f, 0.5)


def test_switching_points():
    pts = find_switching_points(KINKED)
    assert len(pts) == 3
    for p, q in zip(pts, (math.pi / 2, math.pi, 1.5 * math.pi)):
        assert abs(p - q) <= 1e-8
    flat = IvfHandle.from_expr("[t, t+2]", (0.0, 3.0))
    assert find_switching_points(flat) == []
    one = find_switching_points(IvfHandle.from_expr("[t, t^2+1]", (0.0, 1.0)))
    assert len(one) == 1 and abs(one[0] - 0.5) <= 1e-8
    with pytest.raises(ValueError):
        find_switching_points(F, grid_n=8)


def test_continuity_examples():
    assert check_continuity(IvfHandle.from_expr("[t, t^2+1]", (0.0, 1.0)))
    step = IvfHandle.from_endpoint_functions(lambda t: 0.0 if t < 0.3 else 1.0,
                                             lambda t: 2.0 if t < 0.3 else 3.0, (0.0, 1.0))
    assert not check_continuity(step)

    def g_lo(x):
        u = abs(x - 2)
        return min(u, 2 - u)

    def g_hi(x):
        u = abs(x - 2)
        return max(u, 2 - u)

    # continuous with kinks; width vanishes at x = 1 and x = 3
    assert check_continuity(IvfHandle.from_endpoint_functions(g_lo, g_hi, (0.0, 4.0)))


def test_handle_constructors_agree():
    a = IvfHandle.from_expr("[t, t^2+1]", (0.0, 1.0))
    b = IvfHandle.from_endpoint_functions(lambda t: t, lambda t: t * t + 1, (0.0, 1.0))
    c = IvfHandle.from_function(lambda t: from_endpoints(t, t * t + 1), (0.0, 1.0))
    for t in (0.2, 0.7):
        assert close_iv(a(t), b(t)) and close_iv(a(t), c(t))
        assert close_iv(derive(a, t).value, derive(b, t).value, tol=1e-9)
    with pytest.raises(ValueError):
        IvfHandle.from_expr("x*t", (0.0, 1.0))
    with pytest.raises(ValueError):
        IvfHandle.from_expr("t", (1.0, 0.0))


def test_x_is_accepted_as_the_variable():
    a = IvfHandle.from_expr("[x, x^2+1]", (0.0, 1.0))
    assert close_iv(a(0.4), F(0.4))


# --- derivative algebra on random smooth IVFs -----------------------------------------

coef = st.floats(-2, 2, allow_nan=False)


def _poly_ivf(p, q, domain=(-1.0, 1.0)):
    # width 0.5 + q(t)^2 stays positive
    def lo(t):
        return p[0] + p[1] * t + p[2] * t * t

    def hi(t):
        return lo(t) + 0.5 + (q[0] + q[1] * t) ** 2

    return IvfHandle.from_endpoint_functions(lo, hi, domain)


ivfs = st.builds(_poly_ivf, st.tuples(coef, coef, coef), st.tuples(coef, coef))
points = st.floats(-0.8, 0.8)
ivals = st.builds(Interval, st.floats(-3, 3), st.floats(-2, 2))


def _close(a, b, tol):
    return close_iv(a, b, tol=tol)


@settings(max_examples=60)
@given(ivfs, ivfs, ivals, ivals, points)
def test_linearity(f, g, c1, c2, t):
    h = IvfHandle.from_function(lambda s: add(mul(c1, f(s)), mul(c2, g(s))), f.domain)
    want = add(mul(c1, derive(f, t).value), mul(c2, derive(g, t).value))
    assert _close(derive(h, t).value, want, 1e-6)


@settings(max_examples=60)
@given(ivfs, ivfs, points)
def test_product_rule(f, g, t):
    h = IvfHandle.from_function(lambda s: mul(f(s), g(s)), f.domain)
    df, dg = derive(f, t).value, derive(g, t).value
    want = add(mul(df, g(t)), mul(f(t), dg))
    assert _close(derive(h, t).value, want, 1e-6)


def test_quotient_rule():
    f = IvfHandle.from_expr("[t, t^2+1]", (0.0, 2.0))
    g = IvfHandle.from_expr("[2+t, 5+t+t^2]", (0.0, 2.0))  # radius >= 3/2, away from 1
    h = IvfHandle.from_function(lambda s: div(f(s), g(s)), f.domain)
    for t in np.linspace(0.2, 1.8, 9):
        gt = g(t)
        assert gt.log_radius > 0.4
        df, dg = derive(f, t).value, derive(g, t).value
        want = div(sub(mul(df, gt), mul(f(t), dg)), mul(gt, gt))
        assert _close(derive(h, t).value, want, 1e-6)


@pytest.mark.parametrize("g, dg", [
    (lambda x: x * x, lambda x: 2 * x),
    (math.sin, math.cos),
])
def test_chain_rule(g, dg):
    f = IvfHandle.from_expr("[t^2/2, 1 + t^2/2 + 2*sin(t)^2]", (-2.0, 2.0))
    h = IvfHandle.from_function(lambda s: f(g(s)), (-1.2, 1.2))
    for x in np.linspace(-1.0, 1.0, 9):
        want = scalar_mul(dg(x), derive(f, g(x)).value)
        assert _close(derive(h, x).value, want, 1e-6)


@settings(max_examples=30)
@given(ivfs)
def test_differentiable_implies_continuous(f):
    ok = all(derive(f, t).estimated_error < 1e-6 for t in np.linspace(-0.9, 0.9, 10))
    if ok:
        assert check_continuity(f)


@settings(max_examples=40)
@given(ivfs, points)
def test_new_and_gh_derivatives_exist_together(f, t):
    d = derive(f, t).value
    gh = gh_derive(f, t).value
    # both are built from f_c', f_w': gH endpoints are f_c' -/+ (w f_rho')
    w = math.exp(f.components(t)[1])
    dw = w * d.log_radius
    assert gh.lo == pytest.approx(min(d.center - dw, d.center + dw), abs=1e-6)
    assert gh.hi == pytest.approx(max(d.center - dw, d.center + dw), abs=1e-6)
