import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from intervalkit.calculus import IvfHandle, derive, gh_derive
from intervalkit.core import ZERO, Interval, add, cmp_total, OrderRelation, gh_sub, mul
from intervalkit.errors import MaxDepthExceeded, NonFinite, NonPositiveIntegrand
from intervalkit.quadrature import (adaptive_simpson, by_parts_sides, endpoint_integral,
                                    ftc_sides, ir_integral, mult_integral, verify_by_parts,
                                    verify_ftc)

from conftest import close_iv, ends_close

F = IvfHandle.from_expr("[t, t^2+1]", (-0.5, 1.5))


def test_adaptive_simpson_polynomial_and_oscillatory():
    v, err, calls = adaptive_simpson(lambda t: t ** 3, 0.0, 2.0, 1e-12)
    assert v == pytest.approx(4.0, abs=1e-12)
    assert err >= 0 and calls >= 17
    v, _, _ = adaptive_simpson(math.sin, 0.0, math.pi, 1e-10)
    assert v == pytest.approx(2.0, abs=1e-10)


def test_adaptive_simpson_depth_cap():
    with pytest.raises(MaxDepthExceeded):
        adaptive_simpson(lambda t: 1.0 if t > 1 / 3 else 0.0, 0.0, 1.0, 1e-300, max_depth=12)


def test_ir_integral_examples():
    # F' in center/log-radius form, written directly
    Fp = IvfHandle.from_components(lambda t: t + 0.5,
                                   lambda t: (2 * t - 1) / (t * t - t + 1), (0.0, 1.0))
    r = ir_integral(Fp, 0.0, 1.0, 1e-12)
    assert ends_close(r.value, 0.0, 2.0, tol=1e-10)
    assert r.estimated_error < 1e-10 and r.evaluations >= 17
    z = IvfHandle.from_expr("[-1,1]", (2.0, 5.0))
    assert close_iv(ir_integral(z, 2.0, 5.0).value, ZERO, tol=1e-15)


def test_ir_integral_real_factor_closed_form():
    f = IvfHandle.from_expr("[t^2, 2*t+1]*(-1)", (0.0, 1.0))
    r = ir_integral(f, 0.0, 1.0, 1e-12).value
    rho = 2 + math.log(2) - 2 * math.sqrt(2) * math.atanh(math.sqrt(2) / 2)
    assert r.center == pytest.approx(-7 / 6, abs=1e-11)
    assert r.log_radius == pytest.approx(rho, abs=1e-11)


def test_ir_integral_range_checks():
    with pytest.raises(ValueError):
        ir_integral(F, 1.0, 0.0)
    with pytest.raises(ValueError):
        ir_integral(F, 0.0, 2.0)


def test_ir_integral_nonfinite_integrand():
    f = IvfHandle.from_components(lambda t: 1 / (t - 0.5) if t != 0.5 else math.inf,
                                  lambda t: 0.0, (0.0, 1.0))
    with pytest.raises(NonFinite):
        ir_integral(f, 0.0, 1.0)


def test_mult_integral_examples():
    assert mult_integral(lambda t: 1.0, 0.0, 3.0) == 1.0
    assert mult_integral(lambda t: math.e, 0.0, 1.0) == pytest.approx(math.e, rel=1e-14)
    g = lambda t: (t * t - t + 1) / 2  # noqa: E731
    ts = np.linspace(0.0, 1.0, 200_001)
    ys = np.log(g(ts))
    oracle = math.exp(float(np.sum((ys[1:] + ys[:-1]) * np.diff(ts)) / 2))
    assert mult_integral(g, 0.0, 1.0, 1e-12) == pytest.approx(oracle, rel=1e-10)
    with pytest.raises(NonPositiveIntegrand):
        mult_integral(lambda t: t - 0.5, 0.0, 1.0)


def test_ftc_examples():
    assert verify_ftc(F, 0.0, 1.0, tol=1e-8)
    s = ftc_sides(F, 0.0, 1.0)
    assert ends_close(s.lhs, 0.0, 2.0, tol=1e-12)
    assert close_iv(s.rhs, Interval(1.0, 0.0), tol=1e-8)
    const = IvfHandle.from_expr("[3,7]", (-1.0, 2.0))
    s = ftc_sides(const, 0.0, 1.0)
    assert close_iv(s.lhs, ZERO) and close_iv(s.rhs, ZERO, tol=1e-12)


def test_gh_fundamental_theorem_fails_for_the_same_function():
    gh = endpoint_integral(lambda t: gh_derive(F, t).value, 0.0, 1.0)
    assert ends_close(gh, 0.75, 1.25, tol=1e-8)
    d = gh_sub(F(1.0), F(0.0))
    assert ends_close(d, 1.0, 1.0, tol=1e-12)


def test_by_parts_examples():
    Fp = IvfHandle.from_expr("[t^2, 2*t+1]", (-0.3, 1.5))
    G = IvfHandle.from_expr("[t, t^2+1]", (-0.3, 1.5))
    s = by_parts_sides(Fp, G, 0.0, 1.0)
    for v in (s.lhs, s.rhs):
        assert v.center == pytest.approx(11 / 4, abs=1e-8)
        assert v.radius == pytest.approx(2 ** -math.log(2), abs=1e-8)
    assert verify_by_parts(Fp, G, 0.0, 1.0)
    s2 = by_parts_sides(Fp, lambda t: 2 - t, 0.0, 1.0)
    for v in (s2.lhs, s2.rhs):
        assert close_iv(v, Interval(1.0, math.log(4)), tol=1e-8)
    c = IvfHandle.from_expr("[1,4]", (-1.0, 2.0))
    assert verify_by_parts(c, c, 0.0, 1.0)
    with pytest.raises(TypeError):
        by_parts_sides(Fp, 3.0, 0.0, 1.0)


# --- integral laws on random smooth IVFs ------------------------------------------------

coef = st.floats(-2, 2, allow_nan=False)


def _ivf(p, q):
    return IvfHandle.from_components(
        lambda t: p[0] + p[1] * t + p[2] * math.sin(3 * t),
        lambda t: q[0] + q[1] * t * t, (0.0, 1.0))


ivfs = st.builds(_ivf, st.tuples(coef, coef, coef), st.tuples(coef, coef))
ivals = st.builds(Interval, st.floats(-3, 3), st.floats(-2, 2))
TOL = 1e-10


@settings(max_examples=40)
@given(ivfs, ivfs, ivals, ivals)
def test_linearity(f, g, l1, l2):
    h = IvfHandle.from_function(lambda t: add(mul(l1, f(t)), mul(l2, g(t))), (0.0, 1.0))
    lhs = ir_integral(h, 0.0, 1.0, TOL).value
    rhs = add(mul(l1, ir_integral(f, 0.0, 1.0, TOL).value),
              mul(l2, ir_integral(g, 0.0, 1.0, TOL).value))
    assert close_iv(lhs, rhs, tol=1e-8)


@settings(max_examples=40)
@given(ivfs, st.floats(0.05, 0.95))
def test_additivity(f, c):
    whole = ir_integral(f, 0.0, 1.0, TOL)
    parts = add(ir_integral(f, 0.0, c, TOL).value, ir_integral(f, c, 1.0, TOL).value)
    assert abs(whole.value.center - parts.center) <= 2 * TOL + 1e-13
    assert abs(whole.value.log_radius - parts.log_radius) <= 2 * TOL + 1e-13


@settings(max_examples=40)
@given(ivfs, coef, coef, st.floats(0, 1))
def test_monotonicity(f, s0, s1, dr):
    # g's center is never below f's; ties are broken by a wider radius
    g = IvfHandle.from_components(
        lambda t: f.components(t)[0] + (s0 + s1 * t) ** 2,
        lambda t: f.components(t)[1] + dr, (0.0, 1.0))
    for t in np.linspace(0, 1, 11):
        assert cmp_total(f(t), g(t)) in (OrderRelation.LESS, OrderRelation.EQUAL)
    i_f = ir_integral(f, 0.0, 1.0, TOL).value
    i_g = ir_integral(g, 0.0, 1.0, TOL).value
    if abs(i_f.center - i_g.center) > 1e-8:
        assert i_f.center < i_g.center
    else:
        assert i_f.log_radius <= i_g.log_radius + 1e-8


@settings(max_examples=30)
@given(ivfs, ivfs)
def test_products_are_integrable(f, g):
    h = IvfHandle.from_function(lambda t: mul(f(t), g(t)), (0.0, 1.0))
    r = ir_integral(h, 0.0, 1.0, TOL)
    assert math.isfinite(r.estimated_error)


@settings(max_examples=10)
@given(ivfs)
def test_derivative_of_running_integral(f):
    phi = IvfHandle.from_function(lambda t: ir_integral(f, 0.0, t, 1e-13).value, (0.1, 1.0))
    for t in (0.3, 0.55, 0.8):
        assert close_iv(derive(phi, t).value, f(t), tol=1e-6)
