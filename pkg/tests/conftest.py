import math

import pytest
from hypothesis import settings, strategies as st

from intervalkit import core

settings.register_profile("default", max_examples=200, deadline=None)
settings.load_profile("default")


def dyadic(lo=-8.0, hi=8.0, bits=6):
    """Reals with few fractional bits, so add/sub/mul are exact in floats."""
    scale = 2 ** bits
    return st.integers(int(lo * scale), int(hi * scale)).map(lambda k: k / scale)


def intervals(lo=-8.0, hi=8.0):
    return st.builds(core.Interval, dyadic(lo, hi), dyadic(-3.0, 3.0))


def real_intervals():
    """Intervals with general float components."""
    comp = st.floats(-50, 50, allow_nan=False, allow_infinity=False)
    return st.builds(core.Interval, comp, st.floats(-5, 5, allow_nan=False))


def close_iv(a, b, tol=1e-12):
    scale = max(1.0, abs(a.center), abs(b.center), abs(a.log_radius), abs(b.log_radius))
    return (abs(a.center - b.center) <= tol * scale
            and abs(a.log_radius - b.log_radius) <= tol * scale)


def ends_close(v, lo, hi, tol=1e-12):
    if isinstance(v, core.Interval):
        l, r = v.to_endpoints()
    else:
        l, r = v.lo, v.hi
    return math.isclose(l, lo, abs_tol=tol, rel_tol=tol) and \
        math.isclose(r, hi, abs_tol=tol, rel_tol=tol)


@pytest.fixture
def E():
    return math.e
