import math

import mpmath
import numpy as np
from hypothesis import given
from hypothesis import strategies as st

from invlab import jets
from invlab.jets import Jet


def _derivs(f, s0, order):
    x = Jet.variable(np.array([s0]), np.array([1.0]), order)
    return f(x).derivatives()[:, 0]


def test_composite_matches_mpmath_derivatives():
    f = lambda x: np.exp(-x * x) * np.sin(3 * x) / (2 + np.cos(x))
    g = lambda x: mpmath.exp(-x * x) * mpmath.sin(3 * x) / (2 + mpmath.cos(x))
    got = _derivs(f, 0.7, 6)
    with mpmath.workdps(30):
        ref = [float(mpmath.diff(g, mpmath.mpf("0.7"), k)) for k in range(7)]
    np.testing.assert_allclose(got, ref, rtol=1e-11, atol=1e-11)


def test_sqrt_log_power():
    f = lambda x: np.sqrt(1 + x * x) + np.log(2 + x) + (1.5 + x) ** 2.5
    g = lambda x: mpmath.sqrt(1 + x * x) + mpmath.log(2 + x) + (1.5 + x) ** 2.5
    got = _derivs(f, 0.3, 5)
    with mpmath.workdps(30):
        ref = [float(mpmath.diff(g, mpmath.mpf("0.3"), k)) for k in range(6)]
    np.testing.assert_allclose(got, ref, rtol=1e-11, atol=1e-11)


def test_plain_arrays_pass_through():
    x = np.linspace(0, 1, 5)
    assert np.allclose(jets.value_of(np.exp(x)), np.exp(x))


def test_where_broadcasts_constant_branch():
    x = Jet.variable(np.linspace(-1, 1, 9), np.ones(9), 3)
    y = jets.where(x.value > 0, x * x, 0.0)
    assert y.c.shape == (4, 9)
    assert np.all(y.value[x.value <= 0] == 0)


@given(st.floats(-2, 2), st.floats(-2, 2))
def test_product_rule(a, b):
    x = Jet.variable(np.array([a]), np.array([1.0]), 1)
    f = np.sin(x) * np.exp(b * x)
    expected = math.cos(a) * math.exp(b * a) + math.sin(a) * b * math.exp(b * a)
    assert math.isclose(f.derivatives()[1, 0], expected, rel_tol=1e-12, abs_tol=1e-12)


@given(st.floats(0.1, 5.0))
def test_exp_log_roundtrip(a):
    x = Jet.variable(np.array([a]), np.array([1.0]), 5)
    y = np.exp(np.log(x))
    np.testing.assert_allclose(y.c[:, 0], x.c[:, 0], atol=1e-12)
