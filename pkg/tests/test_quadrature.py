import itertools
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from invlab import quadrature as quad
from invlab.functions import gaussian
from invlab.quadrature import QuadratureBudgetError, QuadratureConfig


def test_integrate_finite_basics():
    assert quad.integrate_finite(lambda s: np.ones_like(s), 0.0, 1.0) == pytest.approx(1.0, abs=1e-14)
    assert quad.integrate_finite(np.sin, 0.0, math.pi) == pytest.approx(2.0, abs=1e-13)


def test_integrate_finite_vector_valued():
    val = quad.integrate_finite(lambda s: np.stack([s, s * s], axis=1), 0.0, 2.0)
    np.testing.assert_allclose(val, [2.0, 8.0 / 3.0], atol=1e-13)


def test_sine_integral_value():
    # Si(100) from the 30-digit series/asymptotic oracle
    val = quad.integrate_finite(lambda s: np.sin(100 * s) / s, 0.0, 1.0)
    assert val == pytest.approx(1.5622254668890563, abs=1e-12)


def test_oscillatory_elementary():
    R = 7.0
    assert quad.integrate_oscillatory(lambda s: np.ones_like(s), R, 0.0, math.pi / R) == pytest.approx(2 / R, abs=1e-14)


def test_oscillatory_semi_infinite_exponential():
    for R in (1.0, 10.0, 100.0):
        val = quad.integrate_oscillatory(lambda s: np.exp(-s), R, 0.0, math.inf, tail=lambda T: math.exp(-T))
        assert val == pytest.approx(R / (1 + R * R), abs=1e-10)


def test_oscillatory_needs_tail_for_infinite_range():
    with pytest.raises(ValueError):
        quad.integrate_oscillatory(lambda s: np.exp(-s), 2.0, 0.0, math.inf)


@pytest.mark.parametrize("R", [1e2, 1e3, 1e4])
def test_sine_integral_limit(R):
    val = quad.integrate_oscillatory(lambda s: 1.0 / s, R, 0.0, 1.0)
    assert abs(val - math.pi / 2) <= 2.0 / R


@given(st.floats(1.0, 100.0), st.floats(0.2, 3.0))
def test_oscillation_aware_matches_plain(R, b):
    g = lambda s: np.exp(-s) * (1 + s * s)
    aware = quad.integrate_oscillatory(g, R, 0.0, b)
    plain = quad.integrate_oscillatory(g, R, 0.0, b, cfg=QuadratureConfig(oscillation_aware=False))
    assert abs(aware - plain) < 1e-8


def test_budget_error_carries_estimate():
    cfg = QuadratureConfig(abs_tol=1e-15, rel_tol=1e-15, max_panels=20)
    with pytest.raises(QuadratureBudgetError) as info:
        quad.integrate_finite(lambda s: np.sqrt(np.abs(s - 0.3)), 0.0, 1.0, cfg)
    assert np.isfinite(info.value.estimate).all() and info.value.error > 0


def test_config_validation():
    with pytest.raises(ValueError):
        QuadratureConfig(abs_tol=0.0)
    with pytest.raises(ValueError):
        QuadratureConfig(max_panels=0)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_sphere_rule_measure(n):
    rule = quad.sphere_rule(n, 10)
    assert rule.weights.sum() == pytest.approx(quad.sphere_measure(n), rel=1e-12)
    np.testing.assert_allclose(np.linalg.norm(rule.nodes, axis=1), 1.0, atol=1e-14)


@pytest.mark.parametrize("n,degree", [(2, 8), (3, 8), (4, 6)])
def test_sphere_rule_monomial_exactness(n, degree):
    rule = quad.sphere_rule(n, degree)
    for alpha in itertools.product(range(degree + 1), repeat=n):
        if sum(alpha) > degree:
            continue
        got = float(np.prod(rule.nodes ** np.array(alpha), axis=1) @ rule.weights)
        assert got == pytest.approx(quad.sphere_monomial_integral(alpha), abs=1e-12)


def test_sphere_mean_one_dimension():
    F = gaussian(1)
    rule = quad.sphere_rule(1, 1)
    x, r = 0.3, np.array([0.2, 1.1])
    got = quad.sphere_mean(F, np.array([x]), r, rule)[:, 0]
    ref = 0.5 * (np.exp(-(x + r) ** 2) + np.exp(-(x - r) ** 2))
    np.testing.assert_allclose(got, ref, rtol=1e-15)


def test_sphere_mean_radial_at_origin():
    F = gaussian(3)
    rule = quad.sphere_rule(3, 20)
    r = np.linspace(0, 3, 7)
    np.testing.assert_allclose(quad.sphere_mean(F, np.zeros(3), r, rule)[:, 0], np.exp(-r * r), rtol=1e-14)
    d = quad.sphere_mean_derivative(F, np.zeros(3), r, 1, rule)
    np.testing.assert_allclose(d[1, :, 0], -2 * r * np.exp(-r * r), atol=1e-14)


def test_sphere_mean_of_linear_function_has_zero_slope():
    from invlab.functions import TestFunction

    F = TestFunction("linear", 3, 1, lambda a, b, c: 2 * a - b + 0.5 * c, k_max=4)
    rule = quad.sphere_rule(3, 10)
    d = quad.sphere_mean_derivative(F, np.array([0.4, -1.0, 2.0]), np.array([0.5, 1.5]), 1, rule)
    np.testing.assert_allclose(d[1], 0.0, atol=1e-13)


def test_ball_integral_gaussian():
    F = gaussian(1)
    assert quad.ball_integral(F.transform, [0.0], 8.0)[0] == pytest.approx(1.0, abs=1e-6)
    zero = quad.ball_integral(lambda k: np.zeros(k.shape[:-1] + (1,)), [0.5, 0.2], 3.0)
    assert np.all(zero == 0)


def test_ball_integral_radial_reduction():
    # radial Fhat: (2 pi)^-3 4 pi int_0^R rho^2 sinc(rho |x|) Fhat(rho) d rho
    F = gaussian(3)
    x = np.array([0.3, -0.2, 0.5])
    xn = np.linalg.norm(x)
    R = 5.0
    ref = quad.integrate_finite(
        lambda p: (4 * math.pi * p * p * np.sinc(p * xn / math.pi) * math.pi ** 1.5 * np.exp(-p * p / 4)) / (2 * math.pi) ** 3,
        0.0,
        R,
    )
    assert quad.ball_integral(F.transform, x, R)[0] == pytest.approx(ref, abs=1e-8)


def test_filon_panels_transform():
    edges = np.linspace(0, 40, 81)
    panels = quad.legendre_panels(lambda s: np.exp(-s)[:, None], edges)
    k = np.array([-30.0, -1.0, 0.0, 2.5, 100.0])
    np.testing.assert_allclose(panels.fourier(k)[:, 0], 1 / (1 + 1j * k), atol=1e-13)
    np.testing.assert_allclose(panels(np.array([0.5, 3.0]))[:, 0], np.exp(-np.array([0.5, 3.0])), rtol=1e-13)
