import math

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from invlab import quadrature as quad
from invlab.special import (
    CutoffFamily,
    KernelSpec,
    bessel_j,
    dirichlet_1d,
    dirichlet_2d,
    dirichlet_nd,
    kernel_profile,
    kernel_terms,
    sphere_area,
    verify_kernel_bound,
)

# J0, J1 at 30 digits (mpmath), rounded to double
BESSEL_TABLE = [
    (0.5, 0.9384698072408129, 0.24226845767487389),
    (3.0, -0.26005195490193344, 0.33905895852593646),
    (7.9, 0.19436184484127824, 0.2191793999217512),
    (8.1, 0.14751745404437767, 0.24760776698159288),
    (12.0, 0.047689310796833537, -0.22344710449062761),
    (24.9, 0.08324596835301549, -0.13485569953140887),
    (25.1, 0.10827567149994945, -0.11463478413442257),
    (40.0, 0.0073668905842372896, 0.126038318037585),
    (100.0, 0.019985850304223122, -0.077145352014112158),
]


@pytest.mark.parametrize("x,j0,j1", BESSEL_TABLE)
def test_bessel_table(x, j0, j1):
    assert abs(bessel_j(0, x) - j0) < 2e-14
    assert abs(bessel_j(1, x) - j1) < 2e-14


def test_bessel_special_values():
    assert bessel_j(0, 0.0) == 1.0
    assert bessel_j(1, 0.0) == 0.0
    assert abs(bessel_j(0, 2.404825557695773)) < 1e-14


@given(st.floats(0.0, 60.0))
def test_bessel_against_mpmath(x):
    assert abs(bessel_j(0, x) - float(mpmath.besselj(0, x))) < 5e-14
    assert abs(bessel_j(1, x) - float(mpmath.besselj(1, x))) < 5e-14


def test_bessel_regime_switches_are_continuous():
    for edge in (8.0, 25.0):
        lo, hi = np.nextafter(edge, 0), np.nextafter(edge, 100)
        for order in (0, 1):
            assert abs(bessel_j(order, lo) - bessel_j(order, hi)) < 1e-13


def test_dirichlet_1d_values():
    assert abs(dirichlet_1d(1.0, math.pi)) < 1e-16
    assert dirichlet_1d(math.pi, 0.0) == pytest.approx(1.0, rel=1e-15)
    assert dirichlet_1d(10.0, 0.1) == pytest.approx(2.678485334011638, rel=1e-14)


def test_dirichlet_2d_values():
    assert dirichlet_2d(1.0, 0.0) == pytest.approx(1 / (4 * math.pi), rel=1e-15)
    assert dirichlet_2d(1.0, 1e-9) == pytest.approx(1 / (4 * math.pi), rel=1e-12)
    assert abs(dirichlet_2d(1.0, 3.8317059702075125)) < 1e-15


def test_dirichlet_2d_matches_disc_integral():
    ones = lambda k: np.ones(k.shape[:-1] + (1,))
    disc = quad.ball_integral(ones, [0.5, 0.0], 2.0)[0]
    assert abs(disc - dirichlet_2d(2.0, 0.5)) < 1e-6


def test_dirichlet_3d_closed_form():
    R, r = 3.0, np.linspace(0.05, 4, 50)
    ref = (np.sin(R * r) - R * r * np.cos(R * r)) / (2 * math.pi ** 2 * r ** 3)
    np.testing.assert_allclose(dirichlet_nd(KernelSpec(3, R), r), ref, rtol=1e-11)
    assert dirichlet_nd(KernelSpec(3, 1.0), math.pi) == pytest.approx(1 / (2 * math.pi ** 4), rel=1e-13)


def test_dirichlet_3d_matches_ball_integral():
    ones = lambda k: np.ones(k.shape[:-1] + (1,))
    val = quad.ball_integral(ones, [0.3, 0.4, 0.0], 4.0)[0]
    assert val == pytest.approx(dirichlet_nd(KernelSpec(3, 4.0), 0.5), abs=1e-9)


def test_dirichlet_5d_value():
    # radial reduction of the 5-D ball integral, 30-digit quadrature
    assert dirichlet_nd(KernelSpec(5, 1.0), 2.0) == pytest.approx(0.0004000156788883988, abs=1e-5 * 0.0004)


@pytest.mark.parametrize("n", range(3, 10))
def test_kernel_profile_matches_bessel_definition(n):
    u = np.concatenate([np.geomspace(1e-4, 1, 7), np.linspace(1.5, 60, 12)])
    with mpmath.workdps(40):
        ref = [float((2 * mpmath.pi) ** (-mpmath.mpf(n) / 2) * mpmath.besselj(mpmath.mpf(n) / 2, x) / mpmath.mpf(x) ** (mpmath.mpf(n) / 2)) for x in u]
    np.testing.assert_allclose(kernel_profile(n, u), ref, rtol=1e-10)


def test_kernel_terms_n3():
    basis, terms, pref = kernel_terms(3)
    assert basis == ("sin", "cos")
    assert terms == {("cos", 2): -1, ("sin", 3): 1}
    assert pref == pytest.approx(1 / (2 * math.pi ** 2))


def test_kernel_spec_validation():
    with pytest.raises(ValueError):
        KernelSpec(0, 2.0)
    with pytest.raises(ValueError):
        KernelSpec(3, 0.5)
    with pytest.raises(ValueError):
        dirichlet_nd(KernelSpec(10, 2.0), 1.0)
    with pytest.raises(ValueError):
        dirichlet_nd(KernelSpec(3, 2.0), 0.0)


def test_sphere_area():
    assert sphere_area(1) == pytest.approx(2.0)
    assert sphere_area(2) == pytest.approx(2 * math.pi)
    assert sphere_area(3) == pytest.approx(4 * math.pi)


def test_sine_integral_normalization():
    # int_{-d}^{d} sin(R s)/(pi s) ds -> 1
    for R, tol in ((100.0, 2e-2), (1000.0, 2e-3)):
        val = 2 * quad.integrate_oscillatory(lambda s: 1 / (math.pi * s), R, 0.0, 1.0)
        assert abs(val - 1) < tol


def test_cutoff_profile():
    eta = CutoffFamily()
    R = 4.0
    r = np.linspace(0.01, 7, 400)
    v = eta.evaluate(R, r)
    assert np.all((v >= 0) & (v <= 1))
    assert np.all(v[r <= R] == 1) and np.all(v[r >= R + 1] == 0)
    for j in range(1, eta.smoothness_order + 1):
        d = eta.derivative(j, R, np.array([R + 1 - 1e-3, R + 1, R + 1e-3]))
        assert abs(d[1]) == 0
        assert np.all(np.isfinite(d))


def test_cutoff_derivative_against_mpmath():
    psi = lambda t: mpmath.exp(-1 / t) if t > 0 else mpmath.mpf(0)
    R = 2.0
    eta = lambda r: psi(R + 1 - r) / (psi(R + 1 - r) + psi(r - R))
    fam = CutoffFamily()
    with mpmath.workdps(30):
        for j in (1, 2, 3):
            ref = float(mpmath.diff(eta, mpmath.mpf("2.4"), j))
            assert fam.derivative(j, R, np.array([2.4]))[0] == pytest.approx(ref, rel=1e-9)


def test_cutoff_order_limit():
    with pytest.raises(ValueError):
        CutoffFamily(smoothness_order=2).derivative(3, 1.0, np.array([1.5]))


def test_kernel_bound_fit():
    fit = verify_kernel_bound(KernelSpec(1, 1.0), np.linspace(0.1, 5, 200))
    assert math.isfinite(fit.fitted_C) and fit.spread < 2
    assert fit.fitted_C <= 2 / math.pi * (1 + 1 / 0.1) + 1e-12
    fit2 = verify_kernel_bound(KernelSpec(2, 1.0), np.linspace(0.5, 5, 200))
    assert math.isfinite(fit2.fitted_C)
    with pytest.raises(ValueError):
        verify_kernel_bound(KernelSpec(3, 1.0), [])
