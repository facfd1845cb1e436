import math
from fractions import Fraction

import numpy as np
import pytest

from invlab import catalog as cat
from invlab import quadrature as quad
from invlab.fourier import (
    ParametricFamily,
    SphericalMeans,
    decompose_partial_sum,
    derive_constants,
    dirichlet_line_sum,
    l1_norm_by_means,
    partial_sum_1d,
    partial_sum_direct,
    partial_sum_radial,
    recover_leading_constant,
    riemann_lebesgue_uniform_check,
    tail_bound_check,
    uniform_inversion_experiment,
)
from invlab.functions import Majorant, TestFunction, gaussian, random_bump_polynomial


def zero_function(n):
    return TestFunction("zero", n, 1, lambda *y: 0.0 * y[0], k_max=6, majorant=Majorant("zero"), l1_norm=0.0)


def gaussian_partial_1d(x, R):
    # (1/2 pi) int_{-R}^{R} sqrt(pi) exp(-k^2/4) cos(k x) dk
    return quad.integrate_finite(lambda k: math.sqrt(math.pi) * np.exp(-k * k / 4) * np.cos(k * x), 0.0, R) / math.pi


@pytest.mark.parametrize(
    "n,expected",
    [
        (1, (2,)),
        (2, (1,)),
        (3, (2, 2)),
        (4, (1, Fraction(1, 2))),
        (5, (2, Fraction(10, 3), Fraction(2, 3))),
        (6, (1, Fraction(7, 8), Fraction(1, 8))),
        (7, (2, Fraction(22, 5), Fraction(8, 5), Fraction(2, 15))),
    ],
)
def test_constants(n, expected):
    plan = derive_constants(n)
    assert plan.constants == tuple(Fraction(c) for c in expected)
    assert plan.parity == ("odd" if n % 2 else "even")


def test_derive_constants_range():
    with pytest.raises(ValueError):
        derive_constants(10)


def test_gaussian_partial_sum_1d():
    F = gaussian(1)
    for x, R in ((0.0, 8.0), (0.7, 3.0), (-1.2, 5.5)):
        ref = gaussian_partial_1d(x, R)
        assert partial_sum_1d(F, [x], R)[0] == pytest.approx(ref, abs=1e-12)
        assert dirichlet_line_sum(F, [x], R)[0] == pytest.approx(ref, abs=1e-12)
        assert partial_sum_direct(F, [x], R)[0] == pytest.approx(ref, abs=1e-10)
    assert partial_sum_radial(F, [0.0], 8.0)[0] == pytest.approx(1.0, abs=1e-5)


def test_gaussian_partial_sum_3d_origin():
    assert partial_sum_radial(gaussian(3), np.zeros(3), 10.0)[0] == pytest.approx(1.0, abs=1e-4)


def test_zero_function():
    assert partial_sum_radial(zero_function(1), [0.3], 4.0)[0] == 0.0
    rows = tail_bound_check(zero_function(1), [[0.0]], [4.0, 8.0])
    assert all(r.sup_tail == 0 and r.ratio == 0 for r in rows)


def test_engines_agree(rng):
    for n in (1, 2, 3):
        F = gaussian(n)
        for _ in range(4):
            x = rng.uniform(-1, 1, n)
            R = float(rng.uniform(2, 32))
            radial = partial_sum_radial(F, x, R)[0]
            direct = partial_sum_direct(F, x, R)[0]
            assert radial == pytest.approx(direct, abs=1e-5)
            if n > 1:
                dec = decompose_partial_sum(F, x, R, derive_constants(n)).total[0]
                assert dec == pytest.approx(radial, abs=1e-5)


def test_decomposition_sums_to_radial_gaussian_3d():
    F = gaussian(3)
    plan = derive_constants(3)
    for R in (2.0, 8.0, 32.0):
        dec = decompose_partial_sum(F, np.zeros(3), R, plan)
        ref = partial_sum_radial(F, np.zeros(3), R)
        assert abs(dec.total[0] - ref[0]) < 1e-6


def test_decomposition_random_bump(rng):
    F = random_bump_polynomial(4, rng)
    x = np.array([0.1, -0.2, 0.05, 0.0])
    plan = derive_constants(4)
    dec = decompose_partial_sum(F, x, 8.0, plan)
    assert abs(dec.total[0] - partial_sum_radial(F, x, 8.0)[0]) < 1e-8


def test_pieces_vanish_as_R_grows():
    F = gaussian(3)
    plan = derive_constants(3)
    small = decompose_partial_sum(F, np.full(3, 0.2), 4.0, plan)
    large = decompose_partial_sum(F, np.full(3, 0.2), 32.0, plan)
    assert abs(large.II[0]) < abs(small.II[0])
    assert abs(large.III[0]) <= 1.0 / 32.0


@pytest.mark.parametrize("n,lead", [(2, 1.0), (3, 2.0)])
def test_leading_constant(n, lead):
    assert recover_leading_constant(gaussian(n), np.zeros(n), 8.0, derive_constants(n))[0] == pytest.approx(lead, abs=1e-3)


def test_decomposition_needs_derivatives():
    F = cat.holder_sqrt_sine()
    G = TestFunction("no_derivs", 3, 1, lambda a, b, c: np.exp(-a * a - b * b - c * c), majorant=Majorant("gaussian"))
    with pytest.raises(ValueError):
        decompose_partial_sum(G, np.zeros(3), 4.0, derive_constants(3))
    with pytest.raises(ValueError):
        decompose_partial_sum(F, np.zeros(1), 4.0, derive_constants(3))


def test_l1_norm_by_means():
    for n, x in ((1, [0.4]), (2, [0.3, -0.6]), (3, [0.5, 0.0, 0.2])):
        F = gaussian(n)
        assert l1_norm_by_means(F, x) == pytest.approx(math.pi ** (n / 2), rel=1e-8)


def test_spherical_means_table():
    F = gaussian(2)
    x = np.array([0.4, -0.1])
    means = SphericalMeans(F, x)
    table = means.tabulate(5.0, order=2)
    r = np.array([0.0, 0.3, 1.7, 4.2])
    np.testing.assert_allclose(table(r, 2), means(r, 2), atol=1e-11)


def test_gaussian_uniform_experiment():
    rep = uniform_inversion_experiment(gaussian(1), [(-1, 1)], [4, 8, 16], spacing=0.1)
    assert rep.verdict == "pass"
    assert rep.sup_errors[0] > rep.sup_errors[-1]
    assert rep.grid_points == 21


def test_step_function_gibbs_overshoot():
    F = cat.step_function()
    R = 64.0
    x = np.linspace(-1 + 0.5 * math.pi / R, -1 + 1.5 * math.pi / R, 41)
    peak = max(partial_sum_1d(F, [t], R)[0] for t in x)
    # Si(pi)/pi - 1/2
    assert peak - 1.0 == pytest.approx(0.0894898722360836, abs=2e-3)


def test_step_function_contrast_and_locality():
    F = cat.step_function()
    jump = uniform_inversion_experiment(F, [(-2, 2)], [16, 64, 256], spacing=0.05)
    assert min(jump.sup_errors) >= 0.05
    local = uniform_inversion_experiment(F, [(0.5, 0.9)], [64, 256, 1024], spacing=0.05)
    assert local.sup_errors[-1] < local.sup_errors[0]


def test_riemann_lebesgue_gaussian_family():
    fam = ParametricFamily(lambda t, s: np.exp(-s * s), np.array([0.0]), lambda t: (-9.0, 9.0))
    rows = riemann_lebesgue_uniform_check(fam, [4.0, 16.0, 64.0])
    assert all(r.holds for r in rows)
    assert rows[-1].sup_integral < 1e-10 and rows[-1].translation_modulus < rows[0].translation_modulus


def test_riemann_lebesgue_indicator_family():
    fam = ParametricFamily(
        lambda t, s: ((s >= t) & (s <= t + 1)).astype(float),
        np.linspace(0, 1, 5),
        lambda t: (t, t + 1),
        lambda t: [t, t + 1],
    )
    for R, row in zip((8.0, 32.0), riemann_lebesgue_uniform_check(fam, [8.0, 32.0])):
        assert row.translation_modulus == pytest.approx(2 * math.pi / R, rel=1e-9)
        assert row.holds


def test_riemann_lebesgue_zero_family():
    fam = ParametricFamily(lambda t, s: 0.0 * s, np.array([0.0, 1.0]), lambda t: (0.0, 1.0))
    rows = riemann_lebesgue_uniform_check(fam, [4.0])
    assert rows[0].sup_integral == 0 and rows[0].translation_modulus == 0
