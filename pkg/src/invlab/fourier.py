"""Fourier inversion partial sums S_R(F)(x) and their decomposition.

S_R(F)(x) = (2 pi)^-n int_{|k|<=R} exp(i x.k) Fhat(k) dk
          = omega_{n-1} int_0^oo r^{n-1} D_n^R(r) Fbar_x(r) dr,

where Fbar_x(r) is the mean of F over the sphere of radius r about x.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from . import quadrature as quad
from .quadrature import QuadratureConfig
from .reports import build_report, uniform_grid
from .special import (
    MAX_DIMENSION,
    CutoffFamily,
    bessel_j,
    kernel_profile,
    radial_weight,
)

DEFAULT_CFG = QuadratureConfig(abs_tol=1e-12, rel_tol=1e-12)


# ---------------------------------------------------------------------------
# Spherical means as functions of r
# ---------------------------------------------------------------------------


def default_sphere_degree(n):
    # product rules grow like degree^(n-1); keep n >= 4 at desk scale
    return {1: 1, 2: 60, 3: 40, 4: 20, 5: 12}.get(n, 8)


class SphericalMeans:
    """r -> (d/dr)^j Fbar_x(r), j = 0..order, evaluated with a sphere rule."""

    def __init__(self, F, x, degree=None, rule=None):
        self.F = F
        self.x = np.asarray(x, dtype=float).reshape(-1)
        if self.x.size != F.n:
            raise ValueError(f"point has dimension {self.x.size}, function has {F.n}")
        if rule is None:
            rule = quad.sphere_rule(F.n, default_sphere_degree(F.n) if degree is None else degree)
        if rule.n != F.n:
            raise ValueError("sphere rule dimension does not match the function")
        self.rule = rule
        self.n = F.n
        self.d = F.d

    def __call__(self, r, order=0):
        r = np.asarray(r, dtype=float).reshape(-1)
        if order == 0:
            return quad.sphere_mean(self.F, self.x, r, self.rule)[None]
        return quad.sphere_mean_derivative(self.F, self.x, r, order, self.rule)

    def tabulate(self, T, order=0, cfg=DEFAULT_CFG, breakpoints=()):
        """Piecewise Legendre tables of Fbar and its first ``order`` derivatives on [0, T]."""
        edges = quad.graded_edges(0.0, T, breakpoints, ratio=0.25, finest=1e-10, width=0.25)
        base = np.linspace(0.0, T, 9)
        edges = np.unique(np.concatenate([edges, base]))

        def table(r):
            vals = self(r, order)  # (order+1, m, d)
            return np.moveaxis(vals, 1, 0).reshape(r.size, -1)

        panels = quad.legendre_panels(table, edges, cfg)
        return TabulatedMeans(panels, order, self.d, T)


@dataclass
class TabulatedMeans:
    panels: quad.LegendrePanels
    order: int
    d: int
    T: float

    def __call__(self, r, order=0):
        if order > self.order:
            raise ValueError(f"tabulated up to derivative order {self.order}, asked for {order}")
        r = np.asarray(r, dtype=float).reshape(-1)
        vals = self.panels(r).reshape(r.size, self.order + 1, self.d)
        vals = np.moveaxis(vals, 1, 0)[: order + 1]
        # outside the tabulated range the mean is treated as zero (beyond the tail cutoff)
        return np.where((r <= self.T)[None, :, None], vals, 0.0)

    @property
    def breakpoints(self):
        """Table panel edges; integrating across them would see the tiny jumps between pieces."""
        p = self.panels
        return tuple(np.concatenate([p.centers - p.halfwidths, [self.T]]).tolist())


def _mean_breaks(means):
    return getattr(means, "breakpoints", ())


# ---------------------------------------------------------------------------
# Tail control
# ---------------------------------------------------------------------------


@lru_cache(maxsize=None)
def kernel_envelope_constant(n):
    """c with |d_n(u)| <= c u^-(n+1)/2 for u >= 1 (measured with 5% margin)."""
    u = np.concatenate([np.linspace(1.0, 50.0, 20001), np.geomspace(50.0, 1e5, 20001)])
    return 1.05 * float(np.max(np.abs(kernel_profile(n, u)) * u ** ((n + 1) / 2)))


def tail_cutoff(F, x, R, eps=1e-13):
    """Radius T with omega int_T^oo r^{n-1} |D_n^R(r)| |Fbar_x(r)| dr <= eps.

    Uses the declared majorant: the integral is at most
    sup_{r >= T}|D_n^R(r)| * int_{|y - x| >= T} ||F(y)|| dy.
    """
    if F.majorant is None:
        raise ValueError(f"{F.name}: a majorant is needed to control the integration tail")
    xn = float(np.linalg.norm(np.asarray(x, float)))
    support = F.majorant.support_radius()
    if math.isfinite(support):
        return xn + support
    n = F.n
    c = kernel_envelope_constant(n)

    def bound(T):
        if T * R < 1.0:
            return math.inf
        kern = c * R ** n * (R * T) ** (-(n + 1) / 2)
        return kern * F.majorant.tail_mass(n, T - xn)

    return quad.semi_infinite_cutoff(bound, eps, start=max(xn + 1.0, 1.0))


# ---------------------------------------------------------------------------
# Partial sums
# ---------------------------------------------------------------------------


def _line_breaks(F, x):
    return [abs(b - x) for b in F.breakpoints]


def partial_sum_1d(F, x, R, cfg=DEFAULT_CFG, T=None):
    """(1/pi) int_0^T sin(R r)/r (F(x+r) + F(x-r)) dr, the n = 1 radial form."""
    x = float(np.asarray(x).reshape(-1)[0])
    T = tail_cutoff(F, [x], R) if T is None else T

    def integrand(r):
        ker = (R / math.pi) * np.sinc(R * r / math.pi)
        return ker[:, None] * (F.scalar_line(x + r) + F.scalar_line(x - r))

    edges = quad.oscillation_edges(R, 0.0, T, _line_breaks(F, x))
    return quad.integrate_panels(integrand, edges, cfg)[0]


def dirichlet_line_sum(F, x, R, cfg=DEFAULT_CFG, T=None):
    """(1/pi) int sin(R(y - x))/(y - x) F(y) dy over the line, integrated in y."""
    x = float(np.asarray(x).reshape(-1)[0])
    T = tail_cutoff(F, [x], R) if T is None else T

    def integrand(y):
        ker = (R / math.pi) * np.sinc(R * (y - x) / math.pi)
        return ker[:, None] * F.scalar_line(y)

    lo, hi = x - T, x + T
    zeros_right = quad.oscillation_edges(R, 0.0, T)
    edges = np.unique(np.concatenate([x - zeros_right, x + zeros_right, [b for b in F.breakpoints if lo < b < hi]]))
    return quad.integrate_panels(integrand, edges, cfg)[0]


def partial_sum_radial(F, x, R, rule=None, cfg=DEFAULT_CFG, means=None, T=None):
    """S_R(F)(x) = omega_{n-1} int_0^T r^{n-1} D_n^R(r) Fbar_x(r) dr with analytic tail control."""
    if R < 1:
        raise ValueError("R must be >= 1")
    if F.majorant is None and T is None:
        raise ValueError(f"{F.name}: a majorant is needed to control the integration tail")
    x = np.asarray(x, dtype=float).reshape(-1)
    n = F.n
    if n == 1 and means is None and rule is None:
        return partial_sum_1d(F, x, R, cfg, T)
    if n > MAX_DIMENSION:
        raise ValueError(f"dimension {n} exceeds {MAX_DIMENSION}")
    T = tail_cutoff(F, x, R) if T is None else T
    if means is None:
        means = SphericalMeans(F, x, rule=rule)

    def integrand(r):
        return radial_weight(n, R, r)[:, None] * means(r, 0)[0]

    extra = list(_line_breaks(F, x[0])) if n == 1 else []
    edges = quad.oscillation_edges(R, 0.0, T, extra + list(_mean_breaks(means)))
    return quad.integrate_panels(integrand, edges, cfg)[0]


def partial_sum_direct(F, x, R, cfg=DEFAULT_CFG, degree=None):
    """S_R(F)(x) from the closed-form transform by ball quadrature (n <= 3)."""
    return quad.ball_integral(F.transform, x, R, cfg, degree=degree)


# ---------------------------------------------------------------------------
# Decomposition S_R = I + II + III
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DecompositionPlan:
    """Constants C_j with omega int D_n A r^{n-1} = sum_j C_j int K_R(r) r^j A^(j)(r) dr.

    The base kernel K_R is sin(R r)/(pi r) for odd n and R J1(R r) for even n;
    the identity holds for smooth A of compact support in [0, oo).
    """

    n: int
    parity: str
    k: int
    constants: tuple
    cutoff: CutoffFamily = field(default_factory=CutoffFamily)

    @property
    def max_derivative(self):
        return len(self.constants) - 1


def derive_constants(n):
    """Iterate C'_j = ((m-2+j) C_j + C_{j-1}) / (m-2) from the base dimension 1 or 2.

    The step from dimension m-2 to m comes from D_m = -(1/(2 pi r)) d/dr D_{m-2},
    one integration by parts, and (d/dr)^j (r A') = r A^(j+1) + j A^(j).
    """
    if not 1 <= n <= MAX_DIMENSION:
        raise ValueError(f"unsupported dimension {n}")
    if n % 2:
        consts = [Fraction(2)]
        m = 1
        k = (n - 1) // 2
        parity = "odd"
    else:
        consts = [Fraction(1)]
        m = 2
        k = n // 2
        parity = "even"
    while m < n:
        m += 2
        prev = consts + [Fraction(0)]
        consts = [
            ((m - 2 + j) * prev[j] + (prev[j - 1] if j else 0)) / Fraction(m - 2) for j in range(len(prev))
        ]
    plan = DecompositionPlan(n=n, parity=parity, k=k, constants=tuple(consts))
    lead = Fraction(2) if parity == "odd" else Fraction(1)
    if consts[0] != lead:
        raise AssertionError(f"leading constant {consts[0]} differs from {lead}")
    return plan


def _base_kernel(parity, R, r):
    if parity == "odd":
        return (R / math.pi) * np.sinc(R * r / math.pi)
    return R * bessel_j(1, R * r)


def _eta_jets(plan, R, r, order):
    return plan.cutoff.jet(R, r, order).derivatives()


@dataclass
class Decomposition:
    I: np.ndarray
    II: np.ndarray
    III: np.ndarray
    I_unit: np.ndarray

    @property
    def total(self):
        return self.I + self.II + self.III


def decompose_partial_sum(F, x, R, plan, cfg=DEFAULT_CFG, means=None, T=None):
    """The three pieces of S_R(F)(x).

    I   = C_0 int_0^oo K_R Fbar dr
    II  = sum_{j>=1} C_j int_0^{R+1} K_R r^j (Fbar eta_R)^(j) dr
    III = omega int_R^oo D_n^R Fbar (1 - eta_R) r^{n-1} dr - C_0 int_R^oo K_R Fbar (1 - eta_R) dr
    """
    if plan.n != F.n:
        raise ValueError("plan dimension differs from the function dimension")
    J = plan.max_derivative
    if J > F.k_max:
        raise ValueError(f"{F.name}: decomposition needs {J} derivatives, function provides {F.k_max}")
    x = np.asarray(x, dtype=float).reshape(-1)
    n = F.n
    T = tail_cutoff(F, x, R) if T is None else T
    if means is None:
        means = SphericalMeans(F, x)
    C = [float(c) for c in plan.constants]

    def kern(r):
        return _base_kernel(plan.parity, R, r)[:, None]

    mb = tuple(_mean_breaks(means))
    edges = quad.oscillation_edges(R, 0.0, T, mb)
    I_unit = quad.integrate_panels(lambda r: kern(r) * means(r, 0)[0], edges, cfg)[0]

    II = np.zeros(F.d)
    if J >= 1:
        top = min(R + 1.0, T)

        def second(r):
            fb = means(r, J)  # (J+1, m, d)
            eta = _eta_jets(plan, R, r, J)  # (J+1, m)
            total = 0.0
            for j in range(1, J + 1):
                prod = sum(math.comb(j, i) * fb[i] * eta[j - i][:, None] for i in range(j + 1))
                total = total + C[j] * (r ** j)[:, None] * prod
            return kern(r) * total

        e2 = quad.oscillation_edges(R, 0.0, top, (R,) + mb)
        II = quad.integrate_panels(second, e2, cfg)[0]

    III = np.zeros(F.d)
    if T > R:

        def third(r):
            fb = means(r, 0)[0]
            one_minus = (1.0 - plan.cutoff.evaluate(R, r))[:, None]
            return (radial_weight(n, R, r)[:, None] - C[0] * kern(r)) * fb * one_minus

        e3 = quad.oscillation_edges(R, R, T, (R + 1.0,) + mb)
        III = quad.integrate_panels(third, e3, cfg)[0]
    return Decomposition(I=C[0] * I_unit, II=II, III=III, I_unit=I_unit)


def recover_leading_constant(F, x, R, plan, cfg=DEFAULT_CFG, means=None):
    """Solve F(x) = C_0 * I_unit + II + III for C_0."""
    dec = decompose_partial_sum(F, x, R, plan, cfg, means)
    fx = F(np.asarray(x, float)[None, :])[0]
    return (fx - dec.II - dec.III) / dec.I_unit


def tail_integral(F, x, R, plan, cfg=DEFAULT_CFG, means=None, T=None):
    """omega int_0^oo D_n^R(r) Fbar_x(r) (1 - eta_R(r)) r^{n-1} dr."""
    x = np.asarray(x, dtype=float).reshape(-1)
    T = tail_cutoff(F, x, R) if T is None else T
    if T <= R:
        return np.zeros(F.d)
    if means is None:
        if F.n == 1:
            means = _LineMeans(F, x[0])
        else:
            means = SphericalMeans(F, x)

    def integrand(r):
        one_minus = 1.0 - plan.cutoff.evaluate(R, r)
        return (radial_weight(F.n, R, r) * one_minus)[:, None] * means(r, 0)[0]

    edges = quad.oscillation_edges(R, R, T, (R + 1.0,))
    return quad.integrate_panels(integrand, edges, cfg)[0]


class _LineMeans:
    def __init__(self, F, x):
        self.F, self.x = F, x

    def __call__(self, r, order=0):
        return (0.5 * (self.F.scalar_line(self.x + r) + self.F.scalar_line(self.x - r)))[None]


@dataclass
class TailRow:
    R: float
    sup_tail: float
    ratio: float


def tail_bound_check(F, points, R_sweep, plan=None, cfg=DEFAULT_CFG):
    """Per R: sup over points of the tail integral, and sup * R / ||F||_L1."""
    if F.l1_norm is None:
        raise ValueError(f"{F.name}: the L1 norm must be declared")
    plan = derive_constants(F.n) if plan is None else plan
    pts = np.asarray(points, dtype=float).reshape(-1, F.n)
    rows = []
    for R in R_sweep:
        sup = 0.0
        for x in pts:
            sup = max(sup, float(np.max(np.abs(tail_integral(F, x, R, plan, cfg)))))
        ratio = sup * R / F.l1_norm if F.l1_norm > 0 else 0.0
        rows.append(TailRow(float(R), sup, ratio))
    return rows


def l1_norm_by_means(F, x, degree=40, cfg=DEFAULT_CFG):
    """int_0^oo r^{n-1} int_{S^{n-1}} ||F(x + r w)|| dw dr, which equals ||F||_L1 for any x."""
    x = np.asarray(x, dtype=float).reshape(-1)
    rule = quad.sphere_rule(F.n, degree)
    if F.majorant is None:
        raise ValueError("a majorant is needed")
    supp = F.majorant.support_radius()
    if math.isfinite(supp):
        T = float(np.linalg.norm(x)) + supp
    else:
        xn = float(np.linalg.norm(x))
        T = quad.semi_infinite_cutoff(lambda t: F.majorant.tail_mass(F.n, t - xn), 1e-14, start=xn + 1.0)

    def integrand(r):
        pts = x + r[:, None, None] * rule.nodes[None]
        vals = np.linalg.norm(F(pts), axis=-1)
        return (r ** (F.n - 1)) * (vals @ rule.weights)

    edges = np.linspace(0.0, T, 33)
    return float(quad.integrate_panels(integrand, edges, cfg)[0])


# ---------------------------------------------------------------------------
# Uniform convergence experiments
# ---------------------------------------------------------------------------


def _evaluate_engine(F, x, R, engine, cfg, means=None, plan=None, degree=None):
    if engine == "radial":
        if F.n == 1:
            return partial_sum_1d(F, x, R, cfg)
        return partial_sum_radial(F, x, R, cfg=cfg, means=means)
    if engine == "direct":
        return partial_sum_direct(F, x, R, cfg, degree=degree)
    if engine == "decomposed":
        if F.n == 1:
            means = _LineMeans(F, float(np.asarray(x).reshape(-1)[0]))
        return decompose_partial_sum(F, x, R, plan, cfg, means).total
    raise ValueError(f"unknown engine {engine!r}")


def uniform_inversion_experiment(
    F,
    box,
    R_values,
    engine="radial",
    spacing=0.05,
    threshold=1e-3,
    cfg=DEFAULT_CFG,
    sphere_degree=None,
    truth=None,
):
    """Sup over a grid on the box of ||S_R(F)(x) - F(x)|| for each R.

    For n >= 2 the spherical means at each grid point are tabulated once and
    reused across the R sweep.  ``truth`` overrides F(x) as reference values.
    """
    if len(box) != F.n:
        raise ValueError("box dimension differs from the function dimension")
    R_values = sorted(float(r) for r in R_values)
    grid, steps = uniform_grid(box, spacing)
    pts = grid.reshape(-1, F.n)
    ref = F(pts) if truth is None else np.asarray(truth(pts))
    plan = derive_constants(F.n) if engine == "decomposed" else None
    errs = np.zeros((len(R_values), pts.shape[0]))
    for i, x in enumerate(pts):
        means = None
        if F.n >= 2 and engine in ("radial", "decomposed"):
            T = tail_cutoff(F, x, max(R_values[0], 1.0))
            order = plan.max_derivative if plan is not None else 0
            degree = sphere_degree or quad.sphere_degree_for(2.0 * T * (1.0 + np.linalg.norm(x)), extra=20)
            means = SphericalMeans(F, x, degree=degree).tabulate(T, order, cfg)
        for j, R in enumerate(R_values):
            val = _evaluate_engine(F, x, R, engine, cfg, means=means, plan=plan, degree=sphere_degree)
            errs[j, i] = float(np.linalg.norm(val - ref[i]))
    shape = grid.shape[:-1]
    return build_report(
        F.name,
        "fourier_uniform",
        engine,
        box,
        max(steps),
        R_values,
        [e.reshape(shape) for e in errs],
        grid,
        threshold,
    )


# ---------------------------------------------------------------------------
# Uniform Riemann-Lebesgue diagnostic
# ---------------------------------------------------------------------------


@dataclass
class ParametricFamily:
    """A family s -> F(t, s) indexed by t, with s-support [lo(t), hi(t)]."""

    func: object  # func(t, s) -> (m,) or (m, d)
    params: np.ndarray
    support: object  # support(t) -> (lo, hi)
    breakpoints: object = None  # breakpoints(t) -> list

    def values(self, t, s):
        v = np.asarray(self.func(t, s), dtype=float)
        return v[:, None] if v.ndim == 1 else v


@dataclass
class RiemannLebesgueRow:
    R: float
    sup_integral: float
    translation_modulus: float
    holds: bool


def riemann_lebesgue_uniform_check(family, R_sweep, cfg=DEFAULT_CFG, slack=1e-9):
    """sup_t ||int sin(R s) F(t, s) ds|| against sup_t int ||F(t, s) - F(t, s + pi/R)|| ds."""
    rows = []
    for R in R_sweep:
        h = math.pi / R
        sup_int = 0.0
        sup_mod = 0.0
        for t in family.params:
            lo, hi = family.support(t)
            brk = list(family.breakpoints(t)) if family.breakpoints else []
            edges = quad.oscillation_edges(R, lo, hi, brk)
            val = quad.integrate_panels(lambda s: np.sin(R * s)[:, None] * family.values(t, s), edges, cfg)[0]
            sup_int = max(sup_int, float(np.linalg.norm(val)))
            brk2 = brk + [b - h for b in brk]
            e2 = np.unique(np.concatenate([[lo - h, hi], [b for b in brk2 if lo - h < b < hi]]))
            mod = quad.integrate_panels(
                lambda s: np.linalg.norm(family.values(t, s) - family.values(t, s + h), axis=1),
                e2,
                cfg,
            )[0]
            sup_mod = max(sup_mod, float(mod))
        rows.append(RiemannLebesgueRow(float(R), sup_int, sup_mod, bool(sup_int <= 0.5 * sup_mod + slack)))
    return rows
