"""Laplace transforms, Bromwich partial integrals and Cesaro means.

The Bromwich partial integral at abscissa omega and height R is

    B_R(t) = (1/2 pi) int_{-R}^{R} exp((omega + i k) t) L(F)(omega + i k) dk,

which equals exp(omega t) times the Dirichlet partial sum of the one-sided
function s -> exp(-omega s) F(s) 1_{s >= 0}.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from . import quadrature as quad
from .quadrature import QuadratureConfig
from .reports import build_report

DEFAULT_CFG = QuadratureConfig(abs_tol=1e-12, rel_tol=1e-12)


def growth_cutoff(omega0, constant, re_lam, eps):
    """T with constant * exp((omega0 - re_lam) T) / (re_lam - omega0) <= eps."""
    gap = re_lam - omega0
    if gap <= 0:
        raise ValueError(f"Re(lambda)={re_lam} must exceed the growth bound {omega0}")
    return max(math.log(max(constant, 1e-300) / (gap * eps)) / gap, 1.0)


@dataclass(eq=False)
class TransformHandle:
    """lambda -> L(F)(lambda) for Re(lambda) > omega0, closed form or numeric.

    The numeric source tabulates s -> exp(-omega s) F(s) once per abscissa
    omega as piecewise Legendre series and evaluates the transform along
    omega + i k by exact Legendre-exponential moments; tables are cached.
    """

    source: str
    d: int
    omega0: float
    closed: Optional[Callable] = None
    function: object = None
    cfg: QuadratureConfig = DEFAULT_CFG
    _tables: dict = field(default_factory=dict, repr=False)

    @classmethod
    def from_closed_form(cls, func, d, omega0):
        return cls(source="closed-form", d=d, omega0=omega0, closed=func)

    @classmethod
    def numeric(cls, F, cfg=DEFAULT_CFG):
        if F.growth_bound is None:
            raise ValueError(f"{F.name}: a growth bound is required for a numeric Laplace transform")
        return cls(source="numeric", d=F.d, omega0=F.growth_bound, function=F, cfg=cfg)

    @classmethod
    def for_function(cls, F, prefer="closed-form", cfg=DEFAULT_CFG):
        if prefer == "closed-form" and F.laplace is not None:
            return cls.from_closed_form(F.laplace_closed, F.d, F.growth_bound)
        return cls.numeric(F, cfg)

    def table(self, omega):
        key = float(omega)
        if key not in self._tables:
            self._tables[key] = tabulate_damped(self.function, key, self.cfg)
        return self._tables[key]

    def eval(self, lam):
        lam = np.asarray(lam, dtype=complex)
        if np.any(lam.real <= self.omega0):
            raise ValueError("transform evaluated at or left of the growth bound")
        if self.source == "closed-form":
            out = np.asarray(self.closed(lam), dtype=complex)
            if out.shape == lam.shape:
                out = out[..., None]
            return out
        flat = lam.reshape(-1)
        out = np.empty((flat.size, self.d), dtype=complex)
        for om in np.unique(flat.real):
            sel = flat.real == om
            out[sel] = self.table(om).fourier(flat[sel].imag)
        return out.reshape(lam.shape + (self.d,))


def _zero_breaks(F):
    return [b for b in F.breakpoints if b >= 0] + [0.0]


def tabulate_damped(F, omega, cfg=DEFAULT_CFG, eps=1e-15):
    """Piecewise Legendre table of s -> exp(-omega s) F(s) on [0, T]."""
    T = growth_cutoff(F.growth_bound, F.growth_constant, omega, eps)
    base = np.linspace(0.0, T, int(math.ceil(T / 0.5)) + 1)
    edges = np.unique(np.concatenate([quad.graded_edges(0.0, T, _zero_breaks(F), ratio=0.15, finest=1e-13), base]))

    def g(s):
        return np.exp(-omega * s)[:, None] * F.scalar_line(s)

    return quad.legendre_panels(g, edges, cfg)


def laplace_transform(F, lam, cfg=DEFAULT_CFG):
    """Numeric L(F)(lambda) = int_0^oo exp(-lambda s) F(s) ds for Re(lambda) > omega0."""
    if F.growth_bound is None:
        raise ValueError(f"{F.name}: a growth bound is required")
    lam_arr = np.asarray(lam, dtype=complex)
    if np.any(lam_arr.real <= F.growth_bound):
        raise ValueError(f"Re(lambda) must exceed the growth bound {F.growth_bound}")
    handle = TransformHandle.numeric(F, cfg)
    return handle.eval(lam_arr)


# ---------------------------------------------------------------------------
# Bromwich partial integrals
# ---------------------------------------------------------------------------


@dataclass
class BromwichConfig:
    omega: float
    R: float
    t_grid: np.ndarray
    cfg: QuadratureConfig = DEFAULT_CFG

    def __post_init__(self):
        self.t_grid = np.atleast_1d(np.asarray(self.t_grid, dtype=float))
        if np.any(self.t_grid < 0):
            raise ValueError("Bromwich times must be >= 0")
        if not self.R > 0:
            raise ValueError("R must be positive")


@dataclass
class BromwichResult:
    t: np.ndarray
    values: np.ndarray  # (nt, d) real parts
    imag_residue: float


def _panel_width(t_grid, omega0_gap):
    tmax = float(np.max(t_grid)) if np.size(t_grid) else 0.0
    return min(0.25, math.pi / (2.0 * max(tmax, 1e-9)), 0.5 * omega0_gap)


def _bromwich_integrand(handle, omega, t, weight=None):
    t = np.asarray(t, dtype=float)

    def f(k):
        lam = omega + 1j * k
        Lv = handle.eval(lam)  # (m, d)
        ph = np.exp(np.outer(lam, t))  # (m, nt)
        vals = ph[:, :, None] * Lv[:, None, :] / (2.0 * math.pi)
        if weight is not None:
            vals = vals * weight(k)[:, None, None]
        return vals

    return f


def _check_abscissa(handle, omega):
    if not omega > handle.omega0:
        raise ValueError(f"abscissa omega={omega} must exceed the growth bound {handle.omega0}")


def bromwich_partial(handle, bcfg):
    """(1/2 pi) int_{-R}^{R} exp((omega + ik) t) L(omega + ik) dk for every t in the grid."""
    _check_abscissa(handle, bcfg.omega)
    h = _panel_width(bcfg.t_grid, bcfg.omega - handle.omega0)
    m = max(2, int(math.ceil(2 * bcfg.R / h)))
    edges = np.linspace(-bcfg.R, bcfg.R, m + 1)
    val, _ = quad.integrate_panels(_bromwich_integrand(handle, bcfg.omega, bcfg.t_grid), edges, bcfg.cfg)
    return BromwichResult(bcfg.t_grid, val.real, float(np.max(np.abs(val.imag))) if val.size else 0.0)


def cesaro_partial(handle, omega, R, t, cfg=DEFAULT_CFG, method="fejer"):
    """(1/R) int_0^R B_r(t) dr.

    ``fejer``: one integral with weight (1 - |k|/R); ``double``: the outer
    r-integral taken numerically over adaptive inner Bromwich integrals.
    """
    _check_abscissa(handle, omega)
    t = np.atleast_1d(np.asarray(t, dtype=float))
    if method == "fejer":
        h = _panel_width(t, omega - handle.omega0)
        m = max(2, int(math.ceil(2 * R / h)))
        edges = np.linspace(-R, R, m + 1)
        f = _bromwich_integrand(handle, omega, t, weight=lambda k: 1.0 - np.abs(k) / R)
        val, _ = quad.integrate_panels(f, edges, cfg)
        return BromwichResult(t, val.real, float(np.max(np.abs(val.imag))))
    if method == "double":

        def outer(rs):
            return np.stack([bromwich_partial(handle, BromwichConfig(omega, r, t, cfg)).values for r in rs])

        edges = np.linspace(0.0, R, max(2, int(math.ceil(R))) + 1)
        val, _ = quad.integrate_panels(outer, edges, cfg)
        return BromwichResult(t, val / R, 0.0)
    raise ValueError(f"unknown method {method!r}")


def bromwich_sweep(handle, omega, R_values, t_grid, h=None, fejer=False, chunk=4096):
    """Bromwich (or Fejer-weighted) partial integrals for a whole R sweep.

    Fixed 16-point Gauss panels of width h tile [-R_max, R_max] with every R
    on a panel edge, so each R sums a prefix of per-panel contributions.
    Returns (real values (nR, nt, d), imaginary residue per R).
    """
    plain, cesaro, resid_p, resid_c = bromwich_sweep_both(handle, omega, R_values, t_grid, h, chunk)
    return (cesaro, resid_c) if fejer else (plain, resid_p)


def bromwich_sweep_both(handle, omega, R_values, t_grid, h=None, chunk=4096):
    """Plain and Fejer-weighted sweeps from a single pass over the panels.

    Returns (plain, fejer, plain imaginary residue, fejer imaginary residue).
    """
    _check_abscissa(handle, omega)
    t = np.atleast_1d(np.asarray(t_grid, dtype=float))
    R_values = np.asarray(sorted(R_values), dtype=float)
    if h is None:
        h = _panel_width(t, omega - handle.omega0)
        h = 2.0 ** math.floor(math.log2(h))
    counts = R_values / h
    if np.any(np.abs(counts - np.round(counts)) > 1e-9):
        raise ValueError("every R must be a multiple of the panel width")
    npan = int(round(counts[-1]))
    x, w, _ = quad._gauss(quad._GL_POINTS)
    # panels [j h, (j+1) h] for j >= 0; negative panels by reflection k -> -k
    P = np.zeros((2, npan, t.size, handle.d), dtype=complex)
    Q = np.zeros_like(P)
    per = max(1, chunk // quad._GL_POINTS)
    for sgn_i, sgn in enumerate((1.0, -1.0)):
        for start in range(0, npan, per):
            js = np.arange(start, min(start + per, npan))
            k = sgn * ((js[:, None] + 0.5) * h + 0.5 * h * x[None, :]).reshape(-1)
            vals = _bromwich_integrand(handle, omega, t)(k).reshape(js.size, quad._GL_POINTS, t.size, handle.d)
            wk = 0.5 * h * w
            P[sgn_i, js] = np.einsum("q,jqtd->jtd", wk, vals)
            Q[sgn_i, js] = np.einsum("q,jqtd,jq->jtd", wk, vals, np.abs(k.reshape(js.size, -1)))
    cumP = np.cumsum(P.sum(axis=0), axis=0)
    cumQ = np.cumsum(Q.sum(axis=0), axis=0)
    plain = np.empty((R_values.size, t.size, handle.d))
    cesaro = np.empty_like(plain)
    resid_p = np.empty(R_values.size)
    resid_c = np.empty(R_values.size)
    for i, R in enumerate(R_values):
        j = int(round(R / h)) - 1
        val = cumP[j]
        plain[i] = val.real
        resid_p[i] = float(np.max(np.abs(val.imag)))
        val = cumP[j] - cumQ[j] / R
        cesaro[i] = val.real
        resid_c[i] = float(np.max(np.abs(val.imag)))
    return plain, cesaro, resid_p, resid_c


# ---------------------------------------------------------------------------
# The Fourier side of the same partial integral
# ---------------------------------------------------------------------------


def damped_dirichlet_sum(F, omega, R, t, cfg=DEFAULT_CFG, eps=1e-14):
    """exp(omega t) (1/pi) int_0^oo sin(R(s - t))/(s - t) exp(-omega s) F(s) ds."""
    if F.growth_bound is None:
        raise ValueError(f"{F.name}: a growth bound is required")
    T = growth_cutoff(F.growth_bound, F.growth_constant, omega, eps) + float(t)
    brk = [b for b in F.breakpoints if 0 < b < T]

    def integrand(s):
        ker = (R / math.pi) * np.sinc(R * (s - t) / math.pi)
        return (ker * np.exp(-omega * s))[:, None] * F.scalar_line(s)

    # panels between consecutive zeros of sin(R (s - t))
    shifted = t + quad.oscillation_edges(R, -t, T - t)
    edges = np.unique(np.concatenate([[0.0, T], shifted, brk]))
    val, _ = quad.integrate_panels(integrand, edges, cfg)
    return math.exp(omega * t) * val


@dataclass
class BridgeRow:
    t: float
    bromwich: list
    fourier: list
    difference: float


def fourier_laplace_bridge(F, omega, R, t_grid, cfg=DEFAULT_CFG, handle=None):
    """Bromwich partial integral against exp(omega t) x Dirichlet sum of the damped function."""
    if handle is None:
        handle = TransformHandle.for_function(F, cfg=cfg)
    t_grid = np.atleast_1d(np.asarray(t_grid, dtype=float))
    br = bromwich_partial(handle, BromwichConfig(omega, R, t_grid, cfg))
    rows = []
    for i, t in enumerate(t_grid):
        fs = damped_dirichlet_sum(F, omega, R, t, cfg)
        diff = float(np.max(np.abs(br.values[i] - fs)))
        rows.append(BridgeRow(float(t), br.values[i].tolist(), fs.tolist(), diff))
    return rows


# ---------------------------------------------------------------------------
# Convergence experiments
# ---------------------------------------------------------------------------


def time_grid(a, b, spacing):
    m = max(int(math.ceil((b - a) / spacing - 1e-9)), 1)
    return np.linspace(a, b, m + 1)


def laplace_inversion_experiment(
    F,
    interval,
    omega,
    R_values=tuple(2.0 ** np.arange(4, 11)),
    spacing=0.01,
    threshold=1e-2,
    handle=None,
    truth=None,
    fejer=False,
    include_zero=None,
    experiment="laplace_inversion",
):
    """Sup over a t-grid of ||B_R(t) - F(t)|| per R (Fejer means with ``fejer``).

    t = 0 is kept in the grid only if F(0) = 0, unless ``include_zero`` says
    otherwise.
    """
    a, b = map(float, interval)
    if a < 0 or b < a:
        raise ValueError("interval must satisfy 0 <= a <= b")
    handle = TransformHandle.for_function(F) if handle is None else handle
    t = time_grid(a, b, spacing)
    f0 = F.scalar_line(np.zeros(1))[0]
    if include_zero is None:
        include_zero = bool(np.all(f0 == 0))
    if a == 0 and not include_zero:
        t = t[1:]
    ref = F.scalar_line(t) if truth is None else np.asarray(truth(t)).reshape(t.size, -1)
    vals, resid = bromwich_sweep(handle, omega, R_values, t, fejer=fejer)
    errs = [np.linalg.norm(v - ref, axis=1) for v in vals]
    return build_report(
        F.name,
        experiment,
        "fejer" if fejer else "bromwich",
        [(t[0], t[-1])],
        float(t[1] - t[0]) if t.size > 1 else 0.0,
        R_values,
        errs,
        t[:, None],
        threshold,
        extras={"omega": float(omega), "imag_residue": [float(r) for r in resid], "f_at_zero": f0.tolist()},
    )
