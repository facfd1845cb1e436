"""Quadrature engines: adaptive Gauss panels, oscillation-aligned integrals,
sphere rules, ball integrals in frequency space, and a Filon-type engine for
Fourier integrals of tabulated functions.

Integrands are vectorized: ``f(r)`` takes a 1-D array of abscissae and returns
an array of shape ``(len(r),)`` or ``(len(r), *vshape)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numpy.polynomial import legendre
from scipy import special as sps

_GL_POINTS = 16
_CHUNK = 200_000
_ROUNDOFF = 500 * np.finfo(float).eps


@dataclass(frozen=True)
class QuadratureConfig:
    abs_tol: float = 1e-11
    rel_tol: float = 1e-11
    max_panels: int = 200_000
    oscillation_aware: bool = True

    def __post_init__(self):
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise ValueError("tolerances must be positive")
        if self.max_panels < 1:
            raise ValueError("max_panels must be >= 1")


class QuadratureBudgetError(RuntimeError):
    """Raised when the panel budget runs out; carries the best estimate."""

    def __init__(self, message, estimate, error):
        super().__init__(message)
        self.estimate = estimate
        self.error = error


@lru_cache(maxsize=None)
def _gauss(m):
    x, w = legendre.leggauss(m)
    # rows j: (2j+1)/2 * w_i * P_j(x_i) maps nodal values to Legendre coefficients
    V = legendre.legvander(x, m - 1).T * w[None, :] * ((2 * np.arange(m) + 1) / 2.0)[:, None]
    return x, w, V


def _eval_panels(f, lo, hi):
    x, w, V = _gauss(_GL_POINTS)
    mid = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    nodes = (mid[:, None] + half[:, None] * x[None, :]).reshape(-1)
    pieces = []
    for start in range(0, nodes.size, _CHUNK):
        pieces.append(np.asarray(f(nodes[start : start + _CHUNK])))
    vals = np.concatenate(pieces, axis=0) if len(pieces) > 1 else pieces[0]
    vals = vals.reshape((lo.size, _GL_POINTS) + vals.shape[1:])
    integral = half.reshape((-1,) + (1,) * (vals.ndim - 2)) * np.tensordot(vals, w, axes=([1], [0])).reshape(
        (lo.size,) + vals.shape[2:]
    ) if vals.ndim > 2 else half * (vals @ w)
    coeffs = np.tensordot(V[-2:], vals, axes=([1], [1]))  # (2, panels, *vshape)
    tail = np.abs(coeffs).sum(axis=0)
    if tail.ndim > 1:
        tail = tail.reshape(lo.size, -1).max(axis=1)
    err = 2.0 * half * tail
    absvals = np.abs(vals)
    if absvals.ndim > 2:
        absvals = absvals.reshape(lo.size, _GL_POINTS, -1).max(axis=2)
    resabs = half * (absvals @ w)
    return integral, err, resabs


def _norm(v):
    return float(np.max(np.abs(v))) if np.size(v) else 0.0


def integrate_panels(f, edges, cfg=QuadratureConfig()):
    """Adaptive integration over consecutive panels ``edges[0] < edges[1] < ...``.

    Returns ``(value, error_estimate)``.  Panels are bisected, largest error
    first, until the summed error estimate meets the tolerance.
    """
    edges = np.asarray(edges, dtype=float)
    if edges.size < 2:
        raise ValueError("need at least two panel edges")
    lo, hi = edges[:-1], edges[1:]
    keep = hi > lo
    lo, hi = lo[keep], hi[keep]
    if lo.size == 0:
        probe = np.asarray(f(np.array([edges[0]])))
        zero = np.zeros(probe.shape[1:])
        return zero, 0.0
    scale = max(abs(edges[0]), abs(edges[-1]), 1e-300)

    done_val = None
    done_err = 0.0  # accepted against the tolerance
    floor_err = 0.0  # accepted at the rounding or width floor, beyond improvement
    pend_lo, pend_hi = lo, hi
    total_panels = lo.size
    while True:
        vals, errs, resabs = _eval_panels(f, pend_lo, pend_hi)
        cur = vals.sum(axis=0)
        estimate = cur if done_val is None else done_val + cur
        tol = max(cfg.abs_tol, cfg.rel_tol * _norm(estimate))
        pending = float(errs.sum())
        if done_err + pending <= tol:
            return estimate, done_err + floor_err + pending
        # accept the smallest errors while their sum stays under half the remaining tolerance
        order = np.argsort(errs)
        budget = 0.5 * (tol - done_err)
        csum = np.cumsum(errs[order])
        n_accept = int(np.searchsorted(csum, max(budget, 0.0), side="right"))
        budgeted = np.zeros(errs.size, dtype=bool)
        budgeted[order[:n_accept]] = True
        # estimates at the rounding level of the panel cannot be improved by bisection
        floored = ~budgeted & (((pend_hi - pend_lo) <= 1e-14 * scale) | (errs <= _ROUNDOFF * resabs))
        accept = budgeted | floored
        if accept.all():
            return estimate, done_err + floor_err + pending
        acc_val = vals[accept].sum(axis=0)
        done_val = acc_val if done_val is None else done_val + acc_val
        done_err += float(errs[budgeted].sum())
        floor_err += float(errs[floored].sum())
        total_err = done_err + floor_err + pending
        split_lo, split_hi = pend_lo[~accept], pend_hi[~accept]
        mid = 0.5 * (split_lo + split_hi)
        total_panels += split_lo.size
        if total_panels > cfg.max_panels:
            raise QuadratureBudgetError(
                f"panel budget {cfg.max_panels} exhausted (error {total_err:.3g} > {tol:.3g})",
                estimate,
                total_err,
            )
        pend_lo = np.concatenate([split_lo, mid])
        pend_hi = np.concatenate([mid, split_hi])
        srt = np.argsort(pend_lo, kind="stable")
        pend_lo, pend_hi = pend_lo[srt], pend_hi[srt]


def integrate_finite(f, a, b, cfg=QuadratureConfig(), breakpoints=()):
    """int_a^b f componentwise; ``breakpoints`` are forced panel edges."""
    if not a <= b:
        raise ValueError("integrate_finite requires a <= b")
    inner = [p for p in breakpoints if a < p < b]
    edges = np.unique(np.concatenate([[a, b], inner]))
    return integrate_panels(f, edges, cfg)[0]


def oscillation_edges(R, a, b, extra=(), phase=0.0):
    """Panel edges at the zeros (k pi + phase)/R of sin(R r - phase) in [a, b]."""
    kmin = math.ceil((a * R - phase) / math.pi)
    kmax = math.floor((b * R - phase) / math.pi)
    zeros = (np.arange(kmin, kmax + 1) * math.pi + phase) / R
    pts = np.concatenate([[a, b], zeros, [p for p in extra if a < p < b]])
    return np.unique(pts[(pts >= a) & (pts <= b)])


def semi_infinite_cutoff(tail, eps, start=1.0):
    """Smallest T on a doubling-then-bisection search with tail(T) <= eps."""
    T = max(start, 1e-3)
    while tail(T) > eps:
        T *= 2.0
        if T > 1e12:
            raise ValueError("tail bound does not fall below tolerance")
    lo = T / 2.0
    for _ in range(40):
        mid = 0.5 * (lo + T)
        if tail(mid) <= eps:
            T = mid
        else:
            lo = mid
    return T


def integrate_oscillatory(amplitude, R, a, b, cfg=QuadratureConfig(), tail=None, breakpoints=()):
    """int_a^b sin(R r) amplitude(r) dr with panels aligned to the zeros of sin(R r).

    ``b`` may be ``inf`` when ``tail(T)`` bounds int_T^oo |amplitude|.
    """
    if not R >= 1:
        raise ValueError("R must be >= 1")
    if math.isinf(b):
        if tail is None:
            raise ValueError("an infinite upper limit needs an analytic tail bound")
        b = semi_infinite_cutoff(tail, 0.1 * cfg.abs_tol, start=max(a, 1.0))

    def integrand(r):
        amp = np.asarray(amplitude(r))
        s = np.sin(R * r)
        return s.reshape((-1,) + (1,) * (amp.ndim - 1)) * amp

    if cfg.oscillation_aware:
        edges = oscillation_edges(R, a, b, breakpoints)
    else:
        edges = np.unique(np.concatenate([[a, b], [p for p in breakpoints if a < p < b]]))
    return integrate_panels(integrand, edges, cfg)[0]


# ---------------------------------------------------------------------------
# Sphere rules
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class SphereRule:
    n: int
    nodes: np.ndarray
    weights: np.ndarray
    degree: int

    @property
    def size(self):
        return self.weights.size


def sphere_measure(n):
    return 2.0 * math.pi ** (n / 2) / math.gamma(n / 2)


@lru_cache(maxsize=256)
def sphere_rule(n, degree):
    """Product rule on S^{n-1} exact for polynomials of total degree <= ``degree``.

    n = 1: the two points +-1; n = 2: ``degree + 1`` equispaced angles;
    n >= 3: Gauss-Jacobi in the first coordinate times a rule on S^{n-2}.
    """
    degree = max(int(degree), 1)
    if n < 1:
        raise ValueError("dimension must be >= 1")
    if n == 1:
        return SphereRule(1, np.array([[1.0], [-1.0]]), np.array([1.0, 1.0]), degree)
    if n == 2:
        m = degree + 1
        th = 2.0 * math.pi * (np.arange(m) + 0.5) / m
        nodes = np.stack([np.cos(th), np.sin(th)], axis=1)
        return SphereRule(2, nodes, np.full(m, 2.0 * math.pi / m), degree)
    m = degree // 2 + 1
    a = (n - 3) / 2.0
    t, wt = sps.roots_jacobi(m, a, a)
    sub = sphere_rule(n - 1, degree)
    s = np.sqrt(1.0 - t * t)
    nodes = np.concatenate(
        [t.repeat(sub.size)[:, None], (s[:, None, None] * sub.nodes[None, :, :]).reshape(-1, n - 1)], axis=1
    )
    weights = (wt[:, None] * sub.weights[None, :]).reshape(-1)
    return SphereRule(n, nodes, weights, degree)


def sphere_monomial_integral(alpha):
    """Exact int_{S^{n-1}} x^alpha d sigma."""
    alpha = np.asarray(alpha)
    if np.any(alpha % 2):
        return 0.0
    b = (alpha + 1) / 2.0
    return 2.0 * math.exp(sum(math.lgamma(x) for x in b) - math.lgamma(b.sum()))


def _blocks(count, per_item, budget=400_000):
    step = max(1, budget // max(per_item, 1))
    for start in range(0, count, step):
        yield slice(start, min(start + step, count))


def sphere_mean(F, x, r, rule):
    """(1/omega) sum_i w_i F(x + r omega_i); ``r`` scalar or 1-D array.

    ``F`` maps points of shape (..., n) to values of shape (..., d).
    """
    x = np.asarray(x, dtype=float).reshape(-1)
    if x.size != rule.n or getattr(F, "n", rule.n) != rule.n:
        raise ValueError(f"dimension mismatch: point {x.size}, rule {rule.n}, function {getattr(F, 'n', '?')}")
    r_arr = np.asarray(r, dtype=float)
    rr = r_arr.reshape(-1)
    wsum = rule.weights.sum()
    parts = []
    for blk in _blocks(rr.size, rule.size):
        pts = x + rr[blk].reshape(-1, 1, 1) * rule.nodes[None, :, :]
        vals = np.asarray(F(pts))  # (nr, m, d)
        parts.append(np.einsum("rmd,m->rd", vals, rule.weights) / wsum)
    mean = np.concatenate(parts, axis=0)
    at_zero = rr == 0
    if at_zero.any():
        mean[at_zero] = np.asarray(F(x[None, :]))[0]
    return mean[0] if r_arr.ndim == 0 else mean


def sphere_mean_derivative(F, x, r, order, rule):
    """(d/dr)^order of the spherical mean: directional derivatives pulled inside.

    Returns shape (order+1, [nr,] d) holding derivatives 0..order.
    """
    x = np.asarray(x, dtype=float).reshape(-1)
    if x.size != rule.n or getattr(F, "n", rule.n) != rule.n:
        raise ValueError("dimension mismatch between point, rule and function")
    k_max = getattr(F, "k_max", None)
    if k_max is not None and order > k_max:
        raise ValueError(f"derivative order {order} exceeds the available order {k_max}")
    r_arr = np.asarray(r, dtype=float)
    rr = r_arr.reshape(-1)
    wsum = rule.weights.sum()
    parts = []
    for blk in _blocks(rr.size, rule.size * (order + 1)):
        pts = x + rr[blk].reshape(-1, 1, 1) * rule.nodes[None, :, :]
        dirs = np.broadcast_to(rule.nodes[None, :, :], pts.shape)
        derivs = F.directional(pts, dirs, order)  # (order+1, nr, m, d)
        parts.append(np.einsum("jrmd,m->jrd", derivs, rule.weights) / wsum)
    mean = np.concatenate(parts, axis=1)
    return mean[:, 0] if r_arr.ndim == 0 else mean


def sphere_degree_for(radius, extra=30):
    """Angular degree resolving exp(i radius * (x . omega)) to machine precision."""
    return int(math.ceil(radius + 1.5 * radius ** (1.0 / 3.0) * 10 ** 0.5 + extra))


# ---------------------------------------------------------------------------
# Ball integrals in frequency space
# ---------------------------------------------------------------------------


def ball_integral(Fhat, x, R, cfg=QuadratureConfig(), degree=None, return_imag=False):
    """(2 pi)^-n int_{|k| <= R} exp(i x.k) Fhat(k) dk by polar quadrature (n <= 3).

    ``Fhat`` maps frequency points (..., n) to values (..., d).  Returns the
    real part; with ``return_imag`` also the imaginary part, which vanishes
    for real-valued F and serves as a diagnostic.
    """
    x = np.asarray(x, dtype=float).reshape(-1)
    n = x.size
    if n > 3:
        raise ValueError("the direct ball engine covers n <= 3")
    xn = float(np.linalg.norm(x))
    if degree is None:
        degree = sphere_degree_for(R * xn, extra=30)
    rule = sphere_rule(n, degree)

    def radial(rho):
        k = rho[:, None, None] * rule.nodes[None, :, :]  # (nr, m, n)
        phase = k @ x
        fh = np.asarray(Fhat(k))  # (nr, m, d)
        c = np.cos(phase)[..., None] * fh
        s = np.sin(phase)[..., None] * fh
        # stacked (real, imag) parts of exp(i phase) Fhat for real Fhat
        w = rule.weights
        re = np.tensordot(c.real, w, axes=([1], [0])) - np.tensordot(s.imag, w, axes=([1], [0]))
        im = np.tensordot(s.real, w, axes=([1], [0])) + np.tensordot(c.imag, w, axes=([1], [0]))
        jac = (rho ** (n - 1))[:, None]
        return np.concatenate([re * jac, im * jac], axis=1)

    step = math.pi / max(xn, 1.0)
    edges = np.linspace(0.0, R, max(2, int(math.ceil(R / step)) + 1))
    val, _ = integrate_panels(radial, edges, cfg)
    val = val / (2.0 * math.pi) ** n
    d = val.size // 2
    re, im = val[:d], val[d:]
    return (re, im) if return_imag else re


# ---------------------------------------------------------------------------
# Filon-type Fourier engine for tabulated functions on [0, T]
# ---------------------------------------------------------------------------


@dataclass
class LegendrePanels:
    """Piecewise Legendre expansion of a function on consecutive panels."""

    centers: np.ndarray
    halfwidths: np.ndarray
    coeffs: np.ndarray  # (panels, degree+1, *vshape)

    def __call__(self, s):
        s = np.asarray(s, dtype=float)
        edges = np.concatenate([self.centers - self.halfwidths, [self.centers[-1] + self.halfwidths[-1]]])
        idx = np.clip(np.searchsorted(edges, s, side="right") - 1, 0, self.centers.size - 1)
        u = (s - self.centers[idx]) / self.halfwidths[idx]
        P = legendre.legvander(u, self.coeffs.shape[1] - 1)  # (ns, deg+1)
        c = self.coeffs[idx]
        return np.einsum("sj,sj...->s...", P, c)

    def fourier(self, k):
        """int exp(-i k s) g(s) ds over all panels, for an array of k."""
        k = np.asarray(k, dtype=float).reshape(-1)
        deg = self.coeffs.shape[1] - 1
        out = None
        vshape = self.coeffs.shape[2:]
        flat = self.coeffs.reshape(self.coeffs.shape[0], deg + 1, -1)
        jidx = np.arange(deg + 1)
        phase_j = (-1j) ** jidx
        uniq, inverse = np.unique(self.halfwidths, return_inverse=True)
        for start in range(0, k.size, 512):
            kk = k[start : start + 512]
            # moments depend on the panel only through its half-width
            arg = kk[:, None] * uniq[None, :]
            arg = np.where(np.abs(arg) < 1e-100, 0.0, arg)  # spherical_jn returns nan for subnormal input
            sj = sps.spherical_jn(jidx[None, None, :], np.abs(arg)[..., None])  # (nk, U, J)
            sj = sj * np.where(arg[..., None] < 0, (-1.0) ** jidx, 1.0)
            mom = (2.0 * sj * phase_j)[:, inverse]  # int_{-1}^{1} e^{-i arg u} P_j(u) du
            shift = np.exp(-1j * kk[:, None] * self.centers[None, :]) * self.halfwidths[None, :]
            blk = np.einsum("kp,kpj,pjv->kv", shift, mom, flat, optimize=True)
            out = blk if out is None else np.concatenate([out, blk])
        return out.reshape((k.size,) + vshape)


def legendre_panels(f, edges, cfg=QuadratureConfig(), degree=_GL_POINTS - 1):
    """Adaptive piecewise-Legendre representation of f with coefficient-tail control."""
    x, w, V = _gauss(degree + 1)
    lo = np.asarray(edges[:-1], float)
    hi = np.asarray(edges[1:], float)
    keep_lo, keep_hi, keep_c = [], [], []
    scale = max(abs(edges[0]), abs(edges[-1]), 1.0)
    total = 0
    ref = None
    while lo.size:
        mid = 0.5 * (lo + hi)
        half = 0.5 * (hi - lo)
        nodes = (mid[:, None] + half[:, None] * x[None, :]).reshape(-1)
        vals = np.asarray(f(nodes))
        vals = vals.reshape((lo.size, degree + 1) + vals.shape[1:])
        coeffs = np.moveaxis(np.tensordot(V, vals, axes=([1], [1])), 0, 1)  # (P, deg+1, *v)
        if ref is None:
            ref = max(float(np.max(np.abs(vals))), 1e-300)
        tail = np.abs(coeffs[:, -2:]).reshape(lo.size, -1).max(axis=1)
        ok = (tail <= max(cfg.abs_tol, cfg.rel_tol * ref)) | (half <= 1e-14 * scale)
        keep_lo.append(lo[ok])
        keep_hi.append(hi[ok])
        keep_c.append(coeffs[ok])
        lo, hi = lo[~ok], hi[~ok]
        m = 0.5 * (lo + hi)
        lo, hi = np.concatenate([lo, m]), np.concatenate([m, hi])
        total += lo.size
        if total > cfg.max_panels:
            raise QuadratureBudgetError("panel budget exhausted while tabulating", None, float(tail.max()))
    lo = np.concatenate(keep_lo)
    hi = np.concatenate(keep_hi)
    c = np.concatenate(keep_c)
    srt = np.argsort(lo)
    lo, hi, c = lo[srt], hi[srt], c[srt]
    return LegendrePanels(0.5 * (lo + hi), 0.5 * (hi - lo), c)


def graded_edges(a, b, breakpoints=(), ratio=0.2, finest=1e-12, width=1.0):
    """Panel edges on [a, b] refined geometrically toward each breakpoint."""
    pts = [a, b]
    for p in breakpoints:
        if a <= p <= b:
            pts.append(p)
            h = min(width, b - a)
            while h > finest:
                for q in (p - h, p + h):
                    if a < q < b:
                        pts.append(q)
                h *= ratio
    return np.unique(np.asarray(pts, float))
