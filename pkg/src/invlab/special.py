"""Bessel functions J0/J1, Dirichlet kernels of the ball, and the smooth cutoff family.

The n-dimensional Dirichlet kernel is the inverse Fourier transform of the
indicator of the ball of radius R,

    D_n^R(z) = (2 pi)^-n  int_{|xi| <= R} exp(-i z.xi) dxi,

which is radial and scales as D_n^R(r) = R^n d_n(R r).  For odd n the profile
d_n is a rational-coefficient combination of sin(u)/u^i and cos(u)/u^i, for
even n of J0(u)/u^i and J1(u)/u^i; both tables are generated exactly from the
n = 1, 2 closed forms by the recursion d_n = -(1/(2 pi u)) d/du d_{n-2}.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from . import jets

MAX_DIMENSION = 9


# ---------------------------------------------------------------------------
# Bessel functions of the first kind, orders 0 and 1
# ---------------------------------------------------------------------------

_SERIES_MAX = 8.0
_TRAPEZOID_MAX = 25.0
_N_SERIES = 30
_N_TRAPEZOID = 64
_N_HANKEL = 20


def _series_coeffs(order):
    # coefficients of J_order(x) / (x/2)^order in powers of (x/2)^2
    return np.array(
        [(-1) ** m / (math.factorial(m) * math.factorial(m + order)) for m in range(_N_SERIES)]
    )


_J_SERIES = {0: _series_coeffs(0), 1: _series_coeffs(1)}


def _bessel_series(order, x):
    q = 0.25 * x * x
    coeffs = _J_SERIES[order]
    acc = np.zeros_like(x)
    for c in coeffs[::-1]:
        acc = acc * q + c
    return acc * (0.5 * x) ** order


def _bessel_trapezoid(order, x):
    # J_n(x) = (1/2pi) int_0^{2pi} cos(n tau - x sin tau) dtau; trapezoid is spectrally exact
    tau = 2.0 * np.pi * np.arange(_N_TRAPEZOID) / _N_TRAPEZOID
    phase = order * tau[None, :] - x[:, None] * np.sin(tau)[None, :]
    return np.cos(phase).mean(axis=1)


def _hankel_coeffs(order):
    mu = 4.0 * order * order
    a = [1.0]
    for k in range(1, _N_HANKEL + 1):
        a.append(a[-1] * (mu - (2 * k - 1) ** 2) / (k * 8.0))
    return np.array(a)


_HANKEL = {0: _hankel_coeffs(0), 1: _hankel_coeffs(1)}


def _bessel_hankel(order, x):
    a = _HANKEL[order]
    inv = 1.0 / x
    p = np.zeros_like(x)
    q = np.zeros_like(x)
    term = np.ones_like(x)
    for k in range(_N_HANKEL + 1):
        sign = -1.0 if (k // 2) % 2 else 1.0
        if k % 2 == 0:
            p += sign * a[k] * term
        else:
            q += sign * a[k] * term
        term = term * inv
    chi = x - (0.5 * order + 0.25) * np.pi
    return np.sqrt(2.0 / (np.pi * x)) * (p * np.cos(chi) - q * np.sin(chi))


def bessel_j(order, x):
    """Bessel function J_order(x) for order 0 or 1 and x >= 0.

    Power series below 8, the periodic trapezoid rule for Bessel's integral
    on (8, 25], the Hankel asymptotic expansion beyond.
    """
    if order not in (0, 1):
        raise ValueError(f"order must be 0 or 1, got {order}")
    arr = np.asarray(x, dtype=float)
    if np.any(arr < 0):
        raise ValueError("bessel_j requires x >= 0")
    flat = arr.reshape(-1)
    out = np.empty_like(flat)
    small = flat <= _SERIES_MAX
    mid = (flat > _SERIES_MAX) & (flat <= _TRAPEZOID_MAX)
    big = flat > _TRAPEZOID_MAX
    if small.any():
        out[small] = _bessel_series(order, flat[small])
    if mid.any():
        out[mid] = _bessel_trapezoid(order, flat[mid])
    if big.any():
        out[big] = _bessel_hankel(order, flat[big])
    out = out.reshape(arr.shape)
    return out if out.ndim else float(out)


def _bessel_signed(order, x):
    # J0 even, J1 odd; lets callers pass signed arguments
    x = np.asarray(x, float)
    val = bessel_j(order, np.abs(x))
    return val * np.sign(x) if order == 1 else val


# ---------------------------------------------------------------------------
# Dirichlet kernels
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class KernelSpec:
    n: int
    R: float

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise ValueError(f"dimension must be a positive integer, got {self.n}")
        if not self.R >= 1:
            raise ValueError(f"truncation radius must be >= 1, got {self.R}")


def sphere_area(n):
    """Surface measure of the unit sphere in R^n (2, 2 pi, 4 pi, ...)."""
    return 2.0 * math.pi ** (n / 2) / math.gamma(n / 2)


@lru_cache(maxsize=None)
def kernel_terms(n):
    """Exact table of the profile d_n.

    Returns ``(basis, terms, prefactor)``: ``basis`` is ``("sin", "cos")`` for
    odd n and ``("J0", "J1")`` for even n, ``terms`` maps ``(function, power)``
    to a Fraction, and d_n(u) = prefactor * sum coeff * f(u) / u**power.
    """
    if n < 1 or n > MAX_DIMENSION:
        raise ValueError(f"kernel tables cover 1 <= n <= {MAX_DIMENSION}, got {n}")
    if n % 2:
        basis = ("sin", "cos")
        terms = {("sin", 1): Fraction(1)}
        prefactor = 1.0 / math.pi
        steps = (n - 1) // 2
    else:
        basis = ("J0", "J1")
        terms = {("J1", 1): Fraction(1)}
        prefactor = 1.0 / (2.0 * math.pi)
        steps = (n - 2) // 2
    for _ in range(steps):
        terms = _minus_inv_u_ddu(terms, basis)
        prefactor /= 2.0 * math.pi
    return basis, dict(sorted(terms.items())), prefactor


def _minus_inv_u_ddu(terms, basis):
    # g -> -(1/u) g'
    out = {}

    def add(key, val):
        out[key] = out.get(key, Fraction(0)) + val
        if out[key] == 0:
            del out[key]

    f0, f1 = basis
    for (f, p), c in terms.items():
        # d/du u^-p f = -p u^-(p+1) f + u^-p f'
        add((f, p + 2), c * p)  # after multiplying by -1/u
        if basis == ("sin", "cos"):
            if f == "sin":
                add(("cos", p + 1), -c)
            else:
                add(("sin", p + 1), c)
        else:
            if f == "J0":  # J0' = -J1
                add(("J1", p + 1), c)
            else:  # J1' = J0 - J1/u
                add(("J0", p + 1), -c)
                add(("J1", p + 2), c)
    return out


def _profile_series(n, u):
    # d_n(u) = (2pi)^(-n/2) J_{n/2}(u) / u^{n/2}, expanded in powers of u^2
    q = 0.25 * u * u
    acc = np.zeros_like(u)
    half = 0.5 * n
    coeffs = [(-1) ** m / (math.factorial(m) * math.gamma(m + half + 1)) for m in range(40)]
    for c in coeffs[::-1]:
        acc = acc * q + c
    return acc / ((2.0 * math.pi) ** half * 2.0 ** half)


def _series_threshold(n):
    return 0.0 if n <= 2 else 1.0 + 0.5 * n


def kernel_profile(n, u):
    """d_n(u) with D_n^R(r) = R^n d_n(R r); vectorized, finite at u = 0."""
    u = np.asarray(u, dtype=float)
    basis, terms, pref = kernel_terms(n)
    out = np.empty_like(u)
    small = u <= _series_threshold(n)
    if n <= 2:
        small = u < 1e-8
    if small.any():
        out[small] = _profile_series(n, u[small])
    big = ~small
    if big.any():
        ub = u[big]
        if basis[0] == "sin":
            funcs = {"sin": np.sin(ub), "cos": np.cos(ub)}
        else:
            funcs = {"J0": bessel_j(0, ub), "J1": bessel_j(1, ub)}
        acc = np.zeros_like(ub)
        for (f, p), c in terms.items():
            acc += float(c) * funcs[f] / ub ** p
        out[big] = pref * acc
    return out


def dirichlet_1d(R, r):
    """sin(R r)/(pi r), with the limit R/pi at r = 0."""
    r = np.asarray(r, dtype=float)
    safe = np.where(r == 0, 1.0, r)
    out = np.where(r == 0, R / np.pi, np.sin(R * r) / (np.pi * safe))
    return out if out.ndim else float(out)


def dirichlet_2d(R, r):
    """R J1(R r)/(2 pi r), with the limit R^2/(4 pi) at r = 0."""
    r = np.asarray(r, dtype=float)
    if np.any(r < 0):
        raise ValueError("r must be >= 0")
    safe = np.where(r == 0, 1.0, r)
    out = np.where(r == 0, R * R / (4 * np.pi), R * bessel_j(1, R * safe) / (2 * np.pi * safe))
    return out if out.ndim else float(out)


def dirichlet_nd(spec, r):
    """D_n^R(r) for 3 <= n <= 9 from the exact kernel tables (lower n dispatch)."""
    if spec.n == 1:
        return dirichlet_1d(spec.R, r)
    if spec.n == 2:
        return dirichlet_2d(spec.R, r)
    if spec.n > MAX_DIMENSION:
        raise ValueError(f"dimension {spec.n} exceeds supported maximum {MAX_DIMENSION}")
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0):
        raise ValueError("dirichlet_nd requires r > 0 for n >= 3")
    out = spec.R ** spec.n * kernel_profile(spec.n, spec.R * r)
    return out if out.ndim else float(out)


def radial_weight(n, R, r):
    """omega_{n-1} r^{n-1} D_n^R(r): the measure against which the spherical mean is integrated."""
    r = np.asarray(r, dtype=float)
    u = R * r
    return sphere_area(n) * R * u ** (n - 1) * kernel_profile(n, u)


# ---------------------------------------------------------------------------
# Smooth cutoff family eta_R
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CutoffFamily:
    """eta_R(r) = psi(R+1-r) / (psi(R+1-r) + psi(r-R)), psi(t) = exp(-1/t) for t > 0.

    C-infinity, identically 1 on (0, R], 0 on [R+1, oo).  Derivatives are
    exact (Taylor jets) up to ``smoothness_order``.
    """

    smoothness_order: int = 12

    def jet(self, R, r, order):
        if order > self.smoothness_order:
            raise ValueError(f"derivative order {order} exceeds {self.smoothness_order}")
        r = np.asarray(r, dtype=float)
        x = jets.Jet.variable(r, np.ones_like(r), order)
        left = jets.smooth_step_parts((R + 1.0) - x)
        right = jets.smooth_step_parts(x - R)
        inside = (r > R) & (r < R + 1)
        # outside the transition the quotient is exactly 0 or 1 with vanishing derivatives
        denom = jets.where(inside, left + right, 1.0)
        ratio = left / denom
        flat = np.where(r <= R, 1.0, 0.0)
        return jets.where(inside, ratio, jets.Jet.constant(flat, order))

    def evaluate(self, R, r):
        return self.jet(R, r, 0).value

    def derivative(self, order, R, r):
        return self.jet(R, r, order).derivatives()[order]


# ---------------------------------------------------------------------------
# Empirical decay constant
# ---------------------------------------------------------------------------


@dataclass
class KernelBoundFit:
    n: int
    fitted_C: float
    per_R: dict = field(default_factory=dict)
    spread: float = 1.0
    stable: bool = True


def verify_kernel_bound(spec, r_grid, R_values=None, stability=0.10):
    """Smallest C with |D_n^R(r)| <= C R^n / (1 + R r)^((n+1)/2) on the grid, per R.

    The sweep defaults to R = 1, 2, 4, ..., 1024; ``stable`` records whether
    the per-R constants agree to within ``stability`` (relative).
    """
    r = np.asarray(r_grid, dtype=float).reshape(-1)
    if r.size == 0:
        raise ValueError("r_grid must be nonempty")
    if np.any(r <= 0):
        raise ValueError("r_grid must contain only positive radii")
    if R_values is None:
        R_values = 2.0 ** np.arange(11)
    per_R = {}
    for R in R_values:
        u = R * r
        envelope = (1.0 + u) ** ((spec.n + 1) / 2.0)
        C = float(np.max(np.abs(kernel_profile(spec.n, u)) * envelope))
        if not np.isfinite(C):
            raise ValueError(f"no finite constant bounds the kernel at R={R}")
        per_R[float(R)] = C
    vals = np.array(list(per_R.values()))
    spread = float(vals.max() / vals.min()) if vals.min() > 0 else np.inf
    return KernelBoundFit(
        n=spec.n,
        fitted_C=float(vals.max()),
        per_R=per_R,
        spread=spread,
        stable=bool(spread <= 1.0 + stability),
    )
