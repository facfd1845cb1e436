"""Test functions R^n -> R^d with the metadata the inversion experiments need."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy import special as sps

from . import jets
from .quadrature import sphere_measure


@dataclass(frozen=True)
class Majorant:
    """Radial majorant ||F(y)|| <= m(|y|) used to bound integration tails.

    kind: ``gaussian`` (A exp(-a r^2)), ``exponential`` (A exp(-a r)),
    ``compact`` (A on r <= radius, 0 beyond) or ``zero``.
    """

    kind: str
    amplitude: float = 1.0
    rate: float = 1.0
    radius: float = 0.0

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        if self.kind == "gaussian":
            return self.amplitude * np.exp(-self.rate * r * r)
        if self.kind == "exponential":
            return self.amplitude * np.exp(-self.rate * r)
        if self.kind == "compact":
            return np.where(r <= self.radius, self.amplitude, 0.0)
        if self.kind == "zero":
            return np.zeros_like(r)
        raise ValueError(f"unknown majorant kind {self.kind!r}")

    def tail_mass(self, n, rho):
        """Upper bound on the integral of ||F|| over {|y| >= rho} in R^n."""
        rho = max(float(rho), 0.0)
        w = sphere_measure(n)
        A, a = self.amplitude, self.rate
        if self.kind == "gaussian":
            return A * w / 2 * a ** (-n / 2) * sps.gamma(n / 2) * sps.gammaincc(n / 2, a * rho * rho)
        if self.kind == "exponential":
            return A * w * a ** (-n) * sps.gamma(n) * sps.gammaincc(n, a * rho)
        if self.kind == "compact":
            return 0.0 if rho >= self.radius else A * w * self.radius ** n / n
        if self.kind == "zero":
            return 0.0
        raise ValueError(f"unknown majorant kind {self.kind!r}")

    def support_radius(self):
        if self.kind == "compact":
            return self.radius
        if self.kind == "zero":
            return 0.0
        return math.inf


@dataclass(eq=False)
class TestFunction:
    """F: R^n -> R^d given as ``func(*coords)`` returning a value or a list of d values.

    ``func`` must be written with numpy ufuncs so that it also runs on
    :class:`invlab.jets.Jet` coordinates; this provides directional and
    partial derivatives up to ``k_max``.
    """

    __test__ = False  # not a pytest class

    name: str
    n: int
    d: int
    func: Callable
    k_max: int = 0
    holder_alpha: Optional[float] = None
    growth_bound: Optional[float] = None
    growth_constant: float = 1.0
    majorant: Optional[Majorant] = None
    fhat: Optional[Callable] = None
    laplace: Optional[Callable] = None
    breakpoints: tuple = ()
    l1_norm: Optional[float] = None
    description: str = ""
    extras: dict = field(default_factory=dict)

    def __call__(self, points):
        pts = np.asarray(points, dtype=float)
        if pts.shape[-1] != self.n:
            raise ValueError(f"{self.name}: expected points with last axis {self.n}, got {pts.shape}")
        out = self.func(*[pts[..., i] for i in range(self.n)])
        return _stack_values(out, self.d, pts.shape[:-1])

    def scalar_line(self, t):
        """Evaluate a function of one variable on a 1-D array, shape (len(t), d)."""
        t = np.asarray(t, dtype=float)
        return self(t[..., None])

    def directional(self, points, directions, order):
        """(d/ds)^j F(points + s directions) at s = 0 for j = 0..order, shape (order+1, ..., d)."""
        if order > self.k_max:
            raise ValueError(f"{self.name}: derivative order {order} exceeds k_max={self.k_max}")
        pts = np.asarray(points, dtype=float)
        dirs = np.broadcast_to(np.asarray(directions, dtype=float), pts.shape)
        coords = [jets.Jet.variable(pts[..., i], dirs[..., i], order) for i in range(self.n)]
        out = self.func(*coords)
        if self.d == 1 and not isinstance(out, (list, tuple)):
            out = [out]
        parts = []
        for comp in out:
            if isinstance(comp, jets.Jet):
                parts.append(comp.derivatives())
            else:
                c = np.zeros((order + 1,) + pts.shape[:-1])
                c[0] = comp
                parts.append(c)
        shape = (order + 1,) + pts.shape[:-1]
        return np.stack([np.broadcast_to(p, shape) for p in parts], axis=-1)

    def grad(self, alpha, x):
        """Mixed partial derivative d^alpha F(x) by polarization of directional derivatives."""
        alpha = tuple(int(a) for a in alpha)
        m = sum(alpha)
        if m > self.k_max:
            raise ValueError(f"{self.name}: |alpha|={m} exceeds k_max={self.k_max}")
        x = np.asarray(x, dtype=float).reshape(-1)
        if m == 0:
            return self(x[None, :])[0]
        idx = [i for i, a in enumerate(alpha) for _ in range(a)]
        total = np.zeros(self.d)
        # d_{i1}...d_{im} f = 1/(m! 2^m) sum_eps eps_1...eps_m D^m_{sum eps_j e_ij} f
        for eps in itertools.product((1.0, -1.0), repeat=m):
            v = np.zeros(self.n)
            for e, i in zip(eps, idx):
                v[i] += e
            total += np.prod(eps) * self.directional(x[None, :], v[None, :], m)[m, 0]
        return total / (math.factorial(m) * 2 ** m)

    def transform(self, k):
        """Closed-form Fourier transform int exp(-i k.y) F(y) dy at frequencies (..., n)."""
        if self.fhat is None:
            raise ValueError(f"{self.name}: no closed-form Fourier transform")
        k = np.asarray(k, dtype=float)
        return _stack_values(self.fhat(k), self.d, k.shape[:-1])

    def laplace_closed(self, lam):
        if self.laplace is None:
            raise ValueError(f"{self.name}: no closed-form Laplace transform")
        lam = np.asarray(lam, dtype=complex)
        return _stack_values(self.laplace(lam), self.d, lam.shape)


def _stack_values(out, d, batch):
    if isinstance(out, (list, tuple)):
        comps = [np.broadcast_to(np.asarray(c), batch) for c in out]
        arr = np.stack(comps, axis=-1)
    else:
        arr = np.asarray(out)
        if d == 1:
            arr = np.broadcast_to(arr, batch)[..., None]
    if arr.shape[-1] != d:
        raise ValueError(f"function returned {arr.shape[-1]} components, expected {d}")
    return arr


def gaussian(n, d=1):
    """exp(-|y|^2) (times a fixed vector when d > 1)."""

    def func(*y):
        s = 0.0
        for c in y:
            s = s + c * c
        g = np.exp(-s)
        if d == 1:
            return g
        return [g * (1.0 + 0.5 * j) for j in range(d)]

    def fhat(k):
        g = math.pi ** (n / 2) * np.exp(-0.25 * np.sum(k * k, axis=-1))
        if d == 1:
            return g
        return [g * (1.0 + 0.5 * j) for j in range(d)]

    return TestFunction(
        name="gaussian" if n == 1 else f"gaussian_{n}d",
        n=n,
        d=d,
        func=func,
        k_max=8,
        holder_alpha=1.0,
        majorant=Majorant("gaussian", amplitude=max(1.0, 0.5 * d + 0.5), rate=1.0),
        fhat=fhat,
        l1_norm=math.pi ** (n / 2),
        description="exp(-|y|^2)",
    )


def random_bump_polynomial(n, rng, degree=2, radius=1.0):
    """Random polynomial times the C-infinity bump exp(1 - 1/(1 - |y - c|^2/radius^2)).

    The bump is compactly supported in the ball of ``radius`` around a random
    center c with |c| <= 0.5.
    """
    center = rng.uniform(-0.5, 0.5, n) / max(1.0, math.sqrt(n))
    exps = [tuple(e) for e in itertools.product(range(degree + 1), repeat=n) if sum(e) <= degree]
    coeffs = rng.normal(size=len(exps))
    coeffs[0] += 2.0

    def func(*y):
        s = 0.0
        for c, yc in zip(center, y):
            s = s + (yc - c) * (yc - c)
        q = s * (1.0 / radius ** 2)
        inside = jets.value_of(q) < 1.0 - 1e-3
        safe = jets.where(inside, q, 0.0)
        bump = jets.where(inside, np.exp(1.0 - 1.0 / (1.0 - safe)), 0.0)
        poly = 0.0
        for co, e in zip(coeffs, exps):
            term = co
            for yc, p in zip(y, e):
                if p:
                    term = term * yc ** p
            poly = poly + term
        return poly * bump

    amp = float(np.abs(coeffs).sum()) * (1.0 + np.linalg.norm(center) + radius) ** degree
    return TestFunction(
        name="random_bump_polynomial",
        n=n,
        d=1,
        func=func,
        k_max=6,
        majorant=Majorant("compact", amplitude=amp, radius=float(np.linalg.norm(center) + radius)),
        description="random polynomial times a smooth bump",
        extras={"center": center, "radius": radius},
    )
