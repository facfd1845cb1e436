"""Matrix semigroups S(t) = exp(tA), resolvents, Favard norms and Holder checks."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .laplace import TransformHandle, bromwich_sweep, time_grid
from .reports import build_report

GROWTH_MARGIN = 1e-9


class SingularResolventError(ValueError):
    """lambda lies (numerically) in the spectrum of A."""


@dataclass(frozen=True, eq=False)
class SemigroupSystem:
    A: np.ndarray
    name: str = "system"
    margin: float = GROWTH_MARGIN

    def __post_init__(self):
        A = np.array(self.A, dtype=float)
        if A.ndim != 2 or A.shape[0] != A.shape[1]:
            raise ValueError("generator must be a square matrix")
        A.setflags(write=False)
        object.__setattr__(self, "A", A)

    @property
    def d(self):
        return self.A.shape[0]

    @property
    def spectral_abscissa(self):
        return float(np.max(np.linalg.eigvals(self.A).real))

    @property
    def omega0(self):
        return self.spectral_abscissa + self.margin

    def propagator(self, t):
        return scipy.linalg.expm(float(t) * self.A)

    def growth_certificate(self, omega_prime, t_grid):
        """max over the grid of ||S(t)|| exp(-omega' t); finite means the bound holds there."""
        return max(np.linalg.norm(self.propagator(t), 2) * math.exp(-omega_prime * t) for t in t_grid)


def semigroup_apply(sys, t, x):
    """S(t) x = exp(tA) x (scaling and squaring with Pade approximants)."""
    if t < 0:
        raise ValueError("t must be >= 0")
    return sys.propagator(t) @ np.asarray(x, dtype=float)


def orbit(sys, t_grid, x):
    """S(t) x for every t in the grid, shape (nt, d)."""
    x = np.asarray(x, dtype=float)
    return np.stack([semigroup_apply(sys, t, x) for t in np.atleast_1d(t_grid)])


def resolvent(sys, lam, x, rtol=1e-12):
    """Solve (lam - A) y = x; rejects lam in the spectrum."""
    x = np.asarray(x, dtype=complex)
    M = lam * np.eye(sys.d) - sys.A
    scale = max(1.0, abs(lam), float(np.linalg.norm(sys.A, 2)))
    smin = np.linalg.svd(M, compute_uv=False)[-1]
    if smin <= 1e-13 * scale:
        raise SingularResolventError(f"lambda={lam} is an eigenvalue of A (smallest singular value {smin:.2e})")
    y = np.linalg.solve(M, x)
    resid = np.linalg.norm(M @ y - x)
    if resid > rtol * max(np.linalg.norm(x), 1e-300) * max(1.0, scale):
        raise SingularResolventError(f"resolvent residual {resid:.2e} too large at lambda={lam}")
    return y


def resolvent_handle(sys, x, mode="plain"):
    """Transform lam -> (lam - A)^-1 x, minus x/(lam - omega0) in ``with_zero`` mode."""
    x = np.asarray(x, dtype=float)
    I = np.eye(sys.d)
    w0 = sys.omega0

    def func(lam):
        lam = np.asarray(lam, dtype=complex)
        flat = lam.reshape(-1)
        M = flat[:, None, None] * I[None] - sys.A[None]
        y = np.linalg.solve(M, np.broadcast_to(x.astype(complex), (flat.size, sys.d))[..., None])[..., 0]
        if mode == "with_zero":
            y = y - x[None, :] / (flat - w0)[:, None]
        elif mode != "plain":
            raise ValueError(f"unknown mode {mode!r}")
        return y.reshape(lam.shape + (sys.d,))

    return TransformHandle.from_closed_form(func, sys.d, w0)


def semigroup_inversion_experiment(
    sys,
    x,
    alpha,
    omega,
    interval,
    R_values=tuple(2.0 ** np.arange(4, 10)),
    mode="plain",
    spacing=0.01,
    threshold=1e-3,
    favard_alphas=(),
):
    """Bromwich inversion of the resolvent orbit against exp(tA) x.

    ``with_zero`` inverts (lam - A)^-1 x - x/(lam - omega0) and compares with
    S(t) x - exp(omega0 t) x, which vanishes at t = 0.
    """
    if not omega > sys.omega0:
        raise ValueError(f"omega={omega} must exceed the growth bound {sys.omega0}")
    a, b = map(float, interval)
    if mode == "plain" and a <= 0:
        raise ValueError("plain mode needs an interval with a > 0")
    x = np.asarray(x, dtype=float)
    t = time_grid(a, b, spacing)
    truth = orbit(sys, t, x)
    if mode == "with_zero":
        truth = truth - np.exp(sys.omega0 * t)[:, None] * x[None, :]
    handle = resolvent_handle(sys, x, mode)
    vals, resid = bromwich_sweep(handle, omega, R_values, t)
    diffs = vals - truth[None]
    errs = [np.linalg.norm(dv, axis=1) for dv in diffs]
    extras = {"mode": mode, "alpha": float(alpha), "omega": float(omega), "imag_residue": resid.tolist()}
    if favard_alphas:
        grid = favard_grid()
        props = [sys.propagator(s) for s in grid]
        fav = {}
        for ap in favard_alphas:
            fav[str(ap)] = [
                float(max(_favard_sup(props, grid, dv[i], ap)[0] for i in range(t.size))) for dv in diffs
            ]
        extras["favard_errors"] = fav
    return build_report(
        sys.name,
        f"semigroup_inversion_{mode}",
        "bromwich",
        [(t[0], t[-1])],
        float(t[1] - t[0]) if t.size > 1 else 0.0,
        R_values,
        errs,
        t[:, None],
        threshold,
        extras=extras,
    )


# ---------------------------------------------------------------------------
# Favard norms
# ---------------------------------------------------------------------------


def favard_grid(t_min=1e-6, t_max=1e2, points=400):
    return np.geomspace(t_min, t_max, points)


@dataclass
class FavardEstimate:
    alpha: float
    x: list
    norm_estimate: float
    argmax_t: float
    t_grid: tuple
    diverging: bool = False
    quotients: np.ndarray = field(default=None, repr=False)


def _favard_sup(props, grid, x, alpha):
    q = np.array([np.linalg.norm(P @ x - x) for P in props]) / grid ** alpha
    i = int(np.argmax(q))
    return float(q[i]), i, q


def favard_norm(sys, x, alpha, t_grid=None):
    """sup over a geometric grid of t^-alpha ||S(t)x - x||.

    ``diverging`` is set when the quotient grows toward the smallest grid
    points with a log-log slope of at least 1e-3, i.e. it behaves like a
    negative power of t rather than settling to a finite limit.
    """
    if not 0 < alpha <= 1:
        raise ValueError("alpha must lie in (0, 1]")
    grid = favard_grid() if t_grid is None else np.asarray(t_grid, dtype=float)
    x = np.asarray(x, dtype=float)
    props = [sys.propagator(s) for s in grid]
    sup, i, q = _favard_sup(props, grid, x, alpha)
    diverging = False
    if q[0] > 0 and q[0] > q[1] > q[2]:
        slope = -(math.log(q[0]) - math.log(q[2])) / (math.log(grid[0]) - math.log(grid[2]))
        diverging = slope > 1e-3
    return FavardEstimate(
        alpha=float(alpha),
        x=x.tolist(),
        norm_estimate=sup,
        argmax_t=float(grid[i]),
        t_grid=(float(grid[0]), float(grid[-1]), int(grid.size)),
        diverging=bool(diverging),
        quotients=q,
    )


# ---------------------------------------------------------------------------
# Holder estimates along the orbit
# ---------------------------------------------------------------------------


@dataclass
class HolderCheck:
    x_constant: float
    favard_constant: float
    favard_norm_x: float
    ratio_x: float
    ratio_favard: float
    pairs: int
    seed: int


def holder_pairs(interval, rng, count=400, smallest_lag=1e-7):
    """Random pairs in [a, b] plus pairs anchored at a with geometric lags."""
    a, b = interval
    t1 = rng.uniform(a, b, count)
    t2 = rng.uniform(a, b, count)
    lags = np.geomspace(smallest_lag, b - a, 60)
    anchors = np.concatenate([np.full(lags.size, a), np.full(lags.size, b) - lags])
    s1 = np.concatenate([t1, anchors])
    s2 = np.concatenate([t2, anchors + np.concatenate([lags, lags])])
    keep = np.abs(s2 - s1) > 0
    return s1[keep], s2[keep]


def holder_constant_check(sys, x, alpha, alpha_prime, interval, seed=0, count=400):
    """Empirical constants for ||S(t2)x - S(t1)x|| <= C |t2 - t1|^alpha and its Favard analogue."""
    if not 0 < alpha_prime < alpha <= 1:
        raise ValueError("need 0 < alpha' < alpha <= 1")
    if not sys.spectral_abscissa < 0:
        raise ValueError("the estimate assumes a negative growth bound")
    x = np.asarray(x, dtype=float)
    fx = favard_norm(sys, x, alpha).norm_estimate
    if not np.any(x):
        return HolderCheck(0.0, 0.0, 0.0, 0.0, 0.0, 0, seed)
    rng = np.random.default_rng(seed)
    s1, s2 = holder_pairs(interval, rng, count)
    grid = favard_grid()
    props = [sys.propagator(s) for s in grid]
    cx = 0.0
    cf = 0.0
    for a, b in zip(s1, s2):
        diff = semigroup_apply(sys, b, x) - semigroup_apply(sys, a, x)
        h = abs(b - a)
        cx = max(cx, float(np.linalg.norm(diff)) / h ** alpha)
        cf = max(cf, _favard_sup(props, grid, diff, alpha_prime)[0] / h ** (alpha - alpha_prime))
    return HolderCheck(
        float(cx), float(cf), float(fx), float(cx / fx) if fx else math.inf, float(cf / fx) if fx else math.inf,
        int(s1.size), int(seed),
    )


def resolvent_favard_ratio(sys, x, alpha, lambdas):
    """max over lam of ||y||_{F_alpha} / (||y||^(1-alpha) (1+|lam|)^alpha ||x||^alpha), y = (lam-A)^-1 x."""
    x = np.asarray(x, dtype=float)
    grid = favard_grid()
    props = [sys.propagator(s) for s in grid]
    best = 0.0
    for lam in lambdas:
        y = resolvent(sys, lam, x)
        fy = max(
            _favard_sup(props, grid, y.real, alpha)[0],
            _favard_sup(props, grid, y.imag, alpha)[0],
        )
        denom = np.linalg.norm(y) ** (1 - alpha) * (1 + abs(lam)) ** alpha * np.linalg.norm(x) ** alpha
        best = max(best, fy / denom)
    return best


def semigroup_law_defect(sys, pairs):
    """max ||S(t+s) - S(t)S(s)|| over the given (t, s) pairs."""
    return max(
        float(np.linalg.norm(sys.propagator(t + s) - sys.propagator(t) @ sys.propagator(s), 2)) for t, s in pairs
    )
