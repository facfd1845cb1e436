"""Catalog of test functions and matrix systems with their expected verdicts."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import jets
from .functions import Majorant, TestFunction, gaussian
from .semigroup import SemigroupSystem

# ---------------------------------------------------------------------------
# The Weierstrass-type sum G(t) = sum_n sin(n^2 t) / n^2
# ---------------------------------------------------------------------------


def weierstrass_terms(tol):
    """Number of terms N with sum_{n>N} n^-2 <= 1/N <= tol."""
    if not tol > 0:
        raise ValueError("tol must be positive")
    return int(math.ceil(1.0 / tol))


def weierstrass_partial(t, N, block=2048):
    """sum_{n=1}^N sin(n^2 t)/n^2 for an array of t."""
    t = np.asarray(t, dtype=float)
    flat = t.reshape(-1)
    out = np.zeros_like(flat)
    step = max(1, block * 64 // max(flat.size, 1))
    for start in range(1, N + 1, step):
        n = np.arange(start, min(start + step, N + 1), dtype=float)
        # n^2 t reduced mod 2 pi in two steps to limit cancellation for large n
        out += (np.sin(np.outer(flat, n * n)) / (n * n)).sum(axis=1)
    return out.reshape(t.shape)


def weierstrass_eval(t, tol):
    """G(t) to within tol (tail bound 1/N); returns (value, N)."""
    N = weierstrass_terms(tol)
    val = weierstrass_partial(t, N)
    return (float(val) if np.ndim(val) == 0 else val), N


def _weierstrass_laplace_exact(lam):
    # sum_n 1/(z^2 + n^4) with z = lam + 1, via partial fractions in n^2 and
    # sum_n 1/(n^2 + a^2) = (pi a coth(pi a) - 1) / (2 a^2)
    z = np.asarray(lam, dtype=complex) + 1.0
    a1 = np.sqrt(-1j * z)
    a2 = np.sqrt(1j * z)

    def S(a):
        return (math.pi * a / np.tanh(math.pi * a) - 1.0) / (2.0 * a * a)

    return (S(a1) - S(a2)) / (2j * z)


def weierstrass_laplace_partial(lam, N):
    z2 = (np.asarray(lam, dtype=complex) + 1.0) ** 2
    out = np.zeros_like(z2)
    for n in range(1, N + 1):
        out += 1.0 / (z2 + float(n) ** 4)
    return out


def weierstrass_damped(N=None, tol=1e-5):
    """F(t) = exp(-t) G(t).

    With ``N`` the sum is truncated at N terms and the transform is the
    matching finite sum (an exact transform pair); otherwise the transform is
    the closed form of the full series and values are accurate to ``tol``.
    """
    terms = weierstrass_terms(tol) if N is None else int(N)

    def func(t):
        if isinstance(t, jets.Jet):
            raise ValueError("derivatives of the Weierstrass sum are not available")
        return np.exp(-t) * weierstrass_partial(t, terms)

    if N is None:
        lap = _weierstrass_laplace_exact
    else:

        def lap(lam):
            return weierstrass_laplace_partial(lam, terms)

    return TestFunction(
        name="weierstrass_damped" if N is None else f"weierstrass_damped_N{terms}",
        n=1,
        d=1,
        func=func,
        holder_alpha=0.5,
        growth_bound=-1.0 + 1e-9,
        growth_constant=math.pi ** 2 / 6,
        laplace=lap,
        description="exp(-t) sum sin(n^2 t)/n^2",
        extras={"terms": terms},
    )


# ---------------------------------------------------------------------------
# Scalar test functions
# ---------------------------------------------------------------------------


def step_function():
    def func(t):
        v = jets.value_of(t)
        return np.where(np.abs(v) <= 1.0, 1.0, 0.0)

    def fhat(k):
        k = k[..., 0]
        safe = np.where(k == 0, 1.0, k)
        return np.where(k == 0, 2.0, 2.0 * np.sin(safe) / safe)

    def lap(lam):
        return (1.0 - np.exp(-lam)) / lam

    return TestFunction(
        name="step_function",
        n=1,
        d=1,
        func=func,
        growth_bound=-1.0,
        growth_constant=math.e,
        majorant=Majorant("compact", amplitude=1.0, radius=1.0),
        fhat=fhat,
        laplace=lap,
        breakpoints=(-1.0, 1.0),
        l1_norm=2.0,
        description="indicator of [-1, 1]",
    )


def holder_sqrt_sine():
    def func(t):
        return np.exp(-t * t) * np.sqrt(np.abs(np.sin(t)))

    return TestFunction(
        name="holder_sqrt_sine",
        n=1,
        d=1,
        func=func,
        holder_alpha=0.5,
        growth_bound=-1.0,
        growth_constant=math.exp(0.25),
        majorant=Majorant("gaussian", amplitude=1.0, rate=1.0),
        breakpoints=tuple(k * math.pi for k in range(-3, 4)),
        description="exp(-t^2) |sin t|^(1/2), Holder-1/2 at the zeros of sin",
    )


def t_exp():
    return TestFunction(
        name="t_exp",
        n=1,
        d=1,
        func=lambda t: t * np.exp(-t),
        k_max=6,
        holder_alpha=1.0,
        growth_bound=-0.5,
        growth_constant=2.0 / math.e,
        laplace=lambda lam: 1.0 / (lam + 1.0) ** 2,
        description="t exp(-t)",
    )


def exp_decay():
    return TestFunction(
        name="exp_decay",
        n=1,
        d=1,
        func=lambda t: np.exp(-t),
        k_max=6,
        holder_alpha=1.0,
        growth_bound=-1.0,
        laplace=lambda lam: 1.0 / (lam + 1.0),
        description="exp(-t)",
    )


def constant_one():
    return TestFunction(
        name="constant_one",
        n=1,
        d=1,
        func=lambda t: 1.0 + 0.0 * t,
        k_max=6,
        holder_alpha=1.0,
        growth_bound=0.0,
        laplace=lambda lam: 1.0 / lam,
        description="F = 1, violating F(0) = 0",
    )


def continuous_standin():
    """exp(-t) |sin(1/(t + 0.1))|^(1/2) t, continuous with square-root cusps."""
    cusps = tuple(1.0 / (m * math.pi) - 0.1 for m in range(1, 4))

    def func(t):
        return np.exp(-t) * np.sqrt(np.abs(np.sin(1.0 / (t + 0.1)))) * t

    return TestFunction(
        name="continuous_standin",
        n=1,
        d=1,
        func=func,
        holder_alpha=0.5,
        growth_bound=-0.5,
        growth_constant=2.0 / math.e,
        breakpoints=cusps,
        description="exp(-t) t |sin(1/(t+0.1))|^(1/2)",
    )


def bump_train(N=4):
    """sum_{n=1}^N exp(-|t - e^n|^2)/n^2, truncated to N bumps."""
    centers = [math.e ** n for n in range(1, N + 1)]

    def func(t):
        out = 0.0 * t
        for n, c in enumerate(centers, start=1):
            out = out + np.exp(-(t - c) * (t - c)) / (n * n)
        return out

    def fhat(k):
        k = k[..., 0]
        return sum(math.sqrt(math.pi) * np.exp(-0.25 * k * k - 1j * k * c) / (n * n) for n, c in enumerate(centers, 1))

    return TestFunction(
        name="bump_train",
        n=1,
        d=1,
        func=func,
        k_max=6,
        holder_alpha=1.0,
        # Gaussian tails beyond 30 of the outermost centre are below 1e-390
        majorant=Majorant("compact", amplitude=1.0, radius=centers[-1] + 30.0),
        fhat=fhat,
        l1_norm=sum(math.sqrt(math.pi) / n ** 2 for n in range(1, N + 1)),
        description=f"sum of {N} Gaussian bumps at e^n with heights 1/n^2",
        extras={"terms": N},
    )


def staircase(K=6):
    """Plateaus |k|^(-1/2) on [k - 2^-|k|, k + 2^-|k|], linear ramps of width 2^-(|k|+2), 0 < |k| <= K."""
    pieces = []
    for k in range(-K, K + 1):
        if k == 0:
            continue
        h = abs(k) ** -0.5
        w = 2.0 ** -abs(k)
        r = 2.0 ** -(abs(k) + 2)
        pieces.append((k, h, w, r))
    bps = sorted({p for k, h, w, r in pieces for p in (k - w - r, k - w, k + w, k + w + r)})

    def func(t):
        v = jets.value_of(t)
        out = np.zeros_like(np.asarray(v, dtype=float))
        for k, h, w, r in pieces:
            d = np.abs(v - k)
            out = out + h * np.clip((w + r - d) / r, 0.0, 1.0)
        return out

    radius = K + 1.0
    return TestFunction(
        name="staircase",
        n=1,
        d=1,
        func=func,
        holder_alpha=0.5,
        majorant=Majorant("compact", amplitude=1.0, radius=radius),
        breakpoints=tuple(bps),
        l1_norm=sum(h * (2 * w + r) for k, h, w, r in pieces),
        description=f"plateaus |k|^(-1/2) around the integers 0 < |k| <= {K}",
        extras={"terms": K},
    )


def dini_candidate():
    """exp(-t^2) / (1 + log(1 + 1/|t|))^2: Dini-continuous at 0 but not Holder there."""

    def func(t):
        v = np.abs(jets.value_of(t))
        safe = np.where(v == 0, 1.0, v)
        return np.where(v == 0, 0.0, np.exp(-safe * safe) / (1.0 + np.log1p(1.0 / safe)) ** 2)

    return TestFunction(
        name="dini_candidate",
        n=1,
        d=1,
        func=func,
        majorant=Majorant("gaussian", amplitude=1.0, rate=1.0),
        breakpoints=(0.0,),
        description="Dini-continuous, not Holder at 0 (no uniform-inversion claim either way)",
    )


def gaussian_vector():
    return gaussian(1, d=2)


# ---------------------------------------------------------------------------
# Catalog
# ---------------------------------------------------------------------------


@dataclass
class CatalogEntry:
    id: str
    factory: object
    origin: str
    expected_class: str
    experiments: dict = field(default_factory=dict)
    expected_verdicts: dict = field(default_factory=dict)

    @property
    def function(self):
        return self.factory()

    def summary(self):
        return {
            "id": self.id,
            "origin": self.origin,
            "expected_class": self.expected_class,
            "expected_verdicts": dict(sorted(self.expected_verdicts.items())),
        }


def _fourier(box, R, threshold, spacing, engine="radial"):
    return {
        "kind": "fourier_uniform",
        "compact": [list(iv) for iv in box],
        "R_values": list(R),
        "threshold": threshold,
        "spacing": spacing,
        "engine": engine,
    }


def _laplace(interval, R, threshold, omega=0.0, spacing=0.01, kind="laplace_inversion", include_zero=None):
    cfg = {
        "kind": kind,
        "compact": [list(interval)],
        "R_values": list(R),
        "threshold": threshold,
        "spacing": spacing,
        "omega": omega,
    }
    if include_zero is not None:
        cfg["include_zero"] = include_zero
    return cfg


def _semigroup(interval, mode, threshold, x=(1.0, 0.0), R=(64, 128, 256, 512)):
    return {
        "kind": "semigroup_inversion",
        "compact": [list(interval)],
        "R_values": list(R),
        "threshold": threshold,
        "spacing": 0.01,
        "omega": 0.0,
        "mode": mode,
        "x": list(x),
        "alpha": 1.0,
    }


OCT = [2.0 ** j for j in range(4, 11)]

_ENTRIES = [
    CatalogEntry(
        "gaussian",
        lambda: gaussian(1),
        "closed-form Gaussian pair, Schwartz class",
        "Lipschitz",
        {"fourier_uniform": _fourier([(-1, 1)], [4, 8, 16, 32, 64, 128, 256], 1e-3, 0.05)},
        {"fourier_uniform": "pass"},
    ),
    CatalogEntry(
        "gaussian_3d",
        lambda: gaussian(3),
        "radial Gaussian in three dimensions",
        "Lipschitz",
        {"fourier_uniform": _fourier([(-1, 1)] * 3, [4, 16, 64, 256], 1e-3, 0.5)},
        {"fourier_uniform": "pass"},
    ),
    CatalogEntry(
        "gaussian_vector",
        gaussian_vector,
        "Gaussian times a fixed vector, values in R^2",
        "Lipschitz",
        {"fourier_uniform": _fourier([(-1, 1)], [4, 16, 64], 1e-3, 0.1)},
        {"fourier_uniform": "pass"},
    ),
    CatalogEntry(
        "step_function",
        step_function,
        "indicator of an interval; outside the continuity hypotheses",
        "discontinuous",
        {
            "fourier_uniform": _fourier([(-2, 2)], [16, 64, 256, 1024], 0.05, 0.01),
            "fourier_local": _fourier([(0.5, 0.9)], [256, 1024, 4096, 8192], 1e-3, 0.01),
        },
        {"fourier_uniform": "contrast", "fourier_local": "pass"},
    ),
    CatalogEntry(
        "holder_sqrt_sine",
        holder_sqrt_sine,
        "Holder exponent 1/2 at the zeros of sine",
        "Hölder",
        {"fourier_uniform": _fourier([(-2, 2)], [16, 32, 64, 128, 256, 512], 0.05, 0.02)},
        {"fourier_uniform": "pass"},
    ),
    CatalogEntry(
        "weierstrass_damped",
        weierstrass_damped,
        "damped Weierstrass-type sum: Holder-1/2, not Lipschitz",
        "Hölder",
        {"laplace_inversion": _laplace((0, 1), OCT, 2e-2)},
        {"laplace_inversion": "pass"},
    ),
    CatalogEntry(
        "bump_train",
        bump_train,
        "Gaussian bumps of height 1/n^2 at e^n (truncated to 4 bumps)",
        "Lipschitz",
        {"fourier_uniform": _fourier([(0, 4)], [8, 32, 128], 1e-3, 0.05)},
        {"fourier_uniform": "pass"},
    ),
    CatalogEntry(
        "staircase",
        staircase,
        "plateaus |k|^(-1/2) near the integers (truncated to |k| <= 6)",
        "Hölder",
        {"fourier_uniform": _fourier([(-2.5, 2.5)], [64, 256, 1024, 4096], 5e-2, 0.01)},
        {"fourier_uniform": "pass"},
    ),
    CatalogEntry(
        "t_exp",
        t_exp,
        "t exp(-t), transform 1/(lambda+1)^2",
        "Lipschitz",
        {"laplace_inversion": _laplace((0, 2), OCT, 1e-3)},
        {"laplace_inversion": "pass"},
    ),
    CatalogEntry(
        "exp_decay",
        exp_decay,
        "exp(-t), transform 1/(lambda+1); F(0) = 1",
        "Lipschitz",
        {"laplace_inversion": _laplace((0.5, 2), OCT, 1e-3)},
        {"laplace_inversion": "pass"},
    ),
    CatalogEntry(
        "constant_one",
        constant_one,
        "F = 1, transform 1/lambda; violates F(0) = 0",
        "Lipschitz",
        {"laplace_inversion": _laplace((0, 2), OCT, 1e-2, omega=0.5, include_zero=True)},
        {"laplace_inversion": "contrast"},
    ),
    CatalogEntry(
        "continuous_standin",
        continuous_standin,
        "continuous with square-root cusps; stand-in for merely continuous F",
        "continuous",
        {
            "laplace_inversion": _laplace((0, 1), OCT, 5e-2),
            "cesaro": _laplace((0, 1), OCT, 5e-2, kind="cesaro"),
        },
        {"laplace_inversion": "pass", "cesaro": "pass"},
    ),
    CatalogEntry(
        "dini_candidate",
        dini_candidate,
        "Dini-continuous but not Holder; open slot, no verdict asserted",
        "continuous",
        {"fourier_uniform": _fourier([(-1, 1)], [16, 64, 256], 5e-2, 0.05)},
        {},
    ),
    CatalogEntry(
        "neg_identity",
        lambda: SemigroupSystem(-np.eye(2), "neg_identity"),
        "A = -I, resolvent 1/(lambda+1)",
        "Lipschitz",
        {
            "semigroup_with_zero": _semigroup((0, 2), "with_zero", 1e-3),
            "semigroup_plain": _semigroup((0.1, 2), "plain", 1e-2),
        },
        {"semigroup_with_zero": "pass", "semigroup_plain": "pass"},
    ),
    CatalogEntry(
        "damped_rotation",
        lambda: SemigroupSystem([[-1.0, 5.0], [-5.0, -1.0]], "damped_rotation"),
        "rotation with damping, eigenvalues -1 +- 5i",
        "Lipschitz",
        {
            "semigroup_with_zero": _semigroup((0, 2), "with_zero", 5e-3),
            "semigroup_plain": _semigroup((0.1, 2), "plain", 1e-2),
        },
        {"semigroup_with_zero": "pass", "semigroup_plain": "pass"},
    ),
    CatalogEntry(
        "jordan_block",
        lambda: SemigroupSystem([[-1.0, 1.0], [0.0, -1.0]], "jordan_block"),
        "defective generator, exp(tA) = exp(-t)[[1, t], [0, 1]]",
        "Lipschitz",
        {"semigroup_with_zero": _semigroup((0, 2), "with_zero", 5e-3, x=(0.0, 1.0))},
        {"semigroup_with_zero": "pass"},
    ),
]

CATALOG = {e.id: e for e in _ENTRIES}


def catalog_list(filter_text=""):
    """Catalog entries whose id contains ``filter_text``, in declaration order."""
    return [e for e in _ENTRIES if filter_text in e.id]


def get_entry(entry_id):
    try:
        return CATALOG[entry_id]
    except KeyError:
        raise KeyError(f"unknown catalog id {entry_id!r}") from None
