"""Convergence reports: sup errors over a grid, rate fits and verdicts."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np


def fit_rate(R_values, errors):
    """Exponent p in error ~ c R^-p by least squares on the upper half of the sweep.

    Returns None when fewer than two usable (positive, finite) points remain.
    """
    R = np.asarray(R_values, dtype=float)
    e = np.asarray(errors, dtype=float)
    half = R.size // 2
    R, e = R[half:], e[half:]
    ok = np.isfinite(e) & (e > 0)
    if ok.sum() < 2:
        return None
    slope = np.polyfit(np.log(R[ok]), np.log(e[ok]), 1)[0]
    return float(-slope)


def octave_means(R_values, errors):
    """Mean error per octave [2^j, 2^(j+1)) of R, in increasing order of j."""
    R = np.asarray(R_values, dtype=float)
    e = np.asarray(errors, dtype=float)
    octave = np.floor(np.log2(R) + 1e-9).astype(int)
    keys = sorted(set(octave.tolist()))
    return [float(e[octave == k].mean()) for k in keys]


def is_nonincreasing(values):
    v = np.asarray(values, dtype=float)
    return bool(np.all(np.diff(v) <= 0))


def grid_gap(errors_on_grid):
    """Half the largest jump of the error between neighbouring grid points.

    Added to the grid sup it gives a heuristic continuum sup (reported only).
    """
    e = np.asarray(errors_on_grid, dtype=float)
    if e.ndim == 1:
        return float(0.5 * np.max(np.abs(np.diff(e)))) if e.size > 1 else 0.0
    gaps = [np.max(np.abs(np.diff(e, axis=a))) for a in range(e.ndim) if e.shape[a] > 1]
    return float(0.5 * max(gaps)) if gaps else 0.0


@dataclass
class ConvergenceReport:
    function_id: str
    experiment: str
    engine: str
    compact_set: list
    grid_spacing: float
    grid_points: int
    R_values: list
    sup_errors: list
    threshold: float
    fitted_rate: Optional[float] = None
    verdict: str = "fail"
    argmax: list = field(default_factory=list)
    grid_gaps: list = field(default_factory=list)
    extras: dict = field(default_factory=dict)

    def __post_init__(self):
        if len(self.R_values) != len(self.sup_errors):
            raise ValueError("sup_errors must align with R_values")
        if any(b < a for a, b in zip(self.R_values, self.R_values[1:])):
            raise ValueError("R_values must be increasing")

    @property
    def final_error(self):
        return self.sup_errors[-1]

    def to_dict(self):
        return asdict(self)


def build_report(
    function_id,
    experiment,
    engine,
    compact_set,
    grid_spacing,
    R_values,
    error_grids,
    locations,
    threshold,
    extras=None,
):
    """Assemble a report from per-R arrays of pointwise error norms on the grid."""
    sup_errors, argmax, gaps = [], [], []
    pts = np.asarray(locations, dtype=float)
    for err in error_grids:
        err = np.asarray(err, dtype=float)
        flat = err.reshape(-1)
        i = int(np.argmax(flat))
        sup_errors.append(float(flat[i]))
        loc = pts.reshape(-1, pts.shape[-1])[i] if pts.ndim > 1 else pts.reshape(-1)[i : i + 1]
        argmax.append([float(v) for v in np.atleast_1d(loc)])
        gaps.append(grid_gap(err))
    verdict = "pass" if sup_errors and sup_errors[-1] <= threshold else "fail"
    return ConvergenceReport(
        function_id=function_id,
        experiment=experiment,
        engine=engine,
        compact_set=[list(map(float, iv)) for iv in compact_set],
        grid_spacing=float(grid_spacing),
        grid_points=int(np.asarray(error_grids[0]).size) if error_grids else 0,
        R_values=[float(r) for r in R_values],
        sup_errors=sup_errors,
        threshold=float(threshold),
        fitted_rate=fit_rate(R_values, sup_errors),
        verdict=verdict,
        argmax=argmax,
        grid_gaps=gaps,
        extras=dict(extras or {}),
    )


def uniform_grid(box, spacing):
    """Tensor grid over a box [(lo, hi), ...] with at most the given spacing.

    Returns (points of shape (*counts, n), actual spacing per axis).
    """
    axes = []
    steps = []
    for lo, hi in box:
        m = max(int(math.ceil((hi - lo) / spacing - 1e-9)), 1)
        axes.append(np.linspace(lo, hi, m + 1))
        steps.append((hi - lo) / m)
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack(mesh, axis=-1), steps
