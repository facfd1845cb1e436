"""Bromwich sup errors for the damped Weierstrass function, split into t = 0 and the rest of [0, 1]."""

import numpy as np

from invlab import catalog as cat
from invlab.laplace import TransformHandle, bromwich_sweep, time_grid
from invlab.reports import octave_means

F = cat.weierstrass_damped()
R = [2.0**j for j in range(4, 13)]
t = time_grid(0.0, 1.0, 0.01)
truth = F.scalar_line(t)[:, 0]
vals, _ = bromwich_sweep(TransformHandle.for_function(F), 0.0, R, t)
err = np.abs(vals[:, :, 0] - truth[None])
print("R        sup[0,1]   at t=0     sup(0,1]   sqrt(R)*sup")
for r, e in zip(R, err):
    print(f"{r:7.0f}  {e.max():.3e}  {e[0]:.3e}  {e[1:].max():.3e}  {np.sqrt(r) * e.max():.3f}")
print("octave means:", [f"{m:.3e}" for m in octave_means(R, err.max(axis=1))])
