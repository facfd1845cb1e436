"""Plain Bromwich partials against their Fejer (Cesaro) means for the continuous stand-in."""

import numpy as np

from invlab import catalog as cat
from invlab.laplace import TransformHandle, bromwich_sweep_both, time_grid

F = cat.continuous_standin()
R = [64.0, 128.0, 256.0, 512.0, 1024.0]
t = time_grid(0.0, 1.0, 0.01)
truth = F.scalar_line(t)[:, 0]
plain, fejer, _, _ = bromwich_sweep_both(TransformHandle.numeric(F), 0.0, R, t)
print("R        plain      cesaro     ratio")
for r, p, c in zip(R, plain, fejer):
    ep = np.abs(p[:, 0] - truth).max()
    ec = np.abs(c[:, 0] - truth).max()
    print(f"{r:7.0f}  {ep:.3e}  {ec:.3e}  {ec / ep:.2f}")
