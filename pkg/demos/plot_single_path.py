"""
A single reset trajectory
=========================

"""

# One Euler path of GBM that jumps back to x0 at Poisson times, next to the
# renewal solution x0 * exp(a (t - t_l) + sigma (W(t) - W(t_l))) fed the same
# Wiener increments.
import numpy as np

from srgbm import ModelParams, RngStream, SimGrid, simulate_euler
from srgbm.harness import svg
from srgbm.harness.experiments import renewal_path

params = ModelParams(mu=0.05, sigma2=0.02, r=0.16)
grid = SimGrid.from_horizon(100.0, 0.01)
path = simulate_euler(params, grid, RngStream(1), keep_noise=True)
renewal = renewal_path(params, grid.dt, path.noise, path.reset_steps)

# Resets land exactly on x0 in both columns; between resets the two curves
# differ only by the O(dt) Euler error.
print("resets:", len(path.reset_steps), "expected about", params.r * grid.horizon)
print("max relative gap:", np.max(np.abs(path.positions / renewal - 1)))

svg.line_chart("single_path.svg", [("Euler", path.times, path.positions), ("renewal", path.times, renewal)],
               title="reset GBM, one path", xlabel="t", ylabel="x(t)")
