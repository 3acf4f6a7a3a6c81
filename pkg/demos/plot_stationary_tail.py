"""
Power-law tail of the steady state
==================================

"""

# With resetting the position settles into a two-sided power law around x0.
# The right tail decays as x^(-alpha-1), alpha the positive root of
# (sigma2/2) z^2 + (mu - sigma2/2) z - r = 0.
import numpy as np

from srgbm import ModelParams, RngStream, sample_position_exact
from srgbm import analytics as an
from srgbm.harness import svg

p = ModelParams(mu=0.02, sigma2=0.01, r=0.1)
law = an.stationary_law(p)
print("alpha =", law.alpha, " left exponent =", law.left_exponent)

# Long-time draws from the exact sampler; compare a log-binned histogram
# with the closed-form density.
x = sample_position_exact(p, 500.0, RngStream(3), size=200_000)
edges = np.geomspace(0.05, 50.0, 41)
counts, _ = np.histogram(x, bins=edges)
centers = np.sqrt(edges[:-1] * edges[1:])
hist = counts / (x.size * np.diff(edges))
keep = counts > 0

svg.line_chart("stationary_tail.svg",
               [("samples", centers[keep], hist[keep]), ("density", centers, an.stationary_pdf(p, centers))],
               title="steady state", xlabel="x", ylabel="p(x)", logx=True, logy=True)
