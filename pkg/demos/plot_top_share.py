"""
Share held by the top one percent
=================================

"""

# Fraction of the total held by the largest 1% of N = 1000 walkers. Frozen
# samples concentrate on a few walkers, stable ones stay spread out.
import numpy as np

from srgbm import ModelParams, SimGrid, generate_ensemble
from srgbm.ensemble import top_share_series
from srgbm.harness import svg

base = ModelParams(mu=0.02, sigma2=0.01, r=0.0)
grid = SimGrid.from_horizon(300.0, 0.01)
series = []
for r in (0.01, 0.03, 0.08):
    ens = generate_ensemble(base.replace(r=r), grid, 1000, master_seed=5, stride=100)
    share = top_share_series(np.vstack([tr.positions for tr in ens]))
    print(f"r={r}: share at end {share[-1]:.3f}, max {share.max():.3f}")
    series.append((f"r={r}", ens[0].times, share))

svg.line_chart("top_share.svg", series, title="top 1% share", xlabel="t", ylabel="P_top")
