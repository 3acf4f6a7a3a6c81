"""
Critical self-averaging time
============================

"""

# t_c solves <x^2>/<x>^2 = N + 1. It falls with r while r < mu, rises for
# mu < r < 2 mu + sigma2 and becomes infinite once the limiting ratio stays
# below N + 1.
import numpy as np

from srgbm import ModelParams
from srgbm import analytics as an

base = ModelParams(mu=0.02, sigma2=0.01, r=0.0)
for n in (100, 10_000):
    row = []
    for r in np.arange(0.0, 0.06, 0.005):
        tc = an.critical_time(base.replace(r=float(r)), n)
        row.append(f"{tc.t_c:8.1f}" if tc.finite else "   never")
    print(f"N={n:<6}", " ".join(row))

# The minimizing rate drifts toward mu as N grows.
for n in (10, 1000, 10**6):
    print("N =", n, " r* =", round(an.optimal_reset_rate(base, n), 5))

# Above 2 mu + sigma2 a finite sample of at least this size self-averages forever.
print("N_min at r=0.051:", an.min_self_averaging_sample(base.replace(r=0.051)))
