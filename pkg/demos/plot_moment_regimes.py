"""
Moments and the three regimes
=============================

"""

# The m-th moment grows like exp((r_m - r) t) when r is below
# r_m = m mu + m (m-1) sigma2 / 2, linearly at r = r_m and converges above it.
# With mu = 0.02, sigma2 = 0.01 the thresholds are r_1 = 0.02 and r_2 = 0.05.
from srgbm import ModelParams
from srgbm import analytics as an

base = ModelParams(mu=0.02, sigma2=0.01, r=0.0)
for r in (0.01, 0.02, 0.03, 0.05, 0.08):
    p = base.replace(r=r)
    tag = an.classify_regime(p).tag.value
    first = an.moment_behavior(p, 1)
    second = an.moment_behavior(p, 2)
    print(f"r={r:<5} {tag:<17} m=1 {first[0]:<12} {first[1]:.4g}   m=2 {second[0]:<12} {second[1]:.4g}")

# Above r_m the moment settles to x0^m r / (r - r_m).
p = base.replace(r=0.08)
for t in (10.0, 100.0, 1000.0):
    print(f"t={t:<7} <x>={an.moment(p, 1, t):.6f}  <x^2>={an.moment(p, 2, t):.6f}")
