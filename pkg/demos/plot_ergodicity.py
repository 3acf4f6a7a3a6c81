"""
Sample average versus resetting rate
====================================

"""

# A finite sample of N walkers behaves like the ensemble only up to a
# critical time. At fixed horizon, small samples sit near the typical (time
# average) value while large samples approach r/(r - mu).
from dataclasses import replace

from srgbm.harness.config import default_config
from srgbm.harness.experiments import run

cfg = replace(default_config("ergodicity-sweep"), r_list=(0.0, 0.01, 0.03, 0.05, 0.08), realizations=21).validate()
table = run(cfg)["ergodicity-sweep"]
for r, n, med, ens, typical in table.rows:
    print(f"r={r:<5} N={n:<6} median={med:10.4g}  ensemble={ens:10.4g}  typical={typical:.4g}")
