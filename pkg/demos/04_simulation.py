"""
Sum-of-sinusoids simulation
===========================

Each hop is simulated as a sum of sinusoids whose frequencies follow the
hop's Doppler spectrum.  Counting downward crossings of the product trace
gives an estimate to compare with the exact integral.
"""

# %%
import numpy as np

from cascade_lcr import CascadeSpec, ThresholdGrid, exact_lcr, laplace_lcr
from cascade_lcr.simulator import TraceSpec, cascade_trace, estimate_lcr_afd

c = CascadeSpec.from_nodes([1.0, 1.0], [1.0, 1.0, 0.0])  # mobile source and relay, fixed receiver
trace = cascade_trace(c, TraceSpec(duration=3000.0, seed=0))
print(f"{len(trace.samples)} samples at {trace.sample_rate:g} Hz; mean power {trace.mean_power():.4f}")

# %%
grid = ThresholdGrid.from_db(-25, 5, 5)
est = estimate_lcr_afd(trace, grid)
ex = np.array([exact_lcr(c, v) for v in grid.values])
lap = laplace_lcr(c, grid.values)
print("  dB   simulated (+-se)      exact   laplace")
for d, s, se, e, l in zip(grid.db, est.lcr, est.lcr_se, ex, lap):
    print(f"{d:5.0f}  {s:7.4f} (+-{se:.4f})  {e:7.4f}  {l:7.4f}")

# %%
# The estimator's fade durations multiply back to the fraction of time below.
print(np.allclose(est.afd * est.lcr, est.cdf))
