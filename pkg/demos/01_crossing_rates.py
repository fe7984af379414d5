"""
Crossing rates of a relay cascade
=================================

Three ways to get the level crossing rate of a product of Rayleigh
envelopes: the closed-form Laplace approximation, the exact integral, and
(for one hop) the classical Rayleigh formula.
"""

# %%
# A single hop first.  With one hop the approximation has nothing to
# approximate and must coincide with the Rayleigh result.
import numpy as np

from cascade_lcr import CascadeSpec, exact_lcr, laplace_lcr, rayleigh_lcr

one = CascadeSpec.simple([1.0], 10.0)  # unit power, 10 Hz Doppler
print("Rayleigh:", rayleigh_lcr(1.0, 10.0, 1.0), " Laplace:", laplace_lcr(one, 1.0))

# %%
# Two and three unit-power hops.  Thresholds are in dB relative to the
# first hop's mean power.
db = np.arange(-30.0, 10.1, 5.0)
y = 10 ** (db / 20)
for n in (2, 3):
    c = CascadeSpec.simple([1.0] * n, 1.0)
    ex = np.array([exact_lcr(c, v) for v in y])
    lap = laplace_lcr(c, y)
    print(f"\nN = {n}")
    print("  dB     exact    laplace   laplace/exact")
    for d, a, b in zip(db, ex, lap):
        print(f"{d:5.0f}  {a:8.4f}  {b:8.4f}  {b / a:8.3f}")

# %%
# The approximation sits below the exact value for deep fades and is
# tight near and above the peak of the curve.
