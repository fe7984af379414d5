"""
Semi-blind relays
=================

A semi-blind relay uses a fixed gain chosen so that its average power draw
matches a relay that knows the instantaneous channel.  The gain depends on
the mean SNR of the hop feeding it.
"""

# %%
from cascade_lcr import CascadeSpec, SemiBlind, Unity, scenario_phi, semi_blind_gain

for snr_db in (0, 5, 10, 20, 30):
    g = semi_blind_gain(10 ** (snr_db / 10), 1.0)
    print(f"{snr_db:3d} dB  G = {g:.4f}  G^2 = {g * g:.4f}")

# %%
# Five hops at 5 dB each.  The cascade object derives the effective hop
# powers, and the scale parameter agrees with the scenario formula.
c = CascadeSpec.from_nodes([1.0] * 5, [1.0] * 5 + [0.0], [Unity()] + [SemiBlind()] * 4, [5.0] * 5)
print("effective powers:", c.omegas.round(4))
print("phi:", c.phi, " formula:", scenario_phi("equal-snr", 1.0, [10**0.5] * 5, n_hops=5))

# %%
# The signal seen at relay k is the prefix cascade of the first k hops.
for k in (2, 3, 5):
    print(k, "hops: phi =", round(c.prefix(k).phi, 4))
