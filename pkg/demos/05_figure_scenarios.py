"""
Published figure scenarios
==========================

A source, four semi-blind relays and a fixed destination.  Curves are
taken at relay T2 (N = 2), relay T3 (N = 3) and the destination (N = 5).
The same files come out of ``cascade-lcr figure <id> --out DIR``.
"""

# %%
import tempfile

from cascade_lcr.cli import cmd_figure
from cascade_lcr.csvio import read_curve_csv

out = tempfile.mkdtemp()
paths = cmd_figure(4, out, seed=0)  # LCR, 20 dB per hop
for p in paths:
    cols = read_curve_csv(p)
    lap = [v for v, m in zip(cols["lcr_normalized"], cols["method"]) if m == "laplace"]
    sim = [v for v, m in zip(cols["lcr_normalized"], cols["method"]) if m == "simulated"]
    db = cols["threshold_db"][: len(lap)]
    print(p)
    for i in range(0, len(db), 10):
        print(f"  {db[i]:6.1f} dB  laplace {lap[i]:.4f}  simulated {sim[i]:.4f}")
