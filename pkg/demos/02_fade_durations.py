"""
Distribution and fade duration
==============================

The amplitude CDF of the cascade is the CDF of a product of unit
exponentials evaluated at ``y**2 / phi``; dividing it by the crossing rate
gives the average fade duration.
"""

# %%
import math

import numpy as np

from cascade_lcr import CascadeSpec, cdf_product_rayleigh, laplace_afd, product_exp_cdf
from cascade_lcr.specialfn import dual_product_exp_cdf_closed

# The two-factor case has a Bessel closed form to compare against.
for z in (0.01, 0.1, 1.0, 5.0):
    print(f"z={z:5}: {product_exp_cdf(z, 2):.12f}  closed form {dual_product_exp_cdf_closed(z):.12f}")

# %%
# More factors push probability mass towards small products.
for n in (1, 2, 3, 5):
    print(n, [round(product_exp_cdf(z, n), 4) for z in (0.1, 0.5, 1.0, 2.0)])

# %%
# Fade durations along a three-hop cascade with unequal hop powers.
c = CascadeSpec.simple([0.5, 1.0, 2.0], [10.0, 20.0, 5.0])
y = math.sqrt(math.sqrt(c.phi)) * 10 ** (np.arange(-20, 6, 5) / 20)
for v, cdf, afd in zip(y, cdf_product_rayleigh(y, c), laplace_afd(c, y)):
    print(f"y={v:.3f}  P(Y<y)={cdf:.4f}  AFD={afd * 1e3:.2f} ms")
