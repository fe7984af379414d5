"""
A generic Laplace engine
========================

``generic_laplace_approx`` locates the minimum of an exponent numerically,
differentiates it by finite differences and applies the multivariate
Laplace formula.  It reproduces the closed-form crossing rate.
"""

# %%
import math

import numpy as np

from cascade_lcr import CascadeSpec, LaplaceProblem, generic_laplace_approx, laplace_lcr
from cascade_lcr.analytic import lcr_laplace_problem

# Gaussian integrals are reproduced exactly.
r = generic_laplace_approx(LaplaceProblem(2, lambda x: 1.0, lambda x: float(x @ x), 4.0, "real"), [0.3, 0.1])
print(r.approx_value, math.pi / 4)

# %%
c = CascadeSpec.simple([0.5, 1.0, 2.0], [1.0, 2.0, 3.0])
prob, prefactor = lcr_laplace_problem(c, 0.6)
r = generic_laplace_approx(prob, np.ones(2))
print("critical point", r.critical_point, "Hessian\n", r.hessian.round(5))
print("engine:", prefactor * r.approx_value, " closed form:", laplace_lcr(c, 0.6))
