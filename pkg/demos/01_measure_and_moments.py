"""
Radial moments of a Gaussian-type measure
=========================================

The measure has density ``c exp(-(x^T A x)^(p/2) / p)``.  For ``A = alpha I``
its radial moments have a closed form in terms of the Gamma function, which
makes them a convenient oracle for the quadrature layer.
"""
import numpy as np

from weighted_hardy import ProblemParams, closed_form_moment, normalization_constant, radial_integral
from weighted_hardy.quad import moment_comparison

# A moment that is finite only above the critical exponent -d/p.
d, p = 3, 2.0
print("moment beta=0 (the total mass, c=1):", closed_form_moment(d, p, 0.0, 1.0))
print("(2 pi)^(3/2)                       :", (2 * np.pi) ** 1.5)

# The same number from adaptive radial quadrature.
params = ProblemParams.isotropic(d, p)
res = radial_integral(lambda r: np.ones_like(r), d, params)
print("radial quadrature                  :", res.value, "+/-", res.error_estimate)

# Normalising to a probability measure.
print("normalisation constant c           :", normalization_constant(params))

###############################################################################
# The full comparison grid, including a strongly singular weight just above
# the critical exponent.
for d, p in [(1, 2.0), (1, 1.5), (3, 2.0)]:
    rows = moment_comparison(d, p)
    worst = max(r[4] for r in rows)
    print(f"d={d} p={p}: {len(rows)} moments, worst relative error {worst:.1e}")
