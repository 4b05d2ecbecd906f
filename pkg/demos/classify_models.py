"""
Classifying field models by shock behavior
==========================================

A model is completely exceptional when every wave mode keeps its speed
constant along the wave, so smooth initial data never steepens into a
shock.  For electrodynamics-type models this reduces to two residuals
that must vanish on a grid of invariant values; for scalar models it is
a single third-order condition.
"""

import numpy as np

from cewave.ce import GridSpec, classify, scalar_ce_residual
from cewave.lagrangians import builtin, from_expression

# The builtin catalogue covers the classical exceptional models and two
# deliberate non-examples.
for name in ("maxwell", "born-infeld", "alpha-over-beta",
             "scalar-maxwell", "scalar-bi"):
    report = classify(builtin(name))
    print(f"{name:16s} {report.label:12s} max residual "
          f"{report.max_residual:.3e}")

# An expression that is not exceptional: the quadratic scalar model.
square = from_expression("z^2", "scalar")
report = classify(square)
print(f"{'z^2':16s} {report.label:12s} max residual "
      f"{report.max_residual:.3e}")

# The grid is adjustable.  A coarse pass over a narrow window is enough
# to flag the quadratic model.
report = classify(square, grid=GridSpec({"z": (-0.1, 0.1, 5)}))
print(f"narrow window    {report.label:12s} counts {report.counts}")

# The scalar condition itself is available pointwise.  The square-root
# family k + sqrt(d + c z) satisfies it identically in z.
model = builtin("sqrt-family", [0.3, 1.5, 0.8])
worst = max(scalar_ce_residual(model.jet_at(model.point(z)))
            for z in np.linspace(-0.4, 0.4, 9))
print(f"{model.name}: pointwise residual {worst:.3e}")
