"""
Which directions can carry a metric discontinuity
=================================================

For a gravity theory, a discontinuity in the second metric derivative
across a surface with normal phi must sit in the kernel of a linear
operator built from phi (field equations plus harmonic-gauge rows).
Surveying random normals shows the null cone is exactly the set of
directions with a nonempty kernel for the Einstein and quadratic
actions, while f(R) keeps a reduced kernel off the cone.
"""

import numpy as np

from cewave.gravity import (
    KernelReport,
    einstein_operator,
    einstein_trace_coeff,
    kernel_survey,
    random_nonnull_covector,
    random_null_covector,
)

rng = np.random.default_rng(11)

for theory, kw in (("einstein", {}),
                   ("quadratic", {"p": 1.0, "q": 0.3}),
                   ("quadratic", {"p": 3.0, "q": 1.0}),
                   ("fr", {"f2": 1.0})):
    out = kernel_survey(theory, 4, 100, rng, **kw)
    tag = theory + (f" p={kw['p']:g} q={kw['q']:g}" if "p" in kw else "")
    print(f"{tag:22s} null {out['null_kernel_dims']} "
          f"non-null {out['nonnull_kernel_dims']}")

# Note the quadratic action with p = 3q: one non-null direction
# survives, the trace-sector mode pi = phi(x)phi + (Q/2) g.

# A single probe in detail: the singular spectrum shows the kernel
# split cleanly from the rest.
phi = random_null_covector(rng, 4)
report = KernelReport.from_operator(einstein_operator(phi), phi)
print("null direction kernel:", report.kernel_dim,
      "smallest singular values:",
      np.round(report.singular_values[-3:], 14))

phi = random_nonnull_covector(rng, 4)
report = KernelReport.from_operator(einstein_operator(phi), phi)
print("non-null direction kernel:", report.kernel_dim)

# The trace of the assembled discontinuity is proportional to Q times
# the trace of pi; the coefficient grows linearly with dimension.
for D in (4, 5, 6, 7):
    print(f"D={D}: trace coefficient {einstein_trace_coeff(D)}")
