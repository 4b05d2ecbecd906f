"""
Wave steepening, shock formation, and the exceptional contrast
==============================================================

Burgers' equation steepens a sine wave until characteristics cross at
t = 1.  An exceptional model run through the same machinery never
steepens: its simple-wave speed is constant in the wave parameter.
"""

import numpy as np

from cewave.lagrangians import builtin, from_expression
from cewave.rays import crossing_time
from cewave.shock1d import (
    Profile1D,
    moc_solve,
    moc_upwind_l1,
    scalar_reduced_factory,
    shock_time,
    simple_wave_construct,
    upwind_solve,
)

profile = Profile1D.from_callable(np.sin, 0.0, 2.0 * np.pi, n=401,
                                  periodic=True)

# Two independent estimates of the breaking time.
t_slope = shock_time(lambda u: u, profile)
t_cross = crossing_time(profile.u, profile.x)
print(f"breaking time: slope route {t_slope:.6f}, "
      f"characteristics route {t_cross:.6f}")

# The characteristic map is single-valued before breaking, folded after.
for t in (0.5, 1.5):
    sol = moc_solve(lambda u: u, profile, t)
    print(f"t={t}: multivalued={sol.multivalued}")

# A first-order Godunov solve stays close to the exact characteristic
# solution while the solution is smooth.
snap = upwind_solve(lambda u: 0.5 * u * u, profile, t=0.5, nx=800)
err = moc_upwind_l1(moc_solve(lambda u: u, profile, 0.5), snap)
print(f"upwind vs characteristics, L1 at t=0.5: {err:.6f} "
      f"({snap.u.size} cells)")

# Exceptional contrast: the scalar square-root model's simple wave has
# constant speed, the quadratic model's does not.
for label, model in (("scalar-bi", builtin("scalar-bi")),
                     ("z^2", from_expression("z^2", "scalar"))):
    wave = simple_wave_construct(scalar_reduced_factory(model), 0,
                                 (0.1, 0.6), [0.3, 0.1])
    print(f"{label}: speed variation across the wave "
          f"{wave.lam_variation():.3e}")
