"""The 3-sphere as a circle bundle over the 2-sphere.

The Hopf map presents the round contact 3-sphere as a prequantization:
d(alpha) is the pullback of a multiple of the base area form, Reeb
orbits are the fibers, and integrals over the total space factor as a
fiber length times a base integral.  With the standard form the fiber
period is pi; rescaling by 2 normalizes it to 2 pi, and then the total
curvature divided by 2 pi is the Euler number of the bundle, which must
be the integer 1 for the Hopf fibration.
"""

import math

import numpy as np

from contactkit import (diagonal_torus_action, euler_number,
                        fiber_integration_check, hopf_prequantization, lift,
                        moment_field, prequantization_relation_check,
                        random_base_function)

for scale in (1.0, 2.0):
    preq = hopf_prequantization(scale=scale)
    print(f"form scale {scale:g}: curvature fit dispersion "
          f"{preq.curvature_dispersion:.1e}, total curvature "
          f"{preq.omega_total / math.pi:.6f} pi, fiber period "
          f"{preq.fiber_period / math.pi:.6f} pi")
    c, disp = fiber_integration_check(preq, trials=10, budget=1 << 14)
    print(f"  fiber constant from 10 random functions: {c:.6f} "
          f"(dispersion {disp:.1e})")
    e = euler_number(preq)
    note = "" if e["warning"] is None else "  <- " + e["warning"]
    print(f"  Euler number: {e['value']:.12f}{note}")

preq = hopf_prequantization(scale=2.0)
height = moment_field(diagonal_torus_action(preq.total),
                      np.array([1.0, -1.0]), name="height")
poly = lift(preq, random_base_function(21))
out = prequantization_relation_check(preq, [height, poly], budget=1 << 15,
                                     fiber_constant=2.0 * math.pi)
print(f"\nk=2 relation between base and total-space integrals:")
print(f"  lhs {out['lhs']:.8f}  rhs {out['rhs']:.8f}  "
      f"residual {out['residual']:.2e} (3 sigma budget {out['three_sigma']:.2e})")
