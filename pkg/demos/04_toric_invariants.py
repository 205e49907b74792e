"""Invariant polynomials of torus actions, against closed-form answers.

On the 3-torus with winding n, the shift action has moment map
A cos(nt) - B sin(nt), and the k-th pullback power integrates to
4 n pi^2 (2 pi binom(2l, l) / 4^l) (A^2 + B^2)^l for k = 2l, and to
zero for odd k.  On the 3-sphere, the diagonal torus action produces
monomials in |z0|^2, |z1|^2 whose integrals reduce to simplex moments.
Even powers of any nonzero moment certify their own positivity.
"""

import math

import numpy as np

from contactkit import (diagonal_torus_action, even_positivity_check,
                        pullback_polynomial, standard_sphere, torus3,
                        torus_shift_action)

action = torus_shift_action(torus3(2))
a = np.array([0.6, -0.8])
print("shift action on torus3(winding=2), element (0.6, -0.8):")
print(f"  {'k':>2s} {'integral':>22s} {'closed form':>22s}")
for k in range(1, 7):
    res = pullback_polynomial(action, [a] * k, budget=33 ** 3)
    if k % 2:
        expected = 0.0
    else:
        l = k // 2
        c_l = 2.0 * math.pi * math.comb(2 * l, l) / 4.0 ** l
        expected = 4.0 * 2 * math.pi ** 2 * c_l * float(a @ a) ** l
    print(f"  {k:2d} {res.value:22.15f} {expected:22.15f}")

sphere = standard_sphere(1)
diag = diagonal_torus_action(sphere)
rng = np.random.default_rng(7)
b, c = diag.random_element(rng), diag.random_element(rng)
res = pullback_polynomial(diag, [b, c], budget=1 << 16)
total = float(np.sum(b) * np.sum(c) + np.dot(b, c))
oracle = math.pi ** 2 / 24.0 * total
print(f"\ndiagonal action on the 3-sphere, random pair:")
print(f"  I_2 = {res.value:.8f} +- {res.std_error:.1e}, "
      f"simplex-moment value {oracle:.8f}")

pos = even_positivity_check(diag, b, 1, budget=1 << 14)
print(f"  positivity of the square: value {pos.value:.6f}, "
      f"value - 3 sigma = {pos.value - 3 * pos.std_error:.6f} > 0")
