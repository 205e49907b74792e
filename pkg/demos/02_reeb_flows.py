"""Integrate Reeb flows and compare against what the geometry promises.

Three experiments:
  * the round 3-sphere, whose Reeb orbits are great circles of period pi
    (the fibers of the circle fibration), so the flow must return;
  * the flat 3-torus, where the Reeb field translates at unit speed in a
    plane selected by the t coordinate;
  * a weighted ellipsoid, where the flow has an exact closed form that
    the adaptive integrator should track to high accuracy.
"""

import math

import numpy as np

from contactkit import (integrate_flow, standard_sphere, torus3,
                        weighted_flow_closed_form, weighted_sphere)

sphere = standard_sphere(1)
start = np.array([1.0, 0.0, 0.0, 0.0])
traj = integrate_flow(sphere, None, start, math.pi, tol=1e-10)
gap = float(np.linalg.norm(traj.points[-1] - start))
print(f"sphere: after time pi the orbit is back within {gap:.2e} "
      f"({len(traj.times)} accepted steps)")

torus = torus3(1)
t_start = np.array([0.3, 1.1, 2.0])
t_traj = integrate_flow(torus, None, t_start, 5.0, tol=1e-10)
drift = float(np.max(np.abs(t_traj.points[:, 2] - t_start[2])))
print(f"torus:  t stays frozen along the flow (max drift {drift:.2e}); "
      f"the orbit translates in the (x, y) plane")

m = weighted_sphere([1.0, 2.0])
w_start = m.random_points(1, np.random.default_rng(3))[0]
T = 4.0
w_traj = integrate_flow(m, None, w_start, T, tol=1e-10)
exact = weighted_flow_closed_form(m, w_start, np.array([T]))[0]
err = float(np.linalg.norm(w_traj.points[-1] - exact))
print(f"weighted ellipsoid: integrator vs closed form at T={T}: {err:.2e}")
