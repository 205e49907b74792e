"""Acceptance gates, one per criterion, each printing a pass/fail line.

Run with `pytest tests/test_acceptance.py -s` to see every line; budgets
and tolerances follow the stated gates, with a 1e-10 absolute guard
wherever a quadrature-exact estimator reports zero standard error.
"""

import math
import time

import numpy as np

from contactkit import zoo
from contactkit.chernweil import (diagonal_torus_action, even_positivity_check,
                                  moment_field, pullback_polynomial,
                                  reeb_circle_pullback, torus_shift_action)
from contactkit.flows import (birkhoff_average, integrate_flow, strictness_check)
from contactkit.hamiltonian import (bracket, bracket_hamiltonian, hamiltonian,
                                    hamiltonian_to_field)
from contactkit.integrate import contact_volume
from contactkit.prequant import (euler_number, fiber_integration_check,
                                 hopf_prequantization, lift,
                                 prequantization_relation_check,
                                 random_base_function)

GOLDEN = (1.0 + math.sqrt(5.0)) / 2.0


def check(num, label, ok, detail):
    print(f"criterion {num:2d} [{'PASS' if ok else 'FAIL'}] {label}: {detail}")
    assert ok, f"criterion {num} ({label}): {detail}"


def test_01_reeb_residuals_across_the_zoo():
    manifolds = [zoo.standard_sphere(1), zoo.standard_sphere(2), zoo.torus3(1),
                 zoo.torus3(2), zoo.torus3(3), zoo.weighted_sphere([1.0, GOLDEN]),
                 zoo.weighted_sphere([1.0, 2.0, 0.5]), zoo.unit_cotangent_sphere()]
    t0 = time.perf_counter()
    worst = 0.0
    for m in manifolds:
        pts = m.random_points(1000, np.random.default_rng(1))
        res = m.reeb_residuals(pts)
        worst = max(worst, max(float(np.max(v)) for v in res.values()))
    elapsed = time.perf_counter() - t0
    check(1, "Reeb residuals", worst <= 1e-10 and elapsed < 10.0,
          f"max residual {worst:.2e} over {len(manifolds)} manifolds, "
          f"{elapsed:.1f}s (< 10s)")


def test_02_closed_form_reeb_fields():
    worst = 0.0
    m = zoo.standard_sphere(1)
    pts = m.random_points(500, np.random.default_rng(2))
    two_iz = np.column_stack([-2.0 * pts[:, 1], 2.0 * pts[:, 0],
                              -2.0 * pts[:, 3], 2.0 * pts[:, 2]])
    worst = max(worst, float(np.max(np.abs(m.reeb_field(pts) - two_iz))))
    for n in (1, 2, 3):
        t = zoo.torus3(n)
        pts = t.random_points(500, np.random.default_rng(n))
        planar = np.column_stack([np.cos(n * pts[:, 2]), -np.sin(n * pts[:, 2]),
                                  np.zeros(len(pts))])
        worst = max(worst, float(np.max(np.abs(t.reeb_field(pts) - planar))))
    check(2, "closed-form Reeb fields", worst <= 1e-8,
          f"max deviation {worst:.2e} (sphere 2iz, torus cos/sin)")


def test_03_toric_invariant_polynomial_table():
    t0 = time.perf_counter()
    rng = np.random.default_rng(0)
    # random directions; the odd-k gate is absolute, so keep |(A,B)| = 1
    pairs = rng.normal(size=(20, 2))
    pairs /= np.linalg.norm(pairs, axis=1, keepdims=True)
    worst_rel, worst_odd = 0.0, 0.0
    for winding in (1, 2):
        action = torus_shift_action(zoo.torus3(winding))
        nodes = max(33, 2 * winding * 6 + 9)
        for a in pairs:
            square = float(a @ a)
            for k in range(1, 7):
                res = pullback_polynomial(action, [a] * k, budget=nodes ** 3)
                if k % 2:
                    worst_odd = max(worst_odd, abs(res.value))
                else:
                    l = k // 2
                    c_l = 2.0 * math.pi * math.comb(2 * l, l) / 4.0 ** l
                    expected = 4.0 * winding * math.pi ** 2 * c_l * square ** l
                    worst_rel = max(worst_rel,
                                    abs(res.value - expected) / abs(expected))
    elapsed = time.perf_counter() - t0
    check(3, "toric table", worst_rel <= 1e-10 and worst_odd <= 1e-12
          and elapsed < 30.0,
          f"even rel err {worst_rel:.2e}, odd magnitude {worst_odd:.2e}, "
          f"{elapsed:.1f}s (< 30s)")


def test_04_sphere_volume_monte_carlo():
    t0 = time.perf_counter()
    res = contact_volume(zoo.standard_sphere(1), budget=1 << 20)
    elapsed = time.perf_counter() - t0
    gap = abs(res.value - math.pi ** 2)
    ok = (res.samples >= 10 ** 6 and gap <= 3.0 * res.std_error + 1e-10
          and res.std_error / res.value <= 1e-3 and elapsed < 60.0)
    check(4, "sphere volume", ok,
          f"value {res.value:.12f} vs pi^2, gap {gap:.2e}, sigma {res.std_error:.2e}, "
          f"{res.samples} samples, {elapsed:.1f}s (< 60s)")


def test_05_constant_hamiltonian_identity():
    vol = math.pi ** 2
    worst = 0.0
    for k in (1, 2, 3, 4):
        for t in (0.0, 1.0, 2.0):
            out = reeb_circle_pullback(zoo.standard_sphere(1), k, t, budget=1 << 13)
            expected = t ** k * vol
            worst = max(worst, abs(out["raw"].value - expected)
                        / max(abs(expected), 1.0))
    check(5, "constant-Hamiltonian identity", worst <= 1e-12,
          f"max error {worst:.2e} over k <= 4, t in {{0,1,2}}")


def test_06_dirichlet_moment_oracle():
    action = diagonal_torus_action(zoo.standard_sphere(1))
    rng = np.random.default_rng(17)
    worst = 0.0
    ok = True
    for _ in range(10):
        a = action.random_element(rng)
        b = action.random_element(rng)
        res = pullback_polynomial(action, [a, b], budget=1 << 16)
        total = float(np.sum(a) * np.sum(b) + np.dot(a, b))
        oracle = math.pi ** 2 / 24.0 * total
        gap = abs(res.value - oracle)
        ok = ok and gap <= 3.0 * res.std_error + 1e-12
        worst = max(worst, gap / max(3.0 * res.std_error, 1e-300))
    check(6, "Dirichlet oracle", ok,
          f"10 random diagonal pairs, worst gap/3sigma {worst:.2f}")


def test_07_fiber_integration_constant():
    details = []
    ok = True
    for scale, period in ((1.0, math.pi), (2.0, 2.0 * math.pi)):
        preq = hopf_prequantization(scale=scale)
        c, dispersion = fiber_integration_check(preq, trials=20, budget=1 << 15)
        sigma = abs(c) * dispersion / math.sqrt(20) + 1e-12
        ok = ok and dispersion <= 1e-3 and abs(c - period) <= 3.0 * sigma
        details.append(f"C {c:.6f} (target {period:.6f}), dispersion {dispersion:.1e}")
    check(7, "fiber integration", ok, "; ".join(details))


def test_08_prequantization_relation():
    preq = hopf_prequantization(scale=2.0)
    height = moment_field(diagonal_torus_action(preq.total),
                          np.array([1.0, -1.0]), name="height")
    ok = True
    worst = 0.0
    for i in range(5):
        poly_a = lift(preq, random_base_function(100 + i))
        poly_b = lift(preq, random_base_function(200 + i))
        for hams in ([height, poly_a], [height, poly_a, poly_b]):
            out = prequantization_relation_check(preq, hams, budget=1 << 15,
                                                 seed=i,
                                                 fiber_constant=2.0 * math.pi)
            ok = ok and out["residual"] <= out["three_sigma"]
            worst = max(worst, out["residual"] / out["three_sigma"])
    check(8, "prequantization relation", ok,
          f"k=2,3 on 5 tuples each, worst residual/3sigma {worst:.2f}")


def test_09_normalized_euler_number():
    out = euler_number(hopf_prequantization(scale=2.0))
    gap = abs(out["value"] - 1.0)
    check(9, "Euler number", gap <= 1e-3,
          f"value {out['value']:.12f}, defect {gap:.2e}")


def test_10_positivity_suite():
    ok = True
    margins = []
    for action in (diagonal_torus_action(zoo.standard_sphere(1)),
                   torus_shift_action(zoo.torus3(1))):
        rng = np.random.default_rng(4)
        for _ in range(20):
            res = even_positivity_check(action, action.random_element(rng), 1,
                                        budget=1 << 13)
            margin = res.value - 3.0 * res.std_error
            ok = ok and margin > 0.0
            margins.append(margin)
    check(10, "positivity suite", ok,
          f"40 generators (20 per manifold), min value-3sigma {min(margins):.3e}")


def _sphere_quadratic(m, rng):
    A = rng.normal(size=(4, 4))
    A = A + A.T
    return hamiltonian(m, lambda c, A=A: sum(
        A[i][j] * c[i] * c[j] for i in range(4) for j in range(4)))


def _torus_trig(m, rng):
    a = rng.normal(size=6)
    return hamiltonian(m, lambda c, a=a: (
        a[0] * np.cos(c[0]) + a[1] * np.sin(c[0]) + a[2] * np.cos(c[1])
        + a[3] * np.sin(c[1]) + a[4] * np.cos(c[2]) + a[5] * np.sin(c[2])))


def test_11_hamiltonian_algebra_properties():
    sphere, torus = zoo.standard_sphere(1), zoo.torus3(1)
    rng = np.random.default_rng(5)
    anti = jacobi = roundtrip = 0.0
    for i in range(100):
        m, make = (sphere, _sphere_quadratic) if i % 2 else (torus, _torus_trig)
        h, g, k = (make(m, rng) for _ in range(3))
        pts = m.random_points(10, rng)
        anti = max(anti, float(np.max(np.abs(
            bracket(h, g, pts) + bracket(g, h, pts)))))
        x = hamiltonian_to_field(h, pts)
        roundtrip = max(roundtrip, float(np.max(np.abs(
            m.form(pts, x) - h.values(pts)))))
        s = bracket_hamiltonian(bracket_hamiltonian(h, g), k).values(pts)
        s = s + bracket_hamiltonian(bracket_hamiltonian(g, k), h).values(pts)
        s = s + bracket_hamiltonian(bracket_hamiltonian(k, h), g).values(pts)
        jacobi = max(jacobi, float(np.max(np.abs(s))))
    ok = anti <= 1e-8 and jacobi <= 1e-6 and roundtrip <= 1e-8
    check(11, "Hamiltonian algebra", ok,
          f"100 random triples: antisymmetry {anti:.2e}, Jacobi {jacobi:.2e}, "
          f"roundtrip {roundtrip:.2e}")


def test_12_dynamics_suite():
    t0 = time.perf_counter()
    sphere = zoo.standard_sphere(1)
    start = np.array([1.0, 0.0, 0.0, 0.0])
    traj = integrate_flow(sphere, None, start, math.pi, tol=1e-9)
    hopf_return = float(np.linalg.norm(traj.points[-1] - start))

    golden = zoo.weighted_sphere([1.0, GOLDEN])
    field = lambda pts: zoo.weighted_reeb_closed_form(golden, pts)
    g_start = golden.random_points(1, np.random.default_rng(0))[0]
    g_traj = integrate_flow(golden, field, g_start, 500.0, tol=1e-9, max_step=0.05)
    avg = birkhoff_average(g_traj, lambda p: p[:, 0] * p[:, 2] + p[:, 1] * p[:, 3])
    birkhoff = abs(float(avg[-1]))

    strict = max(strictness_check(m, None, 1.0, samples=10, seed=1, steps=512)
                 for m in (sphere, zoo.torus3(1), golden))
    elapsed = time.perf_counter() - t0
    ok = (hopf_return <= 1e-6 and birkhoff <= 0.02 and strict <= 1e-7
          and elapsed < 120.0)
    check(12, "dynamics suite", ok,
          f"Hopf return {hopf_return:.2e}, |Birkhoff avg(T=500)| {birkhoff:.2e}, "
          f"strictness {strict:.2e}, {elapsed:.1f}s (< 120s)")
