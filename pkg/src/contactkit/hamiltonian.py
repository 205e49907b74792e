"""The contact-Hamiltonian correspondence, bracket, and adjoint action.

A contact vector field X determines the Hamiltonian H = alpha(X); the
inverse direction solves i_X alpha = H, i_X dalpha = -dH + (i_R dH) alpha
pointwise in the tangent frame.  The bracket

    [H1, H2] = dH1(R) H2 - dH2(X1)

makes the correspondence a Lie algebra map onto contact fields with
minus the standard vector-field bracket.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from .dual import Dual, epsilon, value
from .fields import ScalarField
from .manifold import (
    ContactManifold,
    GeometryError,
    hamiltonian_field_with_derivative,
    reeb_with_derivative,
)

REEB_INVARIANCE_TOL = 1e-8
FIELD_SOLVE_TOL = 1e-9


@dataclass(frozen=True)
class Hamiltonian:
    """A scalar function on a contact manifold, optionally tagged as
    invariant under the Reeb flow (the strict-contactomorphism algebra)."""

    field: ScalarField
    manifold: ContactManifold
    reeb_invariant: Optional[bool] = None
    name: str = ""

    def __call__(self, pts):
        return self.field(pts)

    def values(self, pts) -> np.ndarray:
        return np.asarray(self.field(pts), dtype=float)

    def tagged(self, samples: int = 1000, seed: int = 0) -> "Hamiltonian":
        """Copy with the invariance flag resolved by sampling."""
        flag, _ = is_reeb_invariant(self, samples=samples, seed=seed)
        return replace(self, reeb_invariant=flag)


def hamiltonian(m: ContactManifold, fn, name: str = "",
                reeb_invariant: Optional[bool] = None) -> Hamiltonian:
    """Wrap a coordinate function (or ScalarField) as a Hamiltonian on m."""
    field = fn if isinstance(fn, ScalarField) else ScalarField(fn, m.ambient_dim, name)
    return Hamiltonian(field, m, reeb_invariant, name or field.name)


def constant_hamiltonian(m: ContactManifold, c: float) -> Hamiltonian:
    cc = float(c)
    return hamiltonian(m, lambda coords: 0.0 * coords[0] + cc,
                       name=f"const({cc:g})", reeb_invariant=True)


def field_to_hamiltonian(m: ContactManifold, x, name: str = "") -> Hamiltonian:
    """The Hamiltonian alpha(X) of a vector field tangent to m."""
    comp = x.comp_fn if hasattr(x, "comp_fn") else x

    def fn(coords):
        coefs = m.form.coef_fn(coords)
        comps = comp(coords)
        total = coefs[0] * comps[0]
        for a in range(1, m.ambient_dim):
            total = total + coefs[a] * comps[a]
        return total

    return hamiltonian(m, fn, name=name or "alpha(X)")


def hamiltonian_to_field(h: Hamiltonian, pts, tol: float = FIELD_SOLVE_TOL):
    """The contact vector field of h at pts, shape matching the input.

    Least-squares solve in the orthonormal tangent frame of the stacked
    equations alpha(X) = H and dalpha(X, e_j) = -dH(e_j) + dH(R) alpha(e_j);
    the residual must stay below tol.
    """
    m = h.manifold
    pts_arr = np.asarray(pts, dtype=float)
    scalar = pts_arr.ndim == 1
    q = np.atleast_2d(pts_arr)
    frame = m.tangent_frame(q)
    n_pts, k, d = frame.shape

    coefs = m.form.coefficients(q)
    a = np.einsum("nja,na->nj", frame, coefs)
    dmat = m.form.dmatrix(q, frame)
    hvals = np.asarray(h.field(q), dtype=float)
    if hvals.ndim == 0:
        hvals = np.full(n_pts, float(hvals))
    dh_frame = np.stack([h.field.directional(q, frame[:, j, :]) for j in range(k)],
                        axis=1)
    reeb = m.reeb_field(q)
    dh_reeb = np.asarray(h.field.directional(q, reeb), dtype=float)

    system = np.empty((n_pts, k + 1, k))
    system[:, 0, :] = a
    system[:, 1:, :] = np.swapaxes(dmat, 1, 2)
    rhs = np.empty((n_pts, k + 1))
    rhs[:, 0] = hvals
    rhs[:, 1:] = -dh_frame + dh_reeb[:, None] * a
    sol = np.linalg.pinv(system) @ rhs[..., None]
    residual = np.max(np.abs(system @ sol - rhs[..., None]))
    if residual > tol:
        raise GeometryError(
            f"contact field solve residual {residual:.3e} exceeds {tol:.0e}")
    out = np.einsum("nj,nja->na", sol[..., 0], frame)
    return out[0] if scalar else out


def is_reeb_invariant(h: Hamiltonian, samples: int = 1000, seed: int = 0,
                      tol: float = REEB_INVARIANCE_TOL) -> tuple:
    """(flag, max |dH(R)|) over sampled points."""
    m = h.manifold
    rng = np.random.default_rng(seed)
    pts = m.random_points(samples, rng)
    reeb = m.reeb_field(pts)
    defect = float(np.max(np.abs(h.field.directional(pts, reeb))))
    return defect <= tol, defect


def bracket(h1: Hamiltonian, h2: Hamiltonian, pts) -> np.ndarray:
    """The contact bracket dH1(R) H2 - dH2(X1) evaluated at pts."""
    m = h1.manifold
    pts_arr = np.asarray(pts, dtype=float)
    scalar = pts_arr.ndim == 1
    q = np.atleast_2d(pts_arr)
    reeb = m.reeb_field(q)
    x1 = hamiltonian_to_field(h1, q)
    vals = (np.asarray(h1.field.directional(q, reeb), dtype=float)
            * np.asarray(h2.field(q), dtype=float)
            - np.asarray(h2.field.directional(q, x1), dtype=float))
    return vals[0] if scalar else vals


def _coords_to_seeded_point(coords):
    """Split possibly-Dual coordinates into base points and a seed matrix."""
    vals = [np.asarray(value(c), dtype=float) for c in coords]
    eps = [np.asarray(value(epsilon(c)), dtype=float) for c in coords]
    vals = np.broadcast_arrays(*vals)
    shape = vals[0].shape
    eps = [np.broadcast_to(e, shape) for e in eps]
    p = np.stack(vals, axis=-1)
    dp = np.stack(eps, axis=-1)
    return p, dp


def _dual_gradient_contract(field: ScalarField, base, direction):
    """dF(direction) where base coordinates and direction are Duals."""
    d = len(base)
    total = None
    for a in range(d):
        coords = [Dual(base[b], 1.0 if b == a else 0.0) for b in range(d)]
        partial = epsilon(field.fn(coords))
        term = partial * direction[a]
        total = term if total is None else total + term
    return total


def bracket_hamiltonian(h1: Hamiltonian, h2: Hamiltonian) -> Hamiltonian:
    """The bracket as a Hamiltonian, differentiable through dual seeding.

    Plain float coordinates use the batched frame solver; coordinates
    carrying one dual layer route through the ambient seeded solvers so
    nested brackets (Jacobi identity checks) stay differentiable.
    """
    m = h1.manifold

    def fn(coords):
        if not any(isinstance(c, Dual) for c in coords):
            pts, scalar_flag = split_point_coords(coords, m.ambient_dim)
            out = bracket(h1, h2, pts)
            return out if not scalar_flag else float(out)
        p, dp = _coords_to_seeded_point(coords)
        reeb0, reeb1 = reeb_with_derivative(m, p, dp)
        x10, x11 = hamiltonian_field_with_derivative(m, h1.field, p, dp)
        flat = p.ndim == 1
        base = [Dual(p[..., a], dp[..., a]) for a in range(m.ambient_dim)]
        if flat:
            reeb = [Dual(reeb0[a], reeb1[a]) for a in range(m.ambient_dim)]
            x1 = [Dual(x10[a], x11[a]) for a in range(m.ambient_dim)]
        else:
            reeb = [Dual(reeb0[..., a], reeb1[..., a]) for a in range(m.ambient_dim)]
            x1 = [Dual(x10[..., a], x11[..., a]) for a in range(m.ambient_dim)]
        dh1_reeb = _dual_gradient_contract(h1.field, base, reeb)
        dh2_x1 = _dual_gradient_contract(h2.field, base, x1)
        return dh1_reeb * h2.field.fn(base) - dh2_x1

    invariant = True if (h1.reeb_invariant and h2.reeb_invariant) else None
    return hamiltonian(m, fn, name=f"[{h1.name or 'H1'},{h2.name or 'H2'}]",
                       reeb_invariant=invariant)


def split_point_coords(coords, dim):
    """Stack coordinate arrays back into point rows; True flag for one point."""
    arrays = np.broadcast_arrays(*[np.asarray(c, dtype=float) for c in coords])
    if arrays[0].ndim == 0:
        return np.array([float(a) for a in arrays]), True
    return np.stack(arrays, axis=-1), False


def adjoint(generator: Hamiltonian, flow_time: float, h: Hamiltonian,
            steps: Optional[int] = None) -> Hamiltonian:
    """The adjoint action (lambda H) o g^{-1} of the generator's time flow.

    g is the time-flow_time map of the generator's contact field; the
    conformal factor lambda is measured by transporting the Reeb vector
    and evaluating the contact form on the result (identically 1 for
    strict generators).  The returned Hamiltonian evaluates on float
    points only.
    """
    from . import flows

    m = h.manifold
    gen_field = None if generator is None else generator

    def fn(coords):
        if any(isinstance(c, Dual) for c in coords):
            raise TypeError("adjoint Hamiltonians do not support dual seeding")
        pts, scalar_flag = split_point_coords(coords, m.ambient_dim)
        q = np.atleast_2d(pts)
        if flow_time == 0.0:
            vals = np.asarray(h.field(q), dtype=float)
            return float(vals[0]) if scalar_flag else vals

        def backward(batch):
            return -np.asarray(_generator_velocity(m, gen_field, batch))

        x = flows.flow_points(m, backward, q, flow_time, steps=steps)
        lam = flows.conformal_factor(m, gen_field, flow_time, x, steps=steps)
        vals = lam * np.asarray(h.field(x), dtype=float)
        return float(vals[0]) if scalar_flag else vals

    return hamiltonian(m, fn, name=f"Ad[{generator.name or 'G'}]({h.name or 'H'})")


def _generator_velocity(m: ContactManifold, generator, pts):
    if generator is None:
        return m.reeb_field(pts)
    return hamiltonian_to_field(generator, pts)
