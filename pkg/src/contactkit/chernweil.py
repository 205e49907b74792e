"""Group actions, moment maps, and invariant-polynomial integrals.

An action enters only through its infinitesimal data: a Lie algebra
element A maps to the fundamental vector field on the manifold, and the
moment pairing is the contact form on that field.  The k-linear
invariant polynomials are integrals of Hamiltonian products against the
contact volume form; pulling back along the moment map evaluates them
on moment Hamiltonians of algebra elements.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .fields import ScalarField, VectorField
from .hamiltonian import Hamiltonian, field_to_hamiltonian, hamiltonian
from .integrate import IntegralResult, contact_volume, integrate
from .manifold import ContactManifold, GeometryError


class PositivityError(GeometryError):
    """An integral certified positive by the theory failed its check."""


@dataclass(frozen=True)
class GroupAction:
    """Infinitesimal group action on a contact manifold.

    kind is "torus" (algebra R^k, elements are real vectors) or
    "unitary" (anti-Hermitian complex matrices).  fundamental maps an
    algebra element to its vector field on the manifold.
    """

    kind: str
    manifold: ContactManifold
    algebra_dim: int
    fundamental: Callable[[np.ndarray], VectorField]
    name: str = ""

    def random_element(self, rng) -> np.ndarray:
        if self.kind == "torus":
            return rng.normal(size=self.algebra_dim)
        n = self.algebra_dim
        real = rng.normal(size=(n, n))
        imag = rng.normal(size=(n, n))
        a = real + 1j * imag
        return (a - a.conj().T) / 2.0

    def validate_element(self, a) -> np.ndarray:
        if self.kind == "torus":
            arr = np.asarray(a, dtype=float)
            if arr.shape != (self.algebra_dim,):
                raise ValueError(
                    f"expected a length-{self.algebra_dim} vector, got {arr.shape}")
            return arr
        arr = np.asarray(a, dtype=complex)
        if arr.shape != (self.algebra_dim, self.algebra_dim):
            raise ValueError(
                f"expected a {self.algebra_dim}x{self.algebra_dim} matrix")
        skew = np.max(np.abs(arr + arr.conj().T))
        if skew > 1e-12:
            raise ValueError(f"matrix is not anti-Hermitian: defect {skew:.3e}")
        return arr


def torus_shift_action(m: ContactManifold) -> GroupAction:
    """Translation action of the 2-torus in the two base angles."""

    def fundamental(a):
        a = np.asarray(a, dtype=float)

        def comp(coords):
            zero = 0.0 * coords[0]
            return [zero + a[0], zero + a[1], zero]

        return VectorField(comp, 3, name=f"shift{tuple(np.round(a, 6))}")

    return GroupAction("torus", m, 2, fundamental, name="torus-shift")


def diagonal_torus_action(m: ContactManifold) -> GroupAction:
    """Diagonal phase rotations of the complex coordinates.

    Element a in R^{n+1} acts by z_j -> e^{i a_j t} z_j; defined on round
    spheres and on weighted-sphere level sets, both preserved by phases.
    """
    pairs = m.ambient_dim // 2

    def fundamental(a):
        a = np.asarray(a, dtype=float)

        def comp(coords):
            out = []
            for j in range(pairs):
                out.append(-a[j] * coords[2 * j + 1])
                out.append(a[j] * coords[2 * j])
            return out

        return VectorField(comp, m.ambient_dim, name="diag-phase")

    return GroupAction("torus", m, pairs, fundamental, name="diagonal-torus")


def unitary_action(m: ContactManifold) -> GroupAction:
    """Action of the full unitary group on a round sphere.

    An anti-Hermitian matrix A acts by z -> Az in the complex ambient
    coordinates; the flow e^{tA} is unitary, hence preserves the sphere
    and the standard form.
    """
    pairs = m.ambient_dim // 2

    def fundamental(mat):
        mat = np.asarray(mat, dtype=complex)
        p = mat.real
        q = mat.imag

        def comp(coords):
            xs = [coords[2 * j] for j in range(pairs)]
            ys = [coords[2 * j + 1] for j in range(pairs)]
            out = []
            for j in range(pairs):
                re = sum(p[j, k] * xs[k] - q[j, k] * ys[k] for k in range(pairs))
                im = sum(q[j, k] * xs[k] + p[j, k] * ys[k] for k in range(pairs))
                out.append(re)
                out.append(im)
            return out

        return VectorField(comp, m.ambient_dim, name="unitary")

    return GroupAction("unitary", m, pairs, fundamental, name="unitary")


def moment(action: GroupAction, pts, a) -> np.ndarray:
    """The moment pairing: the contact form on the fundamental field of a."""
    a = action.validate_element(a)
    m = action.manifold
    field = action.fundamental(a)
    return m.form(pts, field(pts))


def moment_field(action: GroupAction, a, name: str = "") -> Hamiltonian:
    """The moment Hamiltonian of an algebra element, tagged Reeb-invariant.

    All bundled actions commute with the Reeb flow, so their moments are
    invariant; tests confirm the tag by sampling.
    """
    a = action.validate_element(a)
    h = field_to_hamiltonian(action.manifold, action.fundamental(a),
                             name=name or f"moment({action.name})")
    return Hamiltonian(h.field, action.manifold, reeb_invariant=True,
                       name=h.name)


def action_strictness(action: GroupAction, elements=None, t: float = 0.5,
                      samples: int = 8, seed: int = 0) -> float:
    """Max form-preservation defect of the action's generator flows."""
    from .flows import strictness_check

    if elements is None:
        rng = np.random.default_rng(seed)
        elements = [action.random_element(rng) for _ in range(3)]
    worst = 0.0
    for a in elements:
        h = moment_field(action, a)
        worst = max(worst, strictness_check(action.manifold, h, t,
                                            samples=samples, seed=seed))
    return worst


def _product_field(m: ContactManifold, hams: Sequence[Hamiltonian]) -> ScalarField:
    fields = [h.field if isinstance(h, Hamiltonian) else h for h in hams]
    out = fields[0]
    for f in fields[1:]:
        out = out * f
    return out


def invariant_polynomial_I(m: ContactManifold, hams: Sequence[Hamiltonian],
                           budget: int = 1 << 17, seed: int = 0,
                           threads: Optional[int] = None) -> IntegralResult:
    """The k-linear invariant polynomial: integral of the product of the
    Hamiltonians against the contact volume form.

    Symmetric in its arguments by construction.  Warns when an argument
    is tagged non-invariant; the integral is still defined.
    """
    if not hams:
        raise ValueError("need at least one Hamiltonian")
    for h in hams:
        if isinstance(h, Hamiltonian) and h.reeb_invariant is False:
            warnings.warn(f"{h.name or 'argument'} is not Reeb-invariant; "
                          "the integral is defined but not an invariant value",
                          stacklevel=2)
    product = _product_field(m, hams)
    return integrate(m, product, budget=budget, seed=seed, threads=threads)


def pullback_polynomial(action: GroupAction, elements: Sequence,
                        budget: int = 1 << 17, seed: int = 0,
                        threads: Optional[int] = None) -> IntegralResult:
    """Invariant polynomial evaluated on moment Hamiltonians of elements."""
    hams = [moment_field(action, a) for a in elements]
    return invariant_polynomial_I(action.manifold, hams, budget=budget,
                                  seed=seed, threads=threads)


def even_positivity_check(action: GroupAction, a, l: int,
                          budget: int = 1 << 17, seed: int = 0,
                          threads: Optional[int] = None) -> IntegralResult:
    """The 2l-fold moment power integral, certified strictly positive.

    Raises PositivityError when the value minus three standard errors
    fails to clear zero (with a tiny absolute guard for exact
    quadrature results).
    """
    a = action.validate_element(a)
    if not np.any(np.abs(a) > 0):
        raise ValueError("the zero algebra element is excluded")
    result = pullback_polynomial(action, [a] * (2 * l), budget=budget,
                                 seed=seed, threads=threads)
    if result.value - 3.0 * result.std_error <= 0.0:
        raise PositivityError(
            f"even moment power failed positivity: value {result.value:.6e}, "
            f"std_error {result.std_error:.3e}")
    return result


def reeb_circle_pullback(m: ContactManifold, k: int, t: float,
                         budget: int = 1 << 17, seed: int = 0,
                         threads: Optional[int] = None) -> dict:
    """Pullback along the Reeb circle action: constants integrate to
    t^k times the contact volume.

    Returns the raw value and the value after rescaling the form so the
    Reeb circle has period 2 pi (possible only when the manifold records
    a finite Reeb period).
    """
    const = hamiltonian(m, lambda coords, tt=float(t): 0.0 * coords[0] + tt,
                        name=f"const({t:g})", reeb_invariant=True)
    raw = invariant_polynomial_I(m, [const] * max(k, 1), budget=budget,
                                 seed=seed, threads=threads)
    if k == 0:
        raw = contact_volume(m, budget=budget, seed=seed, threads=threads)
    report = {"raw": raw, "normalized": None, "scale": None}
    if m.reeb_period is not None:
        scale = 2.0 * np.pi / m.reeb_period
        scaled = m.scaled(scale)
        const_s = hamiltonian(scaled, lambda coords, tt=float(t): 0.0 * coords[0] + tt,
                              reeb_invariant=True)
        norm = invariant_polynomial_I(scaled, [const_s] * max(k, 1),
                                      budget=budget, seed=seed, threads=threads)
        if k == 0:
            norm = contact_volume(scaled, budget=budget, seed=seed, threads=threads)
        report["normalized"] = norm
        report["scale"] = scale
    return report
