"""Scalar fields, one-forms, and vector fields on ambient coordinates.

All geometric data is represented by coefficient functions of the
ambient coordinates.  A coefficient function receives a list of ``d``
coordinate entries, each of which may be a float, a numpy array (one
entry per batch point), or a :class:`~contactkit.dual.Dual`; it must be
written with numpy-compatible arithmetic so every mode works unchanged.

Public evaluation methods take points as arrays of shape ``(d,)`` or
``(N, d)`` and return scalars or ``(N,)``/``(N, d)`` arrays.
"""

from __future__ import annotations

from typing import Callable, Sequence

import numpy as np

from .dual import Dual, epsilon, seed


def split_point(pts: np.ndarray):
    """Split (d,) or (N, d) points into coordinate columns.

    Returns (columns, scalar) where scalar marks a single-point input.
    """
    pts = np.asarray(pts, dtype=float)
    if pts.ndim == 1:
        return [pts[a] for a in range(pts.shape[0])], True
    return [pts[:, a] for a in range(pts.shape[1])], False


class ScalarField:
    """Real function of ambient coordinates with exact derivatives."""

    def __init__(self, fn: Callable[[Sequence], object], dim: int, name: str = ""):
        self.fn = fn
        self.dim = dim
        self.name = name

    def raw(self, coords):
        """Evaluate on a coordinate list (floats, arrays, or Duals)."""
        return self.fn(coords)

    def __call__(self, pts):
        coords, scalar = split_point(pts)
        out = self.fn(coords)
        if scalar:
            return float(out)
        return np.broadcast_to(np.asarray(out, dtype=float), coords[0].shape).copy()

    def directional(self, pts, vecs):
        """Derivative along vecs; shapes follow pts."""
        coords, scalar = split_point(pts)
        vcols, _ = split_point(vecs)
        out = epsilon(self.fn(seed(coords, vcols)))
        if scalar:
            return float(out)
        return np.broadcast_to(np.asarray(out, dtype=float), coords[0].shape).copy()

    def gradient(self, pts):
        coords, scalar = split_point(pts)
        cols = []
        for a in range(self.dim):
            direction = [1.0 if b == a else 0.0 for b in range(self.dim)]
            cols.append(epsilon(self.fn(seed(coords, direction))))
        if scalar:
            return np.array([float(c) for c in cols])
        n = coords[0].shape[0]
        return np.column_stack([np.broadcast_to(np.asarray(c, dtype=float), (n,)) for c in cols])

    def d(self) -> "OneForm":
        """Exterior derivative as a one-form with AD coefficients."""
        def coefs(coords):
            out = []
            for a in range(self.dim):
                direction = [1.0 if b == a else 0.0 for b in range(self.dim)]
                out.append(epsilon(self.fn(seed(coords, direction))))
            return out
        return OneForm(coefs, self.dim, name=f"d({self.name})" if self.name else "")

    # pointwise algebra, used to build products of Hamiltonians

    def _combine(self, other, op, sym):
        if isinstance(other, ScalarField):
            if other.dim != self.dim:
                raise ValueError("field dimensions differ")
            g = other.fn
        else:
            c = float(other)
            g = lambda coords: 0.0 * coords[0] + c
        f = self.fn
        return ScalarField(lambda coords: op(f(coords), g(coords)), self.dim,
                           name=f"({self.name}{sym}...)" if self.name else "")

    def __add__(self, other):
        return self._combine(other, lambda a, b: a + b, "+")

    __radd__ = __add__

    def __sub__(self, other):
        return self._combine(other, lambda a, b: a - b, "-")

    def __mul__(self, other):
        return self._combine(other, lambda a, b: a * b, "*")

    __rmul__ = __mul__

    def __neg__(self):
        f = self.fn
        return ScalarField(lambda coords: -f(coords), self.dim, name=self.name)


def constant_field(value: float, dim: int) -> ScalarField:
    v = float(value)
    return ScalarField(lambda coords: 0.0 * coords[0] + v, dim, name=repr(v))


class OneForm:
    """One-form given by ambient coefficient functions.

    ``coef_fn(coords)`` returns the ``d`` coefficients; the pairing with
    a vector is the coordinate dot product.
    """

    def __init__(self, coef_fn: Callable[[Sequence], Sequence], dim: int, name: str = ""):
        self.coef_fn = coef_fn
        self.dim = dim
        self.name = name

    def coefficients(self, pts):
        coords, scalar = split_point(pts)
        out = self.coef_fn(coords)
        if scalar:
            return np.array([float(c) for c in out])
        n = coords[0].shape[0]
        return np.column_stack([np.broadcast_to(np.asarray(c, dtype=float), (n,)) for c in out])

    def __call__(self, pts, vecs):
        coefs = self.coefficients(pts)
        vecs = np.asarray(vecs, dtype=float)
        return np.sum(coefs * vecs, axis=-1)

    def coefficient_derivative(self, coords, direction):
        """Directional derivative of each coefficient along direction."""
        return [epsilon(c) for c in self.coef_fn(seed(coords, direction))]

    def two_form(self, pts, u, w):
        """Exterior derivative paired with two vectors: d(form)(u, w)."""
        coords, scalar = split_point(pts)
        ucols, _ = split_point(u)
        wcols, _ = split_point(w)
        du = self.coefficient_derivative(coords, ucols)
        dw = self.coefficient_derivative(coords, wcols)
        out = sum(du[a] * wcols[a] - dw[a] * ucols[a] for a in range(self.dim))
        if scalar:
            return float(out)
        return np.broadcast_to(np.asarray(out, dtype=float), coords[0].shape).copy()

    def dmatrix(self, pts, frame):
        """Matrix d(form)(e_i, e_j) over a frame.

        pts has shape (N, d) and frame (N, m, d); returns (N, m, m).
        The construction uses one AD pass per frame vector.
        """
        pts = np.asarray(pts, dtype=float)
        frame = np.asarray(frame, dtype=float)
        coords = [pts[:, a] for a in range(self.dim)]
        n, m, d = frame.shape
        deriv = np.empty((n, m, d))
        for i in range(m):
            cols = self.coefficient_derivative(coords, [frame[:, i, a] for a in range(d)])
            for a in range(d):
                deriv[:, i, a] = np.broadcast_to(np.asarray(cols[a], dtype=float), (n,))
        a_mat = np.einsum("nia,nja->nij", deriv, frame)
        return a_mat - np.swapaxes(a_mat, 1, 2)

    def __mul__(self, s):
        s = float(s)
        f = self.coef_fn
        return OneForm(lambda coords: [s * c for c in f(coords)], self.dim,
                       name=f"{s}*{self.name}" if self.name else "")

    __rmul__ = __mul__


class VectorField:
    """Vector field given by ambient component functions."""

    def __init__(self, comp_fn: Callable[[Sequence], Sequence], dim: int, name: str = ""):
        self.comp_fn = comp_fn
        self.dim = dim
        self.name = name

    def raw(self, coords):
        return self.comp_fn(coords)

    def __call__(self, pts):
        coords, scalar = split_point(pts)
        out = self.comp_fn(coords)
        if scalar:
            return np.array([float(c) for c in out])
        n = coords[0].shape[0]
        return np.column_stack([np.broadcast_to(np.asarray(c, dtype=float), (n,)) for c in out])


def lie_bracket(x: VectorField, y: VectorField) -> VectorField:
    """Standard Lie bracket [X, Y] = DY.X - DX.Y via dual seeding."""
    if x.dim != y.dim:
        raise ValueError("vector field dimensions differ")

    def comps(coords):
        xv = x.comp_fn(coords)
        yv = y.comp_fn(coords)
        dy_x = [epsilon(c) for c in y.comp_fn(seed(coords, xv))]
        dx_y = [epsilon(c) for c in x.comp_fn(seed(coords, yv))]
        return [dy_x[a] - dx_y[a] for a in range(x.dim)]

    return VectorField(comps, x.dim, name=f"[{x.name},{y.name}]")
