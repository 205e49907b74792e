"""Scalar fields, one-forms, exterior derivatives, and Lie brackets."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from contactkit.fields import (OneForm, ScalarField, VectorField,
                               constant_field, lie_bracket, split_point)

rng = np.random.default_rng(42)


def quadratic():
    return ScalarField(lambda c: c[0] * c[0] + 2.0 * c[0] * c[1] - c[2], 3, name="q")


def test_scalar_field_evaluation_shapes():
    f = quadratic()
    pts = rng.normal(size=(5, 3))
    vals = f(pts)
    assert vals.shape == (5,)
    one = f(pts[0])
    assert np.isscalar(one) or np.ndim(one) == 0
    assert one == pytest.approx(vals[0])


def test_gradient_matches_hand_derivative():
    f = quadratic()
    pts = rng.normal(size=(4, 3))
    g = f.gradient(pts)
    expected = np.column_stack([2 * pts[:, 0] + 2 * pts[:, 1],
                                2 * pts[:, 0], -np.ones(4)])
    assert np.allclose(g, expected, atol=1e-14)


def test_directional_contracts_gradient():
    f = quadratic()
    pts = rng.normal(size=(6, 3))
    vecs = rng.normal(size=(6, 3))
    d = f.directional(pts, vecs)
    assert np.allclose(d, np.einsum("na,na->n", f.gradient(pts), vecs), atol=1e-13)


def test_field_algebra():
    f = quadratic()
    g = constant_field(3.0, 3)
    pts = rng.normal(size=(5, 3))
    assert np.allclose((f + g)(pts), f(pts) + 3.0)
    assert np.allclose((f * f)(pts), f(pts) ** 2)
    assert np.allclose((-f)(pts), -f(pts))
    assert np.allclose((f - g)(pts), f(pts) - 3.0)


def test_exterior_derivative_of_function_is_gradient_form():
    f = quadratic()
    df = f.d()
    pts = rng.normal(size=(5, 3))
    vecs = rng.normal(size=(5, 3))
    assert np.allclose(df(pts, vecs), f.directional(pts, vecs), atol=1e-13)


def test_two_form_antisymmetric_and_bilinear():
    # alpha = x dy on R^3
    alpha = OneForm(lambda c: [0.0 * c[0], c[0], 0.0 * c[0]], 3)
    pts = rng.normal(size=(7, 3))
    u = rng.normal(size=(7, 3))
    w = rng.normal(size=(7, 3))
    duw = alpha.two_form(pts, u, w)
    assert np.allclose(duw, -alpha.two_form(pts, w, u), atol=1e-14)
    # d(x dy) = dx ^ dy
    expected = u[:, 0] * w[:, 1] - u[:, 1] * w[:, 0]
    assert np.allclose(duw, expected, atol=1e-12)
    two = alpha.two_form(pts, 2.5 * u, w)
    assert np.allclose(two, 2.5 * duw, atol=1e-12)


def test_exact_form_is_closed():
    f = quadratic()
    df = f.d()
    pts = rng.normal(size=(6, 3))
    u = rng.normal(size=(6, 3))
    w = rng.normal(size=(6, 3))
    assert np.allclose(df.two_form(pts, u, w), 0.0, atol=1e-12)


def test_dmatrix_collects_pairwise_two_form():
    alpha = OneForm(lambda c: [np.cos(c[2]), -np.sin(c[2]), 0.0 * c[0]], 3)
    pts = rng.normal(size=(3, 3))
    frame = rng.normal(size=(3, 3, 3))
    mat = alpha.dmatrix(pts, frame)
    for i in range(3):
        for j in range(3):
            pair = alpha.two_form(pts, frame[:, i, :], frame[:, j, :])
            assert np.allclose(mat[:, i, j], pair, atol=1e-13)
    assert np.allclose(mat, -np.swapaxes(mat, 1, 2), atol=1e-14)


def test_form_scaling():
    alpha = OneForm(lambda c: [c[1], -c[0], 0.0 * c[0] + 1.0], 3)
    pts = rng.normal(size=(4, 3))
    vecs = rng.normal(size=(4, 3))
    assert np.allclose((alpha * 2.0)(pts, vecs), 2.0 * alpha(pts, vecs), atol=1e-14)


def test_lie_bracket_of_linear_fields_is_commutator():
    a = rng.normal(size=(3, 3))
    b = rng.normal(size=(3, 3))
    x = VectorField(lambda c: [sum(a[i][j] * c[j] for j in range(3)) for i in range(3)], 3)
    y = VectorField(lambda c: [sum(b[i][j] * c[j] for j in range(3)) for i in range(3)], 3)
    pts = rng.normal(size=(5, 3))
    comm = b @ a - a @ b  # [X, Y] for X = Ax, Y = Bx flows to (BA - AB) x
    assert np.allclose(lie_bracket(x, y)(pts), pts @ comm.T, atol=1e-12)


def test_lie_bracket_antisymmetric():
    x = VectorField(lambda c: [np.sin(c[1]), c[0] * c[2], 1.0 + 0.0 * c[0]], 3)
    y = VectorField(lambda c: [c[2] * c[2], np.cos(c[0]), c[1]], 3)
    pts = rng.normal(size=(5, 3))
    assert np.allclose(lie_bracket(x, y)(pts), -lie_bracket(y, x)(pts), atol=1e-12)


def test_split_point_roundtrip():
    pts = rng.normal(size=(4, 5))
    coords, scalar = split_point(pts)
    assert len(coords) == 5 and not scalar
    assert np.allclose(np.column_stack(coords), pts)
    _, scalar = split_point(pts[0])
    assert scalar


@settings(max_examples=25)
@given(s=st.floats(min_value=-5, max_value=5, allow_nan=False))
def test_constant_field_everywhere(s):
    f = constant_field(s, 3)
    pts = np.zeros((3, 3))
    assert np.allclose(f(pts), s)
    assert np.allclose(f.gradient(pts), 0.0)
