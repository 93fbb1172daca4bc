import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from carnot_heat.errors import InvalidArgument
from carnot_heat.group import (
    by_name,
    coefficient_matrix,
    dilate,
    euclidean,
    heisenberg,
    horizontal_norm,
    multiply,
    vector_field,
)

GROUPS = [euclidean(1), euclidean(3), heisenberg(1), heisenberg(2)]


def test_descriptor_shapes():
    h = heisenberg(1)
    assert h.strata_dims == (2, 1)
    assert h.total_dim == 3 and h.horizontal_dim == 2 and h.step == 2
    assert list(h.dilation_weights) == [1, 1, 2]
    assert list(heisenberg(2).dilation_weights) == [1, 1, 1, 1, 2]
    assert list(euclidean(3).dilation_weights) == [1, 1, 1]


def test_by_name_round_trip():
    for g in GROUPS:
        assert by_name(g.name) == g
    with pytest.raises(InvalidArgument):
        by_name("engel:1")
    with pytest.raises(InvalidArgument):
        by_name("heisenberg:x")


def test_multiply_examples():
    assert np.allclose(multiply(euclidean(3), [1, 2, 3], [4, 5, 6]), [5, 7, 9])
    assert np.allclose(multiply(heisenberg(1), [1, 0, 0], [0, 1, 0]), [1, 1, 0.5])
    x = np.array([0.3, -1.2, 2.0])
    assert np.array_equal(multiply(heisenberg(1), x, np.zeros(3)), x)
    assert np.array_equal(multiply(heisenberg(1), np.zeros(3), x), x)


def test_multiply_dimension_mismatch():
    with pytest.raises(InvalidArgument):
        multiply(heisenberg(1), [1, 2], [1, 2, 3])


def test_dilate_examples():
    assert np.allclose(dilate(heisenberg(1), 2, [1, 1, 1]), [2, 2, 4])
    assert np.allclose(dilate(euclidean(2), 3, [1, 2]), [3, 6])
    x = np.array([0.1, 0.2, 0.3])
    assert np.array_equal(dilate(heisenberg(1), 1.0, x), x)
    for lam in (0.0, -1.0):
        with pytest.raises(InvalidArgument):
            dilate(heisenberg(1), lam, x)


def test_vector_field_examples():
    x, y, z = 0.7, -1.3, 4.0
    assert np.allclose(vector_field(heisenberg(1), 0, [x, y, z]), [1, 0, -y / 2])
    assert np.allclose(vector_field(heisenberg(1), 1, [x, y, z]), [0, 1, x / 2])
    for j in range(3):
        assert np.array_equal(vector_field(euclidean(3), j, [x, y, z]), np.eye(3)[j])
    with pytest.raises(InvalidArgument):
        vector_field(heisenberg(1), 2, [x, y, z])


@pytest.mark.parametrize("g", GROUPS, ids=lambda g: g.name)
def test_dilation_is_an_automorphism(g):
    rng = np.random.default_rng(1)
    n = 10_000
    x = rng.uniform(-3, 3, (g.total_dim, n))
    y = rng.uniform(-3, 3, (g.total_dim, n))
    lam = rng.uniform(0.1, 4, n)
    lhs = dilate_batch(g, lam, multiply(g, x, y))
    rhs = multiply(g, dilate_batch(g, lam, x), dilate_batch(g, lam, y))
    assert np.allclose(lhs, rhs, rtol=1e-13, atol=1e-12)


def dilate_batch(g, lam, x):
    return x * lam[None, :] ** g.dilation_weights[:, None]


@pytest.mark.parametrize("g", GROUPS, ids=lambda g: g.name)
def test_dilation_composes(g):
    x = np.random.default_rng(2).standard_normal(g.total_dim)
    assert np.allclose(dilate(g, 2.0, dilate(g, 3.0, x)), dilate(g, 6.0, x))


@settings(max_examples=200, deadline=None)
@given(st.lists(st.floats(-5, 5), min_size=9, max_size=9))
def test_heisenberg_law_is_associative(vals):
    g = heisenberg(1)
    a, b, c = np.array(vals).reshape(3, 3)
    assert np.allclose(multiply(g, multiply(g, a, b), c), multiply(g, a, multiply(g, b, c)), atol=1e-9)


def test_fields_are_left_invariant():
    # X_j at a equals the differential of left translation by a applied to X_j at 0
    g = heisenberg(2)
    rng = np.random.default_rng(3)
    a = rng.standard_normal(g.total_dim)
    eps = 1e-6
    for j in range(g.horizontal_dim):
        e = vector_field(g, j, np.zeros(g.total_dim))
        fd = (multiply(g, a, eps * e) - multiply(g, a, -eps * e)) / (2 * eps)
        assert np.allclose(fd, vector_field(g, j, a), atol=1e-8)


def test_triangular_structure():
    # first-stratum part is the unit vector; stratum-2 entries ignore stratum-2 coordinates
    g = heisenberg(2)
    rng = np.random.default_rng(4)
    x = rng.standard_normal(g.total_dim)
    x2 = x.copy()
    x2[-1] += 10.0
    for j in range(g.horizontal_dim):
        c = vector_field(g, j, x)
        assert np.array_equal(c[: g.horizontal_dim], np.eye(g.horizontal_dim)[j])
        assert np.array_equal(c, vector_field(g, j, x2))


def test_hormander_bracket():
    # [X1, X2] = (X1 b2 - X2 b1) . grad = d/dz at random points
    g = heisenberg(1)
    rng = np.random.default_rng(5)
    pts = rng.uniform(-2, 2, (3, 1000))
    eps = 1e-5

    def jac_apply(j, k, x):
        # derivative of coeff(j) along field k
        dk = vector_field(g, k, x)
        return (vector_field(g, j, x + eps * dk) - vector_field(g, j, x - eps * dk)) / (2 * eps)

    br = jac_apply(1, 0, pts) - jac_apply(0, 1, pts)
    assert np.allclose(br, np.array([0, 0, 1.0])[:, None], atol=1e-9)


def test_coefficient_matrix_and_norm():
    g = heisenberg(1)
    x = np.random.default_rng(6).standard_normal((3, 4, 5))
    B = coefficient_matrix(g, x)
    assert B.shape == (2, 3, 4, 5)
    assert np.allclose(B[0, 2], -x[1] / 2) and np.allclose(B[1, 2], x[0] / 2)
    assert np.allclose(horizontal_norm(g, x), np.hypot(x[0], x[1]))
