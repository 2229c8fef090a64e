import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import commuting_pair, rand_herm
from sepwit.geometry import INSIDE, OUTSIDE, contains, hausdorff, signed_distance
from sepwit.linalg import InvalidInputError, pauli
from sepwit.ranges import (
    ProductPair,
    factor_samples,
    joint_range,
    product_cloud,
    separable_range,
    supporting_points,
)

X, Z = pauli("X"), pauli("Z")
seeds = st.integers(min_value=0, max_value=2**32 - 1)


@pytest.fixture(scope="module")
def pauli_pair():
    return ProductPair(X, Z, X, Z)


@pytest.fixture(scope="module")
def pauli_sep(pauli_pair):
    return separable_range(pauli_pair)


def _vertex_set(region):
    return {tuple(np.round(v, 6) + 0.0) for v in region.vertices}


def test_pauli_disc():
    disc = joint_range(X, Z, 720)
    assert np.max(np.abs(np.linalg.norm(disc.vertices, axis=1) - 1)) <= 1e-4


def test_outer_square(pauli_pair):
    sq = joint_range(pauli_pair.H1, pauli_pair.H2, 720)
    assert _vertex_set(sq) == {(1, 1), (-1, 1), (-1, -1), (1, -1)}
    ref = np.array([[1, 1], [-1, 1], [-1, -1], [1, -1]])
    assert np.max(np.min(np.linalg.norm(sq.vertices[:, None] - ref[None], axis=2), axis=1)) <= 1e-8


def test_identical_operators_give_diagonal_segment():
    h = rand_herm(3, np.random.default_rng(1))
    seg = joint_range(h, h, 90)
    assert len(seg) == 2
    ev = np.linalg.eigvalsh(h)
    np.testing.assert_allclose(np.sort(seg.vertices[:, 0]), [ev[0], ev[-1]], atol=1e-10)
    np.testing.assert_allclose(seg.vertices[:, 0], seg.vertices[:, 1], atol=1e-12)


def test_input_validation():
    with pytest.raises(InvalidInputError):
        joint_range(X, np.eye(3), 90)
    with pytest.raises(InvalidInputError):
        joint_range(X, Z, 4)
    with pytest.raises(InvalidInputError):
        ProductPair(X, np.eye(3), X, Z)


def test_inner_square(pauli_sep):
    assert len(pauli_sep) == 4
    ref = np.array([[1, 0], [0, 1], [-1, 0], [0, -1]])
    d = np.linalg.norm(pauli_sep.vertices[:, None] - ref[None], axis=2)
    assert d.min(axis=1).max() <= 1e-3 and d.min(axis=0).max() <= 1e-3


def test_commuting_pair_range_equals_joint_range():
    pair = ProductPair(Z, Z @ Z, Z, Z @ Z)
    sep = separable_range(pair, 360, 2000)
    full = joint_range(pair.H1, pair.H2, 360)
    assert hausdorff(sep, full) <= 1e-3


def test_projector_triangle_and_nonconvex_cloud():
    p0, p1 = np.diag([1.0, 0.0]), np.diag([0.0, 1.0])
    pair = ProductPair(p0, p1, p0, p1)
    tri = separable_range(pair, 360, 2000)
    assert _vertex_set(tri) == {(0, 0), (1, 0), (0, 1)}
    cloud = product_cloud(pair, 4000, seed=3)
    # product points satisfy sqrt(x) + sqrt(y) <= 1, so the hull's edge midpoint is never reached
    assert np.all(np.sqrt(cloud[:, 0]) + np.sqrt(cloud[:, 1]) <= 1 + 1e-9)
    assert signed_distance(tri, (0.5, 0.5)) == pytest.approx(0, abs=1e-9)
    assert np.min(np.linalg.norm(cloud - 0.5, axis=1)) > 0.1


def test_cloud_inside_square(pauli_pair, pauli_sep):
    cloud = product_cloud(pauli_pair, 3000, seed=0)
    assert np.all(np.abs(cloud).sum(axis=1) <= 1 + 1e-9)
    assert all(contains(pauli_sep, p) != OUTSIDE for p in cloud[:300])


def test_cloud_is_seed_deterministic(pauli_pair):
    a = product_cloud(pauli_pair, 50, seed=11)
    b = product_cloud(pauli_pair, 50, seed=11)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, product_cloud(pauli_pair, 50, seed=12))
    assert product_cloud(pauli_pair, 0).shape == (0, 2)
    with pytest.raises(InvalidInputError):
        product_cloud(pauli_pair, -1)


def test_factor_samples_interior_is_inside():
    bnd, interior = factor_samples(X, Z, 180, 5000)
    assert bnd.shape == (180, 2)
    assert interior.shape[0] >= 5000
    assert np.all(np.linalg.norm(interior, axis=1) <= 1 + 1e-12)


@settings(max_examples=15, deadline=None)
@given(seed=seeds, d=st.integers(2, 5), n=st.sampled_from([90, 360, 720]))
def test_joint_range_is_convex_ccw(seed, d, n):
    rng = np.random.default_rng(seed)
    region = joint_range(rand_herm(d, rng), rand_herm(d, rng), n)
    v = region.vertices
    e = np.roll(v, -1, axis=0) - v
    cross = e[:, 0] * np.roll(e, -1, axis=0)[:, 1] - e[:, 1] * np.roll(e, -1, axis=0)[:, 0]
    assert np.all(cross > 0)


@settings(max_examples=15, deadline=None)
@given(seed=seeds, d=st.integers(2, 5))
def test_resolution_monotone(seed, d):
    rng = np.random.default_rng(seed)
    h1, h2 = rand_herm(d, rng), rand_herm(d, rng)
    coarse, fine = joint_range(h1, h2, 90), joint_range(h1, h2, 360)
    # every coarse angle is also a fine angle, so the coarse polygon sits inside
    assert max(signed_distance(fine, p) for p in coarse.vertices) <= 1e-9


@settings(max_examples=8, deadline=None)
@given(seed=seeds)
def test_separable_inside_joint(seed):
    rng = np.random.default_rng(seed)
    pair = ProductPair(*(rand_herm(2, rng) for _ in range(4)))
    sep = separable_range(pair, 360, 2000)
    # exact half-plane description of the joint range: k.p >= lambda_min(k1 H1 + k2 H2)
    for t in np.linspace(0, 2 * np.pi, 256, endpoint=False):
        k = np.array([np.cos(t), np.sin(t)])
        lam = np.linalg.eigvalsh(k[0] * pair.H1 + k[1] * pair.H2)[0]
        assert np.min(sep.vertices @ k) >= lam - 1e-7
    cloud = product_cloud(pair, 200, seed=seed % 1000)
    assert all(contains(sep, p) != OUTSIDE for p in cloud)


@pytest.mark.slow
def test_commuting_collapse_random():
    rng = np.random.default_rng(5)
    for _ in range(3):
        a1, a2 = commuting_pair(2, rng)
        pair = ProductPair(a1, a2, rand_herm(2, rng), rand_herm(2, rng))
        full = joint_range(pair.H1, pair.H2)
        assert hausdorff(full, separable_range(pair)) <= 2e-3 * full.diameter


def test_combination_and_swap(pauli_pair):
    h = pauli_pair.combination(1, 2)
    np.testing.assert_allclose(h, np.kron(X, X) + 2 * np.kron(Z, Z))
    swapped = ProductPair(X, Z, np.eye(2), Z).swap()
    assert swapped.dim_a == 2 and np.array_equal(swapped.A1, np.eye(2))
    with pytest.raises(InvalidInputError):
        pauli_pair.combination(np.inf, 0)


def test_supporting_points_lie_on_range():
    pts = supporting_points(X, Z, 16)
    np.testing.assert_allclose(np.linalg.norm(pts, axis=1), 1, atol=1e-12)
    assert contains(joint_range(X, Z, 720), (0, 0)) == INSIDE
