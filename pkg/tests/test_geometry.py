import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from sepwit.geometry import (
    BOUNDARY,
    INSIDE,
    OUTSIDE,
    PlanarRegion,
    contains,
    convex_hull,
    hausdorff,
    nearest_point,
    separating_direction,
    signed_distance,
)
from sepwit.linalg import InvalidInputError

DIAMOND = convex_hull([(1, 0), (0, 1), (-1, 0), (0, -1)])
BOX = convex_hull([(1, 1), (-1, 1), (-1, -1), (1, -1)])


def _as_set(region):
    return {tuple(np.round(v, 12)) for v in region.vertices}


def test_triangle_drops_interior_point():
    hull = convex_hull([(0, 0), (1, 0), (0, 1), (0.1, 0.1)])
    assert _as_set(hull) == {(0, 0), (1, 0), (0, 1)}


def test_single_point_and_segment():
    assert len(convex_hull([(2, 3)])) == 1
    seg = convex_hull([(0, 0), (1, 1), (2, 2), (0.5, 0.5)])
    assert _as_set(seg) == {(0, 0), (2, 2)}
    assert seg.is_degenerate


def test_square_with_centre():
    hull = convex_hull([(0, 0), (1, 0), (1, 1), (0, 1), (0.5, 0.5)])
    assert len(hull) == 4
    assert hull.area == pytest.approx(1.0)


def test_empty_input_rejected():
    with pytest.raises(InvalidInputError):
        convex_hull(np.empty((0, 2)))


def test_duplicates_removed():
    hull = convex_hull([(0, 0)] * 5 + [(1, 0)] * 3 + [(0, 1)])
    assert len(hull) == 3


@settings(max_examples=60, deadline=None)
@given(arrays(np.float64, st.tuples(st.integers(3, 60), st.just(2)),
              elements=st.floats(-1e3, 1e3, allow_nan=False)))
def test_hull_is_convex_ccw_and_contains_input(pts):
    hull = convex_hull(pts)
    v = hull.vertices
    if len(hull) >= 3:
        e = np.roll(v, -1, axis=0) - v
        cross = e[:, 0] * np.roll(e, -1, axis=0)[:, 1] - e[:, 1] * np.roll(e, -1, axis=0)[:, 0]
        assert np.all(cross > 0)
    scale = max(1.0, float(np.ptp(pts)))
    for p in pts:
        assert signed_distance(hull, p) <= 1e-9 * scale


@settings(max_examples=30, deadline=None)
@given(arrays(np.float64, st.tuples(st.integers(3, 40), st.just(2)),
              elements=st.floats(-10, 10, allow_nan=False)),
       st.floats(0.01, 100))
def test_hull_is_scale_invariant(pts, c):
    a = convex_hull(pts)
    b = convex_hull(pts * c)
    assert len(a) == len(b)
    np.testing.assert_allclose(a.vertices * c, b.vertices, atol=1e-9 * c * max(1.0, float(np.ptp(pts))))


def test_large_inputs_use_the_prefilter():
    rng = np.random.default_rng(0)
    pts = rng.normal(size=(200_000, 2))
    hull = convex_hull(pts)
    ref = convex_hull(pts[np.argsort(-np.linalg.norm(pts, axis=1))[:5000]])
    assert hausdorff(hull, ref) < 1e-12


def test_contains_examples():
    assert contains(DIAMOND, (-1, -1)) == OUTSIDE
    assert contains(DIAMOND, (0, 0)) == INSIDE
    assert contains(DIAMOND, (1, 0)) == BOUNDARY
    assert contains(DIAMOND, (0.5, 0.5)) == BOUNDARY


def test_degenerate_regions_use_distance():
    seg = convex_hull([(0, 0), (2, 0)])
    assert contains(seg, (1, 0)) == BOUNDARY
    assert contains(seg, (1, 0.1)) == OUTSIDE
    point = convex_hull([(1, 1)])
    assert contains(point, (1, 1)) == BOUNDARY
    assert signed_distance(point, (4, 5)) == pytest.approx(5.0)


def test_separating_direction_diamond():
    sep = separating_direction(DIAMOND, (-1, -1))
    np.testing.assert_allclose(sep.direction, [2**-0.5, 2**-0.5])
    assert sep.margin == pytest.approx(2**-0.5)
    np.testing.assert_allclose(nearest_point(DIAMOND, (-1, -1)), [-0.5, -0.5])
    assert separating_direction(DIAMOND, (0, 0)) is None


def test_separating_direction_axis_case():
    sep = separating_direction(BOX, (2, 0))
    np.testing.assert_allclose(sep.direction, [-1, 0])
    assert sep.margin == pytest.approx(1.0)


@settings(max_examples=50, deadline=None)
@given(st.floats(-5, 5), st.floats(-5, 5))
def test_direction_exists_iff_outside(x, y):
    cls = contains(DIAMOND, (x, y))
    sep = separating_direction(DIAMOND, (x, y))
    assert (sep is not None) == (cls == OUTSIDE)
    if sep is not None:
        k = sep.direction
        assert sep.margin > 0
        assert np.all(DIAMOND.vertices @ k - k @ np.array([x, y]) >= sep.margin - 1e-12)


def test_hausdorff():
    assert hausdorff(DIAMOND, DIAMOND) == 0.0
    assert hausdorff(DIAMOND, BOX) == pytest.approx(2**-0.5)
    assert hausdorff(BOX, DIAMOND) == pytest.approx(2**-0.5)


def test_region_properties():
    assert BOX.diameter == pytest.approx(2 * 2**0.5)
    assert BOX.area == pytest.approx(4.0)
    assert BOX.support((1, 0)) == pytest.approx(-1.0)
    assert isinstance(BOX, PlanarRegion)
