"""Planar convex geometry: hulls, membership and separating lines.

Regions are convex polygons stored as counter-clockwise vertex arrays.
Degenerate regions (a single point or a segment) keep one or two
vertices, and every predicate falls back to distance-to-set for them.
Tolerances are relative to the region's diameter so predicates do not
depend on the scale of the operators that produced the region.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from numba import njit

from .linalg import InvalidInputError

__all__ = [
    "PlanarRegion",
    "Separation",
    "convex_hull",
    "signed_distance",
    "contains",
    "nearest_point",
    "separating_direction",
    "hausdorff",
    "INSIDE",
    "BOUNDARY",
    "OUTSIDE",
]

INSIDE = "inside"
BOUNDARY = "boundary"
OUTSIDE = "outside"

DEDUP_TOL = 1e-12
COLLINEAR_TOL = 1e-12
MEMBERSHIP_TOL = 1e-7


@dataclass(frozen=True)
class PlanarRegion:
    """Convex polygon with counter-clockwise vertices, shape ``(m, 2)``."""

    vertices: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.vertices, dtype=float).reshape(-1, 2)
        if v.shape[0] == 0:
            raise InvalidInputError("a region needs at least one vertex")
        v.setflags(write=False)
        object.__setattr__(self, "vertices", v)

    def __len__(self) -> int:
        return self.vertices.shape[0]

    @property
    def is_degenerate(self) -> bool:
        return len(self) < 3

    @property
    def diameter(self) -> float:
        v = self.vertices
        d = v[:, None, :] - v[None, :, :]
        return float(np.sqrt(np.max(np.sum(d * d, axis=-1))))

    @property
    def area(self) -> float:
        if self.is_degenerate:
            return 0.0
        x, y = self.vertices[:, 0], self.vertices[:, 1]
        return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))

    def edges(self) -> tuple[np.ndarray, np.ndarray]:
        """Start points and end points of the closed boundary."""
        v = self.vertices
        return v, np.roll(v, -1, axis=0)

    def support(self, direction) -> float:
        """``min_v k.v`` over the vertices."""
        return float(np.min(self.vertices @ np.asarray(direction, dtype=float)))


@njit(cache=True)
def _monotone_chain(q, eps):
    """Andrew's monotone chain on lexicographically sorted points."""
    n = q.shape[0]
    hull = np.empty((2 * n, 2))
    k = 0
    for sweep in range(2):
        start = k
        for idx in range(n):
            i = idx if sweep == 0 else n - 1 - idx
            while k >= start + 2:
                ox, oy = hull[k - 2, 0], hull[k - 2, 1]
                ax, ay = hull[k - 1, 0], hull[k - 1, 1]
                cr = (ax - ox) * (q[i, 1] - oy) - (ay - oy) * (q[i, 0] - ox)
                if cr <= eps:
                    k -= 1
                else:
                    break
            hull[k, 0] = q[i, 0]
            hull[k, 1] = q[i, 1]
            k += 1
        k -= 1  # last point of each chain starts the other one
    return hull[:k].copy()


@njit(cache=True)
def _extreme_indices(q, dirs):
    m = dirs.shape[0]
    best = np.full(m, -np.inf)
    idx = np.zeros(m, dtype=np.int64)
    for i in range(q.shape[0]):
        for j in range(m):
            s = q[i, 0] * dirs[j, 0] + q[i, 1] * dirs[j, 1]
            if s > best[j]:
                best[j] = s
                idx[j] = i
    return idx


@njit(cache=True)
def _not_strictly_inside(q, poly, eps):
    m = poly.shape[0]
    keep = np.zeros(q.shape[0], dtype=np.bool_)
    for i in range(q.shape[0]):
        for j in range(m):
            a = poly[j]
            b = poly[(j + 1) % m]
            if (b[0] - a[0]) * (q[i, 1] - a[1]) - (b[1] - a[1]) * (q[i, 0] - a[0]) <= eps:
                keep[i] = True
                break
    return keep


def _prefilter(q: np.ndarray, n_dirs: int = 32) -> np.ndarray:
    # Points strictly inside the polygon of extreme points in a fan of directions
    # can never be hull vertices (Akl-Toussaint heuristic).
    theta = 2 * np.pi * np.arange(n_dirs) / n_dirs
    dirs = np.ascontiguousarray(np.stack([np.cos(theta), np.sin(theta)], axis=1))
    idx = np.unique(_extreme_indices(q, dirs))
    if idx.size < 3:
        return q
    poly = q[idx][np.lexsort((q[idx, 1], q[idx, 0]))]
    poly = _monotone_chain(np.ascontiguousarray(poly), COLLINEAR_TOL)
    if poly.shape[0] < 3:
        return q
    return q[_not_strictly_inside(q, poly, 1e-9)]


def convex_hull(points) -> PlanarRegion:
    """Smallest convex polygon containing ``points`` (monotone chain).

    Coordinates are shifted and scaled by the bounding-box extent before
    any tolerance comparison. Collinear input gives a two-vertex segment,
    coincident input a single vertex.
    """
    p = np.asarray(points, dtype=float).reshape(-1, 2)
    if p.shape[0] == 0:
        raise InvalidInputError("convex hull of an empty point set")
    if not np.all(np.isfinite(p)):
        raise InvalidInputError("non-finite point coordinates")
    lo = p.min(axis=0)
    scale = float(np.max(p.max(axis=0) - lo))
    if scale == 0.0:
        return PlanarRegion(p[:1].copy())
    q = (p - lo) / scale
    if q.shape[0] > 4096:
        q = _prefilter(np.ascontiguousarray(q))
    # sort on x snapped to the dedup grid so near-duplicates end up adjacent
    q = q[np.lexsort((q[:, 1], np.round(q[:, 0] / DEDUP_TOL)))]
    step = np.linalg.norm(np.diff(q, axis=0), axis=1)
    q = q[np.concatenate([[True], step > DEDUP_TOL])]
    if q.shape[0] == 1:
        return PlanarRegion(q * scale + lo)
    hull = _monotone_chain(np.ascontiguousarray(q), COLLINEAR_TOL)
    if hull.shape[0] < 3:
        # (numerically) collinear input: the segment between the farthest pair
        a = q[np.argmax(np.linalg.norm(q - q[0], axis=1))]
        b = q[np.argmax(np.linalg.norm(q - a, axis=1))]
        hull = np.array([a, b]) if np.linalg.norm(a - b) > DEDUP_TOL else a[None, :]
        hull = hull[np.lexsort((hull[:, 1], hull[:, 0]))]
    return PlanarRegion(hull * scale + lo)


def _segment_distance(p: np.ndarray, a: np.ndarray, b: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Distances from ``p`` to segments ``a[i]b[i]`` and the closest points."""
    ab = b - a
    denom = np.sum(ab * ab, axis=1)
    t = np.where(denom > 0, np.sum((p - a) * ab, axis=1) / np.where(denom > 0, denom, 1.0), 0.0)
    t = np.clip(t, 0.0, 1.0)
    c = a + t[:, None] * ab
    return np.linalg.norm(p - c, axis=1), c


def nearest_point(region: PlanarRegion, p) -> np.ndarray:
    """Closest point of the region (as a filled set) to ``p``."""
    p = np.asarray(p, dtype=float)
    if signed_distance(region, p) <= 0.0:
        return p.copy()
    v = region.vertices
    if len(region) == 1:
        return v[0].copy()
    a, b = region.edges() if len(region) > 2 else (v[:1], v[1:2])
    d, c = _segment_distance(p, a, b)
    return c[int(np.argmin(d))]


def signed_distance(region: PlanarRegion, p) -> float:
    """Euclidean distance to the region, negated depth for interior points."""
    p = np.asarray(p, dtype=float)
    v = region.vertices
    if len(region) == 1:
        return float(np.linalg.norm(p - v[0]))
    if len(region) == 2:
        d, _ = _segment_distance(p, v[:1], v[1:2])
        return float(d[0])
    a, b = region.edges()
    e = b - a
    lengths = np.linalg.norm(e, axis=1)
    # outward-positive distance to each supporting line (CCW orientation)
    line = (e[:, 0] * (p[1] - a[:, 1]) - e[:, 1] * (p[0] - a[:, 0])) / lengths
    if np.all(line >= 0.0):
        return -float(np.min(line))
    d, _ = _segment_distance(p, a, b)
    return float(np.min(d))


def contains(region: PlanarRegion, p, tol: float = MEMBERSHIP_TOL) -> str:
    """Classify ``p`` as ``"inside"``, ``"boundary"`` or ``"outside"``.

    The boundary band has half-width ``tol * diameter`` (``tol`` alone for a
    single-point region).
    """
    band = tol * (region.diameter or 1.0)
    d = signed_distance(region, p)
    if d > band:
        return OUTSIDE
    if d >= -band or region.is_degenerate:
        return BOUNDARY
    return INSIDE


class Separation(NamedTuple):
    """Unit normal ``(k1, k2)`` with ``k.v - k.p >= margin > 0`` for all region points ``v``."""

    k1: float
    k2: float
    margin: float

    @property
    def direction(self) -> np.ndarray:
        return np.array([self.k1, self.k2])


def separating_direction(region: PlanarRegion, p, tol: float = MEMBERSHIP_TOL) -> Separation | None:
    """Line strictly separating an outside point from the region.

    The normal points from ``p`` towards its nearest region point, so
    ``k.p < k.v`` for every vertex ``v``. Returns ``None`` unless ``p`` is
    classified outside.
    """
    p = np.asarray(p, dtype=float)
    if contains(region, p, tol) != OUTSIDE:
        return None
    q = nearest_point(region, p)
    k = (q - p) / np.linalg.norm(q - p)
    margin = region.support(k) - float(k @ p)
    return Separation(float(k[0]), float(k[1]), float(margin))


def hausdorff(a: PlanarRegion, b: PlanarRegion) -> float:
    """Hausdorff distance between two convex regions (taken as filled sets).

    For convex sets the distance to the other set is convex, so its maximum
    over a polygon is attained at a vertex.
    """
    da = max(max(signed_distance(b, v), 0.0) for v in a.vertices)
    db = max(max(signed_distance(a, v), 0.0) for v in b.vertices)
    return float(max(da, db)) + 0.0
