"""Joint numerical ranges and separable ranges of product pairs.

The joint range of ``(H1, H2)`` is traced with supporting lines: for each
angle the lowest eigenvector of ``cos(t) H1 + sin(t) H2`` touches the
boundary. The result is an inner approximation of the true convex range.

For a product pair ``H_i = A_i (x) B_i`` the product-vector image is the set
of coordinate-wise products ``(x1 x2, y1 y2)`` of a point of the A-factor
range with a point of the B-factor range, and the separable range is its
convex hull.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import PlanarRegion, convex_hull
from .linalg import InvalidInputError, _jacobi_kernel, as_hermitian, JACOBI_MAX_SWEEPS, JACOBI_TOL

__all__ = [
    "ProductPair",
    "supporting_points",
    "joint_range",
    "factor_samples",
    "separable_range",
    "product_cloud",
    "random_product_vectors",
    "DEFAULT_ANGLES",
    "DEFAULT_FILL",
]

DEFAULT_ANGLES = 720
DEFAULT_FILL = 10_000


@dataclass(frozen=True)
class ProductPair:
    """Four local observables defining ``H1 = A1 (x) B1`` and ``H2 = A2 (x) B2``."""

    A1: np.ndarray
    A2: np.ndarray
    B1: np.ndarray
    B2: np.ndarray

    def __post_init__(self):
        for name in ("A1", "A2", "B1", "B2"):
            object.__setattr__(self, name, as_hermitian(getattr(self, name), name))
        if self.A1.shape != self.A2.shape:
            raise InvalidInputError(f"A1 {self.A1.shape} and A2 {self.A2.shape} differ in dimension")
        if self.B1.shape != self.B2.shape:
            raise InvalidInputError(f"B1 {self.B1.shape} and B2 {self.B2.shape} differ in dimension")

    @property
    def dim_a(self) -> int:
        return self.A1.shape[0]

    @property
    def dim_b(self) -> int:
        return self.B1.shape[0]

    @property
    def dim(self) -> int:
        return self.dim_a * self.dim_b

    @property
    def H1(self) -> np.ndarray:
        return np.kron(self.A1, self.B1)

    @property
    def H2(self) -> np.ndarray:
        return np.kron(self.A2, self.B2)

    def combination(self, k1: float, k2: float) -> np.ndarray:
        """``k1 A1 (x) B1 + k2 A2 (x) B2``."""
        if not (np.isfinite(k1) and np.isfinite(k2)):
            raise InvalidInputError("coefficients must be finite")
        return k1 * self.H1 + k2 * self.H2

    def swap(self) -> "ProductPair":
        """The same pair with the roles of the two subsystems exchanged."""
        return ProductPair(self.B1, self.B2, self.A1, self.A2)


def _sweep_angles(n_angles: int) -> np.ndarray:
    if n_angles < 8:
        raise InvalidInputError(f"n_angles must be at least 8, got {n_angles}")
    return 2.0 * np.pi * np.arange(n_angles) / n_angles


def supporting_points(h1, h2, n_angles: int = DEFAULT_ANGLES) -> np.ndarray:
    """Boundary points ``(<v|H1|v>, <v|H2|v>)`` from the supporting-line sweep."""
    h1 = as_hermitian(h1, "H1")
    h2 = as_hermitian(h2, "H2")
    if h1.shape != h2.shape:
        raise InvalidInputError(f"H1 {h1.shape} and H2 {h2.shape} differ in dimension")
    out = np.empty((n_angles, 2))
    for j, t in enumerate(_sweep_angles(n_angles)):
        m = np.ascontiguousarray(np.cos(t) * h1 + np.sin(t) * h2)
        _, v, _, _ = _jacobi_kernel(m, JACOBI_TOL, JACOBI_MAX_SWEEPS)
        x = v[:, 0]
        out[j] = np.vdot(x, h1 @ x).real, np.vdot(x, h2 @ x).real
    return out


def joint_range(h1, h2, n_angles: int = DEFAULT_ANGLES) -> PlanarRegion:
    """Inner polygonal approximation of the joint numerical range of ``(H1, H2)``."""
    return convex_hull(supporting_points(h1, h2, n_angles))


def _fan_fill(region: PlanarRegion, target: int) -> np.ndarray:
    """Barycentric grid over the fan of triangles (centroid, v_i, v_i+1)."""
    v = region.vertices
    if len(region) == 1:
        return v.copy()
    if len(region) == 2:
        t = np.linspace(0.0, 1.0, max(target, 2))[:, None]
        return v[0] + t * (v[1] - v[0])
    m = len(region)
    level = 1
    while m * (level + 1) * (level + 2) // 2 < target:
        level += 1
    i, j = np.meshgrid(np.arange(level + 1), np.arange(level + 1), indexing="ij")
    mask = i + j <= level
    wi = i[mask] / level
    wj = j[mask] / level
    wc = 1.0 - wi - wj
    c = v.mean(axis=0)
    a, b = v, np.roll(v, -1, axis=0)
    pts = wc[None, :, None] * c + wi[None, :, None] * a[:, None, :] + wj[None, :, None] * b[:, None, :]
    return pts.reshape(-1, 2)


def factor_samples(a1, a2, n_angles: int = DEFAULT_ANGLES, fill: int = DEFAULT_FILL):
    """Boundary and interior samples of the joint range of one factor pair.

    Returns ``(boundary, interior)``; the interior is a barycentric grid of at
    least ``fill`` points inside the supporting-line polygon.
    """
    boundary = supporting_points(a1, a2, n_angles)
    interior = _fan_fill(convex_hull(boundary), fill) if fill > 0 else np.empty((0, 2))
    return boundary, interior


def _products(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    return (p[:, None, :] * q[None, :, :]).reshape(-1, 2)


def separable_range(pair: ProductPair, n_angles: int = DEFAULT_ANGLES, fill: int = DEFAULT_FILL) -> PlanarRegion:
    """Convex hull of coordinate-wise products of the two factor ranges.

    Each factor contributes its supporting-line boundary points and an
    interior fill. Interior samples of one factor are multiplied with the
    boundary samples of the other; the objective ``k1 x1 x2 + k2 y1 y2`` is
    linear in each factor separately, so pairing interior with interior
    adds no hull vertices.
    """
    bnd_a, int_a = factor_samples(pair.A1, pair.A2, n_angles, fill)
    bnd_b, int_b = factor_samples(pair.B1, pair.B2, n_angles, fill)
    hull_pts = [_chunked_hull(bnd_a, bnd_b)]
    if int_a.size:
        hull_pts.append(_chunked_hull(int_a, bnd_b))
    if int_b.size:
        hull_pts.append(_chunked_hull(bnd_a, int_b))
    return convex_hull(np.concatenate(hull_pts))


def _chunked_hull(p: np.ndarray, q: np.ndarray, chunk_size: int = 400_000) -> np.ndarray:
    # hull vertices of all products, reduced chunk by chunk to bound memory
    rows = max(1, chunk_size // max(q.shape[0], 1))
    kept = [convex_hull(_products(p[i:i + rows], q)).vertices for i in range(0, p.shape[0], rows)]
    return np.concatenate(kept)


def random_product_vectors(dim_a: int, dim_b: int, n: int, rng: np.random.Generator):
    """Haar-random unit vectors per factor via normalized complex Gaussians."""
    a = rng.normal(size=(n, dim_a)) + 1j * rng.normal(size=(n, dim_a))
    b = rng.normal(size=(n, dim_b)) + 1j * rng.normal(size=(n, dim_b))
    a /= np.linalg.norm(a, axis=1, keepdims=True)
    b /= np.linalg.norm(b, axis=1, keepdims=True)
    return a, b


def _local_expectations(op: np.ndarray, vecs: np.ndarray) -> np.ndarray:
    return np.einsum("ni,ij,nj->n", vecs.conj(), op, vecs).real


def product_cloud(pair: ProductPair, n_samples: int, seed: int = 0) -> np.ndarray:
    """``n_samples`` points ``(<ab|H1|ab>, <ab|H2|ab>)`` for Haar-random product vectors."""
    if n_samples < 0:
        raise InvalidInputError("n_samples must be non-negative")
    if n_samples == 0:
        return np.empty((0, 2))
    rng = np.random.default_rng(seed)
    a, b = random_product_vectors(pair.dim_a, pair.dim_b, n_samples, rng)
    x = _local_expectations(pair.A1, a) * _local_expectations(pair.B1, b)
    y = _local_expectations(pair.A2, a) * _local_expectations(pair.B2, b)
    return np.stack([x, y], axis=1)
