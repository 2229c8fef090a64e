"""Numerical experiments around common eigenvectors and weak perturbations.

``deflation_hull_check`` tests that deflating a common eigenvector ``v``
(eigenvalues ``a1, a2``) shrinks the joint range to a set whose convex hull
with ``P0 = (a1, a2)`` is the original range, when the original range
contains the origin.

``perturbation_scan`` follows the ground space of ``H1 + x H2`` for small
``x`` and records whether it still holds a product vector, next to the
local-eigenvector condition on the unperturbed product ground state.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import OUTSIDE, contains, convex_hull, hausdorff
from .linalg import InvalidInputError, as_hermitian, eig_hermitian, eigenspaces, schmidt
from .optimize import OptimizerConfig
from .ranges import DEFAULT_ANGLES, ProductPair, joint_range, supporting_points
from .witness import CONTAINS_PRODUCT, common_eigenvectors, eigenspace_product_test

__all__ = [
    "HullIdentityResult",
    "PerturbationRow",
    "PerturbationScan",
    "deflation_hull_check",
    "perturbation_scan",
    "DEFAULT_X_GRID",
]

HULL_TOL = 2e-3
EIGENVECTOR_TOL = 1e-8
DEFAULT_X_GRID = (-1e-2, -1e-3, -1e-4, 1e-4, 1e-3, 1e-2)


@dataclass(frozen=True)
class HullIdentityResult:
    status: str  # "holds", "fails" or "skipped"
    hausdorff: float
    diameter: float
    p0: tuple[float, float] | None
    reason: str = ""

    @property
    def holds(self) -> bool:
        return self.status == "holds"


def deflation_hull_check(a1, a2, n_angles: int = DEFAULT_ANGLES) -> HullIdentityResult:
    """Compare ``Lambda(A1, A2)`` with ``conv(Lambda(A1', A2') + {P0})``.

    Skipped unless the pair has exactly one common eigenvector and its joint
    range does not exclude the origin.
    """
    a1 = as_hermitian(a1, "A1")
    a2 = as_hermitian(a2, "A2")
    recs = common_eigenvectors(a1, a2)
    if len(recs) != 1:
        return HullIdentityResult("skipped", float("nan"), float("nan"), None,
                                  f"expected one common eigenvector, found {len(recs)}")
    rec = recs[0]
    full = joint_range(a1, a2, n_angles)
    if contains(full, (0.0, 0.0)) == OUTSIDE:
        return HullIdentityResult("skipped", float("nan"), full.diameter, (rec.a1, rec.a2),
                                  "joint range does not contain the origin")
    vv = np.outer(rec.vector, rec.vector.conj())
    pts = supporting_points(a1 - rec.a1 * vv, a2 - rec.a2 * vv, n_angles)
    rebuilt = convex_hull(np.vstack([pts, [[rec.a1, rec.a2]]]))
    dist = hausdorff(full, rebuilt)
    diam = full.diameter
    status = "holds" if dist <= HULL_TOL * diam else "fails"
    return HullIdentityResult(status, dist, diam, (rec.a1, rec.a2))


@dataclass(frozen=True)
class PerturbationRow:
    x: float
    ground_energy: float
    ground_degenerate: bool
    separable_ground_exists: bool
    verdict: str


@dataclass(frozen=True)
class PerturbationScan:
    """Rows per ``x`` plus the local-eigenvector condition on the product ground state.

    ``local_condition`` is ``None`` when the unperturbed ground state is
    entangled (``status == "ill_posed"``).
    """

    rows: list[PerturbationRow]
    local_condition: bool | None
    status: str
    alpha: np.ndarray | None = None
    beta: np.ndarray | None = None

    @property
    def consistent(self) -> bool:
        """Separable ground states for every scanned ``x`` iff the condition holds.

        ``x = 0`` is excluded when the condition fails, since the unperturbed
        ground state is a product by assumption.
        """
        if self.local_condition is None:
            return False
        if self.local_condition:
            return all(r.separable_ground_exists for r in self.rows)
        return not any(r.separable_ground_exists for r in self.rows if r.x != 0)


def _is_eigenvector(op: np.ndarray, v: np.ndarray) -> bool:
    mu = np.vdot(v, op @ v)
    return float(np.linalg.norm(op @ v - mu * v)) <= EIGENVECTOR_TOL * (1.0 + float(np.linalg.norm(op, 2)))


def perturbation_scan(pair: ProductPair, x_values=DEFAULT_X_GRID,
                      cfg: OptimizerConfig | None = None) -> PerturbationScan:
    """Track product vectors in the ground space of ``H1 + x H2`` over ``x_values``.

    Raises :class:`InvalidInputError` if the ground state of ``H1`` is
    degenerate.
    """
    h1, h2 = pair.H1, pair.H2
    ground = eigenspaces(eig_hermitian(h1))[0][1]
    if ground.shape[1] != 1:
        raise InvalidInputError(f"ground space of H1 is {ground.shape[1]}-fold degenerate")
    sa = schmidt(ground[:, 0], pair.dim_a, pair.dim_b)
    if sa.is_product:
        alpha, beta = sa.left[:, 0], sa.right[:, 0]
        local = _is_eigenvector(pair.A2, alpha) or _is_eigenvector(pair.B2, beta)
        status = "ok"
    else:
        alpha = beta = None
        local = None
        status = "ill_posed"
    rows = []
    for x in x_values:
        energy, basis = eigenspaces(eig_hermitian(h1 + x * h2))[0]
        verdict = eigenspace_product_test(basis, pair.dim_a, pair.dim_b, cfg)
        rows.append(PerturbationRow(float(x), energy, basis.shape[1] > 1, verdict == CONTAINS_PRODUCT, verdict))
    return PerturbationScan(rows, local, status, alpha, beta)
