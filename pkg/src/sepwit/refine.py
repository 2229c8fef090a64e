"""Removing common eigenvectors from a product pair.

If ``v`` is a common eigenvector of ``A1`` and ``A2`` with eigenvalues
``(a1, a2)``, replacing ``A_i`` by ``A_i - a_i |v><v|`` leaves a pair whose
common eigenvectors on that side all have eigenvalue zero.
:func:`dominance_certificate` compares the ``W_min`` operators of the
original and the refined pair for a fixed direction ``(k1, k2)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import InvalidInputError, as_hermitian, eig_hermitian
from .optimize import OptimizerConfig, sep_min
from .ranges import ProductPair
from .witness import (
    BLOCK_POSITIVITY_SAMPLES,
    BLOCK_POSITIVITY_TOL,
    CommonEigenvectorRecord,
    common_eigenvectors,
    sampled_block_positivity,
)

__all__ = [
    "Refinement",
    "DominanceCertificate",
    "remove_common_eigenvector",
    "refine_pair",
    "dominance_certificate",
    "block_positive_projection_check",
]

DOMINANCE_TOL = 1e-7
INVARIANCE_TOL = 1e-9


@dataclass(frozen=True)
class Refinement:
    refined: ProductPair
    removed_A: list[CommonEigenvectorRecord]
    removed_B: list[CommonEigenvectorRecord]

    @property
    def changed(self) -> bool:
        return bool(self.removed_A or self.removed_B)

    @property
    def fully_reducible(self) -> bool:
        """Both refined product operators vanish."""
        r = self.refined
        return not (np.any(r.H1) or np.any(r.H2))


def _spectral_radius(x) -> float:
    return float(np.max(np.abs(eig_hermitian(x).eigenvalues)))


def _nonzero_common(x1, x2) -> list[CommonEigenvectorRecord]:
    r1, r2 = _spectral_radius(x1), _spectral_radius(x2)
    return [r for r in common_eigenvectors(x1, x2) if not r.is_zero(r1, r2)]


def remove_common_eigenvector(pair: ProductPair, side: str = "A"):
    """One removal step on one side; returns ``(new_pair, record)`` or ``(pair, None)``."""
    if side not in ("A", "B"):
        raise InvalidInputError("side must be 'A' or 'B'")
    x1, x2 = (pair.A1, pair.A2) if side == "A" else (pair.B1, pair.B2)
    found = _nonzero_common(x1, x2)
    if not found:
        return pair, None
    rec = found[0]
    vv = np.outer(rec.vector, rec.vector.conj())
    y1, y2 = x1 - rec.a1 * vv, x2 - rec.a2 * vv
    if side == "A":
        return ProductPair(y1, y2, pair.B1, pair.B2), rec
    return ProductPair(pair.A1, pair.A2, y1, y2), rec


def refine_pair(pair: ProductPair) -> Refinement:
    """Strip every common eigenvector with a nonzero eigenvalue pair, A side first, then B.

    Each side is repeated until no such eigenvector is left, so the result
    has only zero-eigenvalue common eigenvectors (or vanishing factors).
    """
    removed = {"A": [], "B": []}
    current = pair
    for side, dim in (("A", pair.dim_a), ("B", pair.dim_b)):
        for _ in range(dim + 1):
            current, rec = remove_common_eigenvector(current, side)
            if rec is None:
                break
            removed[side].append(rec)
        else:
            raise RuntimeError(f"refinement of side {side} did not reach a fixed point")
    return Refinement(current, removed["A"], removed["B"])


@dataclass(frozen=True)
class DominanceCertificate:
    """Result of testing ``W_min(pair) - W_min(refined) >= 0`` for one ``(k1, k2)``.

    ``status`` is ``"holds"``, ``"fails"`` or ``"inconclusive"`` (seesaw not
    converged).
    """

    holds: bool
    difference_min_eigenvalue: float
    sep_min_pair: float
    sep_min_refined: float
    status: str


def dominance_certificate(pair: ProductPair, refined: ProductPair, k1: float, k2: float,
                          cfg: OptimizerConfig | None = None) -> DominanceCertificate:
    if (pair.dim_a, pair.dim_b) != (refined.dim_a, refined.dim_b):
        raise InvalidInputError("pair and refined pair differ in dimensions")
    cfg = cfg or OptimizerConfig()
    ident = np.eye(pair.dim)
    e_pair = sep_min(pair, k1, k2, cfg)
    e_ref = sep_min(refined, k1, k2, cfg)
    w_pair = pair.combination(k1, k2) - e_pair.value * ident
    w_ref = refined.combination(k1, k2) - e_ref.value * ident
    lam = float(eig_hermitian(w_pair - w_ref).eigenvalues[0])
    holds = lam >= -DOMINANCE_TOL
    if not (e_pair.converged and e_ref.converged):
        status = "inconclusive"
    else:
        status = "holds" if holds else "fails"
    return DominanceCertificate(holds, lam, e_pair.value, e_ref.value, status)


def block_positive_projection_check(w, dim_a: int, dim_b: int, qa_basis,
                                    n_samples: int = BLOCK_POSITIVITY_SAMPLES, seed: int = 0) -> bool:
    """Sampled block-positivity of ``W`` restricted to ``Q_A (x) C^dB`` and to its complement.

    Both subspaces must be invariant under ``W``; otherwise the restrictions
    are not projections of ``W`` and :class:`InvalidInputError` is raised.
    """
    w = as_hermitian(w, "W")
    if w.shape[0] != dim_a * dim_b:
        raise InvalidInputError("W does not match the bipartition")
    q = np.asarray(qa_basis, dtype=np.complex128)
    if q.ndim == 1:
        q = q[:, None]
    q, _ = np.linalg.qr(q)
    p1 = np.kron(q @ q.conj().T, np.eye(dim_b))
    p2 = np.eye(dim_a * dim_b) - p1
    residual = np.max(np.abs(p1 @ w - w @ p1))
    if residual > INVARIANCE_TOL * (1.0 + np.max(np.abs(w))):
        raise InvalidInputError(f"subspace is not invariant under W (residual {residual:.3e})")
    lows = [sampled_block_positivity(p @ w @ p, dim_a, dim_b, n_samples, seed) for p in (p1, p2)]
    return min(lows) >= -BLOCK_POSITIVITY_TOL
