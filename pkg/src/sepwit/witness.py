"""Witnesses built from product pairs, and the tests that decide when they exist.

A witness here is ``W_min(H) = H - m I`` with ``m`` the product-state
minimum of ``H = k1 H1 + k2 H2`` (or the mirror image ``W_max``). It is
block-positive by construction and a genuine witness exactly when the
global minimum eigenvalue of ``H`` lies strictly below ``m``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import OUTSIDE, PlanarRegion, Separation, contains, separating_direction, signed_distance
from .linalg import (
    DensityState,
    InvalidInputError,
    as_hermitian,
    eig_hermitian,
    eigenspaces,
    expectation,
    schmidt,
)
from .optimize import OptimizerConfig, SepExtremum, sep_max, sep_max_operator, sep_min
from .ranges import ProductPair, product_cloud, random_product_vectors

__all__ = [
    "WitnessReport",
    "Detection",
    "StateDetection",
    "CommonEigenvectorRecord",
    "EffectivenessVerdict",
    "GroundStateReport",
    "build_witness",
    "sampled_block_positivity",
    "detection_check",
    "detect_state",
    "common_eigenvectors",
    "effectiveness_check",
    "product_overlap",
    "eigenspace_product_test",
    "ground_state_scan",
    "CONTAINS_PRODUCT",
    "ENTANGLED_ONLY",
    "INCONCLUSIVE",
]

WITNESS_MARGIN = 1e-7
BLOCK_POSITIVITY_TOL = 1e-7
BLOCK_POSITIVITY_SAMPLES = 1000
DETECTION_TOL = 1e-9
COMMON_EIGVEC_TOL = 1e-8
ZERO_EIGENVALUE_TOL = 1e-9
COMMUTATOR_TOL = 1e-12

CONTAINS_PRODUCT = "contains_product"
ENTANGLED_ONLY = "entangled_only"
INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class WitnessReport:
    """``W`` for one direction ``(k1, k2)`` and one side, with its verdict.

    ``status`` is ``"witness"``, ``"boundary"`` (global and product extrema
    agree within the margin, so nothing is claimed) or ``"not_witness"``.
    ``certified`` is false when the seesaw did not converge.
    """

    W: np.ndarray
    side: str
    k1: float
    k2: float
    sep_extremum: float
    global_extremum: float
    is_witness: bool
    status: str
    certifying_eigvec: np.ndarray
    sep_alpha: np.ndarray
    sep_beta: np.ndarray
    block_positivity_min: float
    certified: bool

    @property
    def gap(self) -> float:
        """How far the global extremum beats the product extremum (positive for witnesses)."""
        if self.side == "min":
            return self.sep_extremum - self.global_extremum
        return self.global_extremum - self.sep_extremum


def sampled_block_positivity(w, dim_a: int, dim_b: int, n_samples: int = BLOCK_POSITIVITY_SAMPLES,
                             seed: int = 0) -> float:
    """Smallest ``<ab|W|ab>`` over seeded Haar-random product vectors."""
    w = np.asarray(w, dtype=np.complex128)
    a, b = random_product_vectors(dim_a, dim_b, n_samples, np.random.default_rng(seed))
    psi = (a[:, :, None] * b[:, None, :]).reshape(n_samples, dim_a * dim_b)
    return float(np.min(np.einsum("ni,ij,nj->n", psi.conj(), w, psi).real))


def build_witness(pair: ProductPair, k1: float, k2: float, side: str = "min",
                  cfg: OptimizerConfig | None = None) -> WitnessReport:
    """Construct ``W_min`` (or ``W_max``) of ``k1 H1 + k2 H2`` and decide whether it is a witness."""
    if side not in ("min", "max"):
        raise InvalidInputError(f"side must be 'min' or 'max', got {side!r}")
    if k1 == 0 and k2 == 0:
        raise InvalidInputError("(k1, k2) must not both vanish")
    cfg = cfg or OptimizerConfig()
    h = pair.combination(k1, k2)
    ident = np.eye(pair.dim)
    spec = eig_hermitian(h)
    if side == "min":
        ext = sep_min(pair, k1, k2, cfg)
        w = h - ext.value * ident
        glob = float(spec.eigenvalues[0])
        vec = spec.eigenvectors[:, 0]
        gap = ext.value - glob
    else:
        ext = sep_max(pair, k1, k2, cfg)
        w = ext.value * ident - h
        glob = float(spec.eigenvalues[-1])
        vec = spec.eigenvectors[:, -1]
        gap = glob - ext.value
    margin = WITNESS_MARGIN * (1.0 + abs(ext.value))
    if gap > margin:
        status = "witness"
    elif gap >= -margin:
        status = "boundary"
    else:
        # a product state beat the global extremum: numerical failure upstream
        status = "not_witness"
    bp = sampled_block_positivity(w, pair.dim_a, pair.dim_b, seed=cfg.seed)
    return WitnessReport(
        W=w,
        side=side,
        k1=float(k1),
        k2=float(k2),
        sep_extremum=ext.value,
        global_extremum=glob,
        is_witness=status == "witness",
        status=status,
        certifying_eigvec=np.array(vec),
        sep_alpha=ext.alpha,
        sep_beta=ext.beta,
        block_positivity_min=bp,
        certified=ext.converged,
    )


@dataclass(frozen=True)
class Detection:
    detected: bool
    value: float


def detection_check(report: WitnessReport, state: DensityState, tol: float = DETECTION_TOL) -> Detection:
    """``Tr(W rho) < -tol`` means ``rho`` lies in the detection range of ``W``."""
    if report.W.shape[0] != state.dim:
        raise InvalidInputError(f"witness dimension {report.W.shape[0]} != state dimension {state.dim}")
    value = expectation(report.W, state)
    return Detection(value < -tol, value)


@dataclass(frozen=True)
class StateDetection:
    """Geometric verdict on ``(Tr(H1 rho), Tr(H2 rho))`` and its witness cross-check."""

    detected: bool
    point: tuple[float, float]
    classification: str
    distance: float
    direction: Separation | None = None
    witness: WitnessReport | None = None
    witness_value: float | None = None

    @property
    def consistent(self) -> bool:
        """Both views agree: outside the region iff the returned witness fires."""
        if not self.detected:
            return self.witness is None
        return self.witness_value is not None and self.witness_value < 0


def _check_region(pair: ProductPair, region: PlanarRegion, n_probe: int = 64) -> None:
    pts = product_cloud(pair, n_probe, seed=12345)
    band = 1e-6 * (region.diameter or 1.0)
    worst = max(signed_distance(region, p) for p in pts)
    if worst > band:
        raise InvalidInputError(
            f"region does not contain product-state points of this pair (excess {worst:.3e})"
        )


def detect_state(pair: ProductPair, state: DensityState, region: PlanarRegion,
                 cfg: OptimizerConfig | None = None, tol: float = 1e-7) -> StateDetection:
    """Decide entanglement of ``state`` from the separable range of ``pair``.

    A point outside ``region`` is separated by a line with normal ``k``
    (``k.point < k.sigma`` for separable points); ``W_min(k1 H1 + k2 H2)``
    for that direction must then have negative expectation on ``state``.
    """
    if state.dim_a != pair.dim_a or state.dim_b != pair.dim_b:
        raise InvalidInputError("state and pair subsystem dimensions differ")
    _check_region(pair, region)
    point = (expectation(pair.H1, state), expectation(pair.H2, state))
    cls = contains(region, point, tol)
    dist = signed_distance(region, point)
    if cls != OUTSIDE:
        return StateDetection(False, point, cls, dist)
    sep = separating_direction(region, point, tol)
    report = build_witness(pair, sep.k1, sep.k2, "min", cfg)
    value = expectation(report.W, state)
    return StateDetection(True, point, cls, dist, sep, report, value)


@dataclass(frozen=True)
class CommonEigenvectorRecord:
    vector: np.ndarray
    a1: float
    a2: float

    def is_zero(self, scale1: float = 0.0, scale2: float = 0.0) -> bool:
        return (abs(self.a1) <= ZERO_EIGENVALUE_TOL * (1.0 + scale1)
                and abs(self.a2) <= ZERO_EIGENVALUE_TOL * (1.0 + scale2))


def common_eigenvectors(a1, a2, tol: float = COMMON_EIGVEC_TOL) -> list[CommonEigenvectorRecord]:
    """Orthonormal bases of every intersection of an eigenspace of ``a1`` with one of ``a2``.

    For each pair of (grouped) eigenspaces with projectors ``P`` and ``Q``
    the intersection is the null space of ``[(I - P); (I - Q)]``, read off
    its SVD with singular-value threshold ``tol``.
    """
    a1 = as_hermitian(a1, "A1")
    a2 = as_hermitian(a2, "A2")
    if a1.shape != a2.shape:
        raise InvalidInputError("operators differ in dimension")
    d = a1.shape[0]
    ident = np.eye(d)
    out = []
    for _, u in eigenspaces(eig_hermitian(a1)):
        p = ident - u @ u.conj().T
        for _, v in eigenspaces(eig_hermitian(a2)):
            q = ident - v @ v.conj().T
            _, s, vh = np.linalg.svd(np.vstack([p, q]))
            null = vh[s <= tol].conj()
            for vec in null:
                k = int(np.argmax(np.abs(vec)))
                vec = vec * (abs(vec[k]) / vec[k])
                out.append(CommonEigenvectorRecord(
                    vec,
                    float(np.vdot(vec, a1 @ vec).real),
                    float(np.vdot(vec, a2 @ vec).real),
                ))
    return out


@dataclass(frozen=True)
class EffectivenessVerdict:
    commuting_A: bool
    commuting_B: bool
    common_A: list[CommonEigenvectorRecord]
    common_B: list[CommonEigenvectorRecord]
    cor1_satisfied: bool
    thm1_satisfied: bool
    nonzero: bool

    @property
    def guarantees_witness(self) -> bool:
        """Every ``k1 k2 != 0`` then yields a witness on the min or the max side."""
        return self.cor1_satisfied and self.nonzero


def _commute(x: np.ndarray, y: np.ndarray) -> bool:
    c = np.linalg.norm(x @ y - y @ x)
    return bool(c <= COMMUTATOR_TOL * max(1.0, np.linalg.norm(x) * np.linalg.norm(y)))


def _spectral_radius(x: np.ndarray) -> float:
    return float(np.max(np.abs(eig_hermitian(x).eigenvalues)))


def effectiveness_check(pair: ProductPair) -> EffectivenessVerdict:
    common_a = common_eigenvectors(pair.A1, pair.A2)
    common_b = common_eigenvectors(pair.B1, pair.B2)
    ra1, ra2 = _spectral_radius(pair.A1), _spectral_radius(pair.A2)
    rb1, rb2 = _spectral_radius(pair.B1), _spectral_radius(pair.B2)
    only_zero = (all(r.is_zero(ra1, ra2) for r in common_a)
                 and all(r.is_zero(rb1, rb2) for r in common_b))
    nonzero = bool(np.any(pair.H1) or np.any(pair.H2))
    return EffectivenessVerdict(
        commuting_A=_commute(pair.A1, pair.A2),
        commuting_B=_commute(pair.B1, pair.B2),
        common_A=common_a,
        common_B=common_b,
        cor1_satisfied=only_zero,
        thm1_satisfied=not common_a and not common_b,
        nonzero=nonzero,
    )


def product_overlap(basis, dim_a: int, dim_b: int, cfg: OptimizerConfig | None = None) -> SepExtremum:
    """Largest ``<ab|P|ab>`` over product vectors, ``P`` the projector onto the span of ``basis``."""
    b = np.asarray(basis, dtype=np.complex128)
    if b.ndim == 1:
        b = b[:, None]
    proj = b @ b.conj().T
    return sep_max_operator(proj, dim_a, dim_b, cfg)


def eigenspace_product_test(basis, dim_a: int, dim_b: int, cfg: OptimizerConfig | None = None) -> str:
    """Does the span of the orthonormal columns of ``basis`` contain a product vector?

    One-dimensional spans are decided exactly by Schmidt rank. Larger spans
    use a seesaw on the product-state overlap with the span projector:
    overlap above ``1 - 1e-9`` means a product vector is present, below
    ``1 - 1e-6`` after all restarts means none was found.
    """
    b = np.asarray(basis, dtype=np.complex128)
    if b.ndim == 1:
        b = b[:, None]
    if b.shape[0] != dim_a * dim_b:
        raise InvalidInputError("basis vectors do not match the bipartition")
    if b.shape[1] == 1:
        return CONTAINS_PRODUCT if schmidt(b[:, 0], dim_a, dim_b).is_product else ENTANGLED_ONLY
    best = product_overlap(b, dim_a, dim_b, cfg).value
    if best > 1 - 1e-9:
        return CONTAINS_PRODUCT
    if best < 1 - 1e-6:
        return ENTANGLED_ONLY
    return INCONCLUSIVE


@dataclass(frozen=True)
class GroundStateReport:
    k1: float
    k2: float
    min_eigenvalue: float
    max_eigenvalue: float
    min_multiplicity: int
    max_multiplicity: int
    min_verdict: str
    max_verdict: str

    @property
    def side_entangled(self) -> str:
        lo = self.min_verdict == ENTANGLED_ONLY
        hi = self.max_verdict == ENTANGLED_ONLY
        return {(True, True): "both", (True, False): "min", (False, True): "max"}.get((lo, hi), "neither")

    @property
    def flagged(self) -> bool:
        return INCONCLUSIVE in (self.min_verdict, self.max_verdict)


def ground_state_scan(pair: ProductPair, k_grid, cfg: OptimizerConfig | None = None) -> list[GroundStateReport]:
    """Check whether the lowest and highest eigenspaces of ``k1 H1 + k2 H2`` hold product vectors."""
    out = []
    for k1, k2 in k_grid:
        if k1 * k2 == 0:
            raise InvalidInputError(f"ground_state_scan needs k1*k2 != 0, got ({k1}, {k2})")
        spaces = eigenspaces(eig_hermitian(pair.combination(k1, k2)))
        lo_val, lo = spaces[0]
        hi_val, hi = spaces[-1]
        out.append(GroundStateReport(
            float(k1), float(k2), lo_val, hi_val, lo.shape[1], hi.shape[1],
            eigenspace_product_test(lo, pair.dim_a, pair.dim_b, cfg),
            eigenspace_product_test(hi, pair.dim_a, pair.dim_b, cfg),
        ))
    return out
