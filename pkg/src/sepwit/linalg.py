"""Dense complex linear algebra for small bipartite systems.

Everything here works on plain ``numpy`` arrays. Hermitian inputs are
validated by :func:`as_hermitian`, which symmetrizes within tolerance and
rejects anything further off. The eigensolver is a cyclic complex Jacobi
iteration compiled with numba; at the dimensions this package targets
(d <= 16) it is as fast as LAPACK and fully deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

__all__ = [
    "InvalidInputError",
    "ConvergenceError",
    "SpectralDecomposition",
    "SchmidtAnalysis",
    "DensityState",
    "as_hermitian",
    "as_vector",
    "eig_hermitian",
    "eigenspaces",
    "kron",
    "expectation",
    "schmidt",
    "partial_transpose",
    "is_psd",
    "min_eigenvalue",
    "pauli",
    "ket",
]

JACOBI_TOL = 1e-12
JACOBI_MAX_SWEEPS = 100
HERMITIAN_TOL = 1e-10
SCHMIDT_RANK_TOL = 1e-8
PSD_TOL = 1e-9
DEGENERACY_TOL = 1e-9
STATE_TOL = 1e-8


class InvalidInputError(ValueError):
    """Raised when an operator, vector or state fails validation."""


class ConvergenceError(RuntimeError):
    """Raised when an iterative routine exhausts its iteration budget."""


def as_hermitian(m, name: str = "operator") -> np.ndarray:
    """Validate ``m`` as a Hermitian matrix and return its symmetrized copy.

    Entries may deviate from exact Hermiticity by at most
    ``1e-10 * (1 + max|m|)``; the returned array is ``(m + m^H) / 2`` and is
    marked read-only.
    """
    arr = np.array(m, dtype=np.complex128)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] == 0:
        raise InvalidInputError(f"{name} must be a non-empty square matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError(f"{name} has non-finite entries")
    scale = 1.0 + (np.max(np.abs(arr)) if arr.size else 0.0)
    dev = np.max(np.abs(arr - arr.conj().T))
    if dev > HERMITIAN_TOL * scale:
        raise InvalidInputError(f"{name} is not Hermitian (max deviation {dev:.3e})")
    out = 0.5 * (arr + arr.conj().T)
    out.setflags(write=False)
    return out


def as_vector(v, name: str = "vector") -> np.ndarray:
    arr = np.array(v, dtype=np.complex128).reshape(-1)
    if arr.size == 0 or not np.all(np.isfinite(arr)):
        raise InvalidInputError(f"{name} must be a finite non-empty vector")
    return arr


@njit(cache=True)
def _jacobi_kernel(h, tol, max_sweeps):
    n = h.shape[0]
    a = h.copy()
    v = np.eye(n, dtype=np.complex128)
    fro = 0.0
    for i in range(n):
        for j in range(n):
            fro += a[i, j].real ** 2 + a[i, j].imag ** 2
    thresh = tol * np.sqrt(fro)
    sweeps = 0
    converged = False
    while True:
        off = 0.0
        for i in range(n):
            for j in range(n):
                if i != j:
                    off += a[i, j].real ** 2 + a[i, j].imag ** 2
        if np.sqrt(off) <= thresh:
            converged = True
            break
        if sweeps >= max_sweeps:
            break
        sweeps += 1
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                r = abs(apq)
                if r == 0.0:
                    continue
                phase = apq / r
                app = a[p, p].real
                aqq = a[q, q].real
                tau = (aqq - app) / (2.0 * r)
                if tau >= 0.0:
                    t = 1.0 / (tau + np.sqrt(1.0 + tau * tau))
                else:
                    t = -1.0 / (-tau + np.sqrt(1.0 + tau * tau))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                # U = diag(1, conj(phase)) @ [[c, s], [-s, c]] on the (p, q) plane
                upp = c + 0j
                upq = s + 0j
                uqp = -s * np.conj(phase)
                uqq = c * np.conj(phase)
                for k in range(n):
                    akp = a[k, p]
                    akq = a[k, q]
                    a[k, p] = akp * upp + akq * uqp
                    a[k, q] = akp * upq + akq * uqq
                for k in range(n):
                    apk = a[p, k]
                    aqk = a[q, k]
                    a[p, k] = np.conj(upp) * apk + np.conj(uqp) * aqk
                    a[q, k] = np.conj(upq) * apk + np.conj(uqq) * aqk
                a[p, q] = 0.0
                a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real
                for k in range(n):
                    vkp = v[k, p]
                    vkq = v[k, q]
                    v[k, p] = vkp * upp + vkq * uqp
                    v[k, q] = vkp * upq + vkq * uqq
    w = np.empty(n)
    for i in range(n):
        w[i] = a[i, i].real
    order = np.argsort(w, kind="mergesort")
    w = w[order]
    v = v[:, order]
    # fix the phase of each eigenvector: largest-modulus entry real and positive
    for j in range(n):
        best = 0
        bestabs = -1.0
        for i in range(n):
            m = abs(v[i, j])
            if m > bestabs + 1e-12:
                bestabs = m
                best = i
        ph = v[best, j] / abs(v[best, j])
        for i in range(n):
            v[i, j] = v[i, j] / ph
    return w, v, sweeps, converged


@dataclass(frozen=True)
class SpectralDecomposition:
    """Ascending eigenvalues with column-aligned orthonormal eigenvectors."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    sweeps: int = 0

    @property
    def spectral_radius(self) -> float:
        return float(np.max(np.abs(self.eigenvalues)))

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


def eig_hermitian(h) -> SpectralDecomposition:
    """Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.

    Stops when the off-diagonal Frobenius norm drops below
    ``1e-12 * ||H||_F``; raises :class:`ConvergenceError` after 100 sweeps.
    """
    h = as_hermitian(h)
    w, v, sweeps, converged = _jacobi_kernel(np.ascontiguousarray(h), JACOBI_TOL, JACOBI_MAX_SWEEPS)
    if not converged:
        raise ConvergenceError(f"Jacobi iteration did not converge in {JACOBI_MAX_SWEEPS} sweeps")
    w.setflags(write=False)
    v.setflags(write=False)
    return SpectralDecomposition(w, v, int(sweeps))


def _group_tol(eigenvalues: np.ndarray) -> float:
    return DEGENERACY_TOL * (1.0 + float(np.max(np.abs(eigenvalues))))


def eigenspaces(decomp: SpectralDecomposition) -> list[tuple[float, np.ndarray]]:
    """Group numerically degenerate eigenvalues.

    Returns ``(mean eigenvalue, basis)`` pairs in ascending order, where
    ``basis`` has the eigenvectors of the group as columns. Consecutive
    eigenvalues closer than ``1e-9 * (1 + spectral radius)`` share a group.
    """
    w = decomp.eigenvalues
    tol = _group_tol(w)
    groups = []
    start = 0
    for i in range(1, len(w) + 1):
        if i == len(w) or w[i] - w[i - 1] > tol:
            groups.append((float(np.mean(w[start:i])), decomp.eigenvectors[:, start:i]))
            start = i
    return groups


def min_eigenvalue(h) -> float:
    return float(eig_hermitian(h).eigenvalues[0])


def kron(a, b) -> np.ndarray:
    """Kronecker product with ``(A x B)[i*dB + k, j*dB + l] = A[i, j] B[k, l]``."""
    out = np.kron(as_hermitian(a, "A"), as_hermitian(b, "B"))
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class DensityState:
    """Unit-trace positive semi-definite matrix on C^dim_a (x) C^dim_b."""

    dim_a: int
    dim_b: int
    matrix: np.ndarray

    def __post_init__(self):
        if self.dim_a < 1 or self.dim_b < 1:
            raise InvalidInputError("subsystem dimensions must be positive")
        m = as_hermitian(self.matrix, "density matrix")
        if m.shape[0] != self.dim_a * self.dim_b:
            raise InvalidInputError(
                f"density matrix has dimension {m.shape[0]}, expected {self.dim_a}*{self.dim_b}"
            )
        tr = np.trace(m).real
        if abs(tr - 1.0) > STATE_TOL:
            raise InvalidInputError(f"density matrix trace is {tr:.12g}, expected 1")
        lam = min_eigenvalue(m)
        if lam < -PSD_TOL:
            raise InvalidInputError(f"density matrix is not PSD (minimum eigenvalue {lam:.3e})")
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.dim_a * self.dim_b

    @classmethod
    def from_vector(cls, psi, dim_a: int, dim_b: int) -> "DensityState":
        psi = as_vector(psi)
        norm = np.linalg.norm(psi)
        if norm == 0:
            raise InvalidInputError("zero state vector")
        psi = psi / norm
        return cls(dim_a, dim_b, np.outer(psi, psi.conj()))

    @classmethod
    def maximally_mixed(cls, dim_a: int, dim_b: int) -> "DensityState":
        d = dim_a * dim_b
        return cls(dim_a, dim_b, np.eye(d) / d)


def expectation(h, state) -> float:
    """``Tr(H rho)`` for a :class:`DensityState`, or ``<phi|H|phi>`` for a vector.

    The imaginary part, pure rounding for Hermitian ``H``, is discarded.
    """
    h = np.asarray(h, dtype=np.complex128)
    if isinstance(state, DensityState):
        rho = state.matrix
        if rho.shape != h.shape:
            raise InvalidInputError(f"dimension mismatch: operator {h.shape}, state {rho.shape}")
        return float(np.real(np.sum(h * rho.T)))
    phi = as_vector(state)
    if phi.shape[0] != h.shape[0]:
        raise InvalidInputError(f"dimension mismatch: operator {h.shape}, vector {phi.shape}")
    return float(np.real(np.vdot(phi, h @ phi)))


@dataclass(frozen=True)
class SchmidtAnalysis:
    coefficients: np.ndarray
    rank: int
    left: np.ndarray
    right: np.ndarray

    @property
    def is_product(self) -> bool:
        return self.rank == 1


def schmidt(vector, dim_a: int, dim_b: int) -> SchmidtAnalysis:
    """Schmidt coefficients from the SVD of the ``dim_a x dim_b`` reshaping.

    Coefficients below ``1e-8`` times the largest one do not count towards
    the rank. ``left``/``right`` hold the Schmidt vectors as columns.
    """
    psi = as_vector(vector)
    if psi.shape[0] != dim_a * dim_b:
        raise InvalidInputError(f"vector length {psi.shape[0]} != {dim_a}*{dim_b}")
    if np.linalg.norm(psi) == 0:
        raise InvalidInputError("zero vector has no Schmidt decomposition")
    u, s, vh = np.linalg.svd(psi.reshape(dim_a, dim_b))
    rank = int(np.sum(s > SCHMIDT_RANK_TOL * s[0]))
    return SchmidtAnalysis(s, rank, u, vh.T)


def partial_transpose(state, dim_a: int | None = None, dim_b: int | None = None) -> np.ndarray:
    """Transpose the B-subsystem indices of a bipartite matrix.

    ``state`` is a :class:`DensityState`, or a plain matrix together with
    ``dim_a`` and ``dim_b``.
    """
    if isinstance(state, DensityState):
        m, da, db = state.matrix, state.dim_a, state.dim_b
    else:
        if dim_a is None or dim_b is None:
            raise InvalidInputError("subsystem dimensions are required for a plain matrix")
        m, da, db = np.asarray(state, dtype=np.complex128), dim_a, dim_b
        if m.shape != (da * db, da * db):
            raise InvalidInputError(f"matrix shape {m.shape} does not match {da}*{db}")
    t = m.reshape(da, db, da, db).transpose(0, 3, 2, 1)
    return t.reshape(da * db, da * db).copy()


def is_psd(h, tol: float = PSD_TOL) -> bool:
    return min_eigenvalue(h) >= -tol


def pauli(name: str) -> np.ndarray:
    table = {
        "I": [[1, 0], [0, 1]],
        "X": [[0, 1], [1, 0]],
        "Y": [[0, -1j], [1j, 0]],
        "Z": [[1, 0], [0, -1]],
    }
    return np.array(table[name.upper()], dtype=np.complex128)


def ket(bits: str, dim: int = 2) -> np.ndarray:
    """Computational basis vector, e.g. ``ket("01")``."""
    out = np.array([1.0 + 0j])
    for b in bits:
        e = np.zeros(dim, dtype=np.complex128)
        e[int(b)] = 1.0
        out = np.kron(out, e)
    return out
