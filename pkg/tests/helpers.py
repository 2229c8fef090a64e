"""Random operators and states shared by the test modules."""

import numpy as np

from sepwit.presets import direct_sum


def rand_herm(d, rng, scale=1.0):
    m = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    return scale * (m + m.conj().T) / 2


def rand_unitary(d, rng):
    q, r = np.linalg.qr(rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d)))
    return q * (np.diag(r) / np.abs(np.diag(r)))


def haar_vector(d, rng):
    v = rng.normal(size=d) + 1j * rng.normal(size=d)
    return v / np.linalg.norm(v)


def ginibre_state(d, rank, rng):
    g = rng.normal(size=(d, rank)) + 1j * rng.normal(size=(d, rank))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def planted(d, values, rng, basis=None):
    """Random Hermitian on the first d-1 coordinates, scalar ``value`` on the last, then rotated."""
    ops = [direct_sum(rand_herm(d - 1, rng), np.array([[v]])) for v in values]
    if basis is None:
        return ops
    return [basis @ o @ basis.conj().T for o in ops]


def commuting_pair(d, rng):
    u = rand_unitary(d, rng)
    return [u @ np.diag(rng.normal(size=d)) @ u.conj().T for _ in range(2)]


def random_k(rng):
    while True:
        k1, k2 = rng.normal(size=2)
        if abs(k1 * k2) > 1e-3:
            return float(k1), float(k2)


ACCEPTANCE_LINES: list[str] = []


def record(criterion: int, ok: bool, detail: str) -> None:
    line = f"criterion {criterion}: {'PASS' if ok else 'FAIL'} - {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
