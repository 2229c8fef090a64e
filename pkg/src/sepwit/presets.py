"""Built-in operator pairs and states, so the CLI and tests need no data files."""

from __future__ import annotations

import numpy as np

from .linalg import DensityState, InvalidInputError, ket, pauli
from .ranges import ProductPair

__all__ = ["OPERATOR_PRESETS", "STATE_PRESETS", "operator_preset", "state_preset", "direct_sum"]

X, Z = pauli("X"), pauli("Z")
I2 = np.eye(2)


def direct_sum(a, b) -> np.ndarray:
    a, b = np.atleast_2d(a), np.atleast_2d(b)
    out = np.zeros((a.shape[0] + b.shape[0],) * 2, dtype=np.result_type(a, b))
    out[:a.shape[0], :a.shape[0]] = a
    out[a.shape[0]:, a.shape[0]:] = b
    return out


def _projector(v) -> np.ndarray:
    v = np.asarray(v, dtype=np.complex128)
    v = v / np.linalg.norm(v)
    return np.outer(v, v.conj())


def _cor1_projectors() -> ProductPair:
    # rank-one projectors with overlap 1/2 embedded in C^3; e2 is a shared kernel vector
    p1 = _projector([1, 0, 0])
    p2 = _projector([1, 1, 0])
    return ProductPair(p1, p2, p1, p2)


OPERATOR_PRESETS = {
    # single-subsystem pair, given as (H1, H2)
    "pauli-xz": lambda: (X, Z),
    "pauli-xxzz": lambda: ProductPair(X, Z, X, Z),
    "cor1-projectors": _cor1_projectors,
    "planted-common": lambda: ProductPair(direct_sum(X, 2.0), direct_sum(Z, 3.0), X, Z),
    "commuting": lambda: ProductPair(Z, Z, Z, Z),
    # perturbation family H1 = diag(1,2) (x) diag(1,2)
    "perturb-local": lambda: ProductPair(np.diag([1.0, 2.0]), Z, np.diag([1.0, 2.0]), X),
    "perturb-nonlocal": lambda: ProductPair(np.diag([1.0, 2.0]), X, np.diag([1.0, 2.0]), X),
}


def operator_preset(name: str):
    """A :class:`ProductPair`, or an ``(H1, H2)`` tuple for single-subsystem presets."""
    try:
        return OPERATOR_PRESETS[name]()
    except KeyError:
        raise InvalidInputError(f"unknown preset {name!r}; choose from {sorted(OPERATOR_PRESETS)}") from None


def _bell(sign_cross: bool) -> np.ndarray:
    if sign_cross:
        return (ket("01") - ket("10")) / np.sqrt(2)
    return (ket("00") + ket("11")) / np.sqrt(2)


STATE_PRESETS = {
    "singlet": lambda da, db: DensityState.from_vector(_bell(True), 2, 2),
    "phi-plus": lambda da, db: DensityState.from_vector(_bell(False), 2, 2),
    "mixed": lambda da, db: DensityState.maximally_mixed(da, db),
    "product00": lambda da, db: DensityState.from_vector(
        np.kron(np.eye(da)[0], np.eye(db)[0]), da, db),
}


def state_preset(name: str, dim_a: int = 2, dim_b: int = 2) -> DensityState:
    if name not in STATE_PRESETS:
        raise InvalidInputError(f"unknown state preset {name!r}; choose from {sorted(STATE_PRESETS)}")
    if name in ("singlet", "phi-plus") and (dim_a, dim_b) != (2, 2):
        raise InvalidInputError(f"state preset {name!r} is two-qubit only")
    return STATE_PRESETS[name](dim_a, dim_b)
