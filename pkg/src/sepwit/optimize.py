"""Extreme expectation values of bipartite operators over product states.

``sep_min`` runs a seesaw: with one factor fixed, the optimal other factor
is the lowest eigenvector of the reduced local operator, so every
half-step can only lower the objective. Random restarts cover the
non-convex landscape. ``brute_force_sep_min`` is an independent oracle
(grid or random search with exact inner minimization) used to validate
the seesaw.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numba import njit
from scipy.optimize import minimize_scalar

from .linalg import InvalidInputError, _jacobi_kernel, as_hermitian, eig_hermitian, schmidt
from .ranges import ProductPair

__all__ = [
    "OptimizerConfig",
    "SepExtremum",
    "sep_min",
    "sep_max",
    "sep_min_operator",
    "sep_max_operator",
    "seesaw_run",
    "brute_force_sep_min",
    "brute_force_sep_min_operator",
]


@dataclass(frozen=True)
class OptimizerConfig:
    restarts: int = 32
    max_iters: int = 500
    tol: float = 1e-11
    seed: int = 0

    def __post_init__(self):
        if self.restarts < 1 or self.max_iters < 1:
            raise InvalidInputError("restarts and max_iters must be positive")
        if not self.tol > 0:
            raise InvalidInputError("tol must be positive")


@dataclass(frozen=True)
class SepExtremum:
    """Best product-state value found and the vectors attaining it."""

    value: float
    alpha: np.ndarray
    beta: np.ndarray
    iterations: int
    restarts_used: int
    converged: bool
    history: np.ndarray = field(default=None, repr=False)

    @property
    def product_vector(self) -> np.ndarray:
        return np.kron(self.alpha, self.beta)


def _as_tensor(h: np.ndarray, dim_a: int, dim_b: int) -> np.ndarray:
    return np.ascontiguousarray(np.asarray(h, dtype=np.complex128).reshape(dim_a, dim_b, dim_a, dim_b))


@njit(cache=True)
def _reduce_a(t, beta):
    # M[i, j] = sum_kl conj(beta_k) T[i, k, j, l] beta_l
    da = t.shape[0]
    db = t.shape[1]
    m = np.zeros((da, da), dtype=np.complex128)
    for i in range(da):
        for j in range(da):
            s = 0j
            for k in range(db):
                bk = np.conj(beta[k])
                for l in range(db):
                    s += bk * t[i, k, j, l] * beta[l]
            m[i, j] = s
    return m


@njit(cache=True)
def _reduce_b(t, alpha):
    da = t.shape[0]
    db = t.shape[1]
    m = np.zeros((db, db), dtype=np.complex128)
    for k in range(db):
        for l in range(db):
            s = 0j
            for i in range(da):
                ai = np.conj(alpha[i])
                for j in range(da):
                    s += ai * t[i, k, j, l] * alpha[j]
            m[k, l] = s
    return m


@njit(cache=True)
def _quad(m, x):
    return np.real(np.vdot(x, m @ x))


@njit(cache=True)
def _lowest_vector(m, prev):
    """Lowest eigenvector; on a tie, the one closest to ``prev``."""
    w, v, _, _ = _jacobi_kernel(m, 1e-12, 100)
    n = w.shape[0]
    gtol = 1e-9 * (1.0 + max(abs(w[0]), abs(w[n - 1])))
    top = 1
    while top < n and w[top] - w[0] <= gtol:
        top += 1
    if top == 1:
        return w[0], v[:, 0].copy()
    proj = np.zeros(n, dtype=np.complex128)
    for j in range(top):
        c = 0j
        for i in range(n):
            c += np.conj(v[i, j]) * prev[i]
        for i in range(n):
            proj[i] += c * v[i, j]
    nrm = np.sqrt(np.real(np.vdot(proj, proj)))
    if nrm > 1e-12:
        return w[0], proj / nrm
    return w[0], v[:, 0].copy()


@njit(cache=True)
def _seesaw(t, alpha0, beta0, max_iters, tol):
    alpha = alpha0.copy()
    beta = beta0.copy()
    history = np.empty(2 * max_iters + 1)
    value = _quad(_reduce_a(t, beta), alpha)
    history[0] = value
    n_hist = 1
    converged = False
    iters = 0
    for it in range(max_iters):
        iters = it + 1
        _, alpha = _lowest_vector(_reduce_a(t, beta), alpha)
        history[n_hist] = _quad(_reduce_b(t, alpha), beta)
        n_hist += 1
        _, beta = _lowest_vector(_reduce_b(t, alpha), beta)
        new = _quad(_reduce_a(t, beta), alpha)
        history[n_hist] = new
        n_hist += 1
        improvement = value - new
        value = new
        if improvement < tol * (1.0 + abs(value)):
            converged = True
            break
    return value, alpha, beta, iters, converged, history[:n_hist].copy()


def seesaw_run(h, dim_a: int, dim_b: int, alpha0, beta0, max_iters: int = 500, tol: float = 1e-11) -> SepExtremum:
    """One seesaw descent from ``(alpha0, beta0)``.

    ``history`` records the objective after every half-step; it is
    non-increasing up to rounding.
    """
    t = _as_tensor(h, dim_a, dim_b)
    a0 = np.asarray(alpha0, dtype=np.complex128)
    b0 = np.asarray(beta0, dtype=np.complex128)
    a0 = a0 / np.linalg.norm(a0)
    b0 = b0 / np.linalg.norm(b0)
    _, alpha, beta, iters, conv, hist = _seesaw(t, a0, b0, max_iters, tol)
    alpha = alpha / np.linalg.norm(alpha)
    beta = beta / np.linalg.norm(beta)
    psi = np.kron(alpha, beta)
    value = float(np.real(np.vdot(psi, np.asarray(h) @ psi)))
    return SepExtremum(value, alpha, beta, int(iters), 1, bool(conv), hist)


def _starts(h: np.ndarray, dim_a: int, dim_b: int, cfg: OptimizerConfig):
    yield np.full(dim_a, 1 / np.sqrt(dim_a), dtype=np.complex128), np.full(dim_b, 1 / np.sqrt(dim_b), dtype=np.complex128)
    rng = np.random.default_rng(cfg.seed)
    for _ in range(cfg.restarts - 1):
        a = rng.normal(size=dim_a) + 1j * rng.normal(size=dim_a)
        b = rng.normal(size=dim_b) + 1j * rng.normal(size=dim_b)
        yield a / np.linalg.norm(a), b / np.linalg.norm(b)
    # leading Schmidt factors of the lowest eigenvector: exact when that eigenvector is a product
    sa = schmidt(eig_hermitian(h).eigenvectors[:, 0], dim_a, dim_b)
    yield sa.left[:, 0], sa.right[:, 0]


def sep_min_operator(h, dim_a: int, dim_b: int, cfg: OptimizerConfig | None = None) -> SepExtremum:
    """Smallest ``<ab|H|ab>`` found by multistart seesaw; an upper bound on the true minimum.

    Starts: the uniform product vector, ``cfg.restarts - 1`` seeded random
    ones, and the Schmidt-leading factors of the lowest eigenvector of ``H``.
    """
    cfg = cfg or OptimizerConfig()
    h = as_hermitian(h)
    if h.shape[0] != dim_a * dim_b:
        raise InvalidInputError(f"operator dimension {h.shape[0]} != {dim_a}*{dim_b}")
    best = None
    total_iters = 0
    for a0, b0 in _starts(h, dim_a, dim_b, cfg):
        run = seesaw_run(h, dim_a, dim_b, a0, b0, cfg.max_iters, cfg.tol)
        total_iters += run.iterations
        if best is None or run.value < best.value:
            best = run
    return SepExtremum(best.value, best.alpha, best.beta, total_iters, cfg.restarts + 1, best.converged, best.history)


def sep_max_operator(h, dim_a: int, dim_b: int, cfg: OptimizerConfig | None = None) -> SepExtremum:
    r = sep_min_operator(-as_hermitian(h), dim_a, dim_b, cfg)
    return SepExtremum(-r.value, r.alpha, r.beta, r.iterations, r.restarts_used, r.converged, -r.history)


def sep_min(pair: ProductPair, k1: float, k2: float, cfg: OptimizerConfig | None = None) -> SepExtremum:
    """Minimum of ``<ab|k1 H1 + k2 H2|ab>`` over product vectors (seesaw estimate)."""
    return sep_min_operator(pair.combination(k1, k2), pair.dim_a, pair.dim_b, cfg)


def sep_max(pair: ProductPair, k1: float, k2: float, cfg: OptimizerConfig | None = None) -> SepExtremum:
    """Maximum over product vectors, computed as ``-sep_min(pair, -k1, -k2)``."""
    r = sep_min(pair, -k1, -k2, cfg)
    return SepExtremum(-r.value, r.alpha, r.beta, r.iterations, r.restarts_used, r.converged, -r.history)


# ---------------------------------------------------------------------------
# brute-force oracle


def _qubit_lowest(m: np.ndarray) -> np.ndarray:
    """Closed-form lowest eigenvalue of a stack of 2x2 Hermitian matrices."""
    a = m[..., 0, 0].real
    d = m[..., 1, 1].real
    b = m[..., 0, 1]
    return 0.5 * (a + d) - np.sqrt(0.25 * (a - d) ** 2 + np.abs(b) ** 2)


def _bloch(theta, phi) -> np.ndarray:
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    return np.stack([np.cos(theta / 2), np.exp(1j * phi) * np.sin(theta / 2)], axis=-1)


def _inner_min(t: np.ndarray, alphas: np.ndarray) -> np.ndarray:
    """``min_b <ab|H|ab>`` for each row of ``alphas``, by exact diagonalization."""
    m = np.einsum("ni,ikjl,nj->nkl", alphas.conj(), t, alphas)
    if m.shape[-1] == 2:
        return _qubit_lowest(m)
    return np.linalg.eigvalsh(0.5 * (m + np.conj(np.swapaxes(m, -1, -2))))[..., 0]


def _inner_argmin(t: np.ndarray, alpha: np.ndarray):
    m = np.einsum("i,ikjl,j->kl", alpha.conj(), t, alpha)
    w, v = np.linalg.eigh(0.5 * (m + m.conj().T))
    return w[0], v[:, 0]


def _grid_qubit(t: np.ndarray, lipschitz: float, refine_steps: int):
    n_theta, n_phi = 129, 256
    theta = np.linspace(0.0, np.pi, n_theta)
    phi = np.linspace(0.0, 2 * np.pi, n_phi, endpoint=False)
    tt, pp = np.meshgrid(theta, phi, indexing="ij")
    f = _inner_min(t, _bloch(tt.ravel(), pp.ravel())).reshape(n_theta, n_phi)
    h_theta, h_phi = theta[1], phi[1]
    # seeds: the best few grid cells, spread out
    order = np.argsort(f, axis=None)
    seeds = []
    for flat in order:
        i, j = np.unravel_index(flat, f.shape)
        if all(abs(i - a) > 3 or min(abs(j - b), n_phi - abs(j - b)) > 3 for a, b in seeds):
            seeds.append((i, j))
        if len(seeds) == 8:
            break
    best = (np.inf, 0.0, 0.0)
    for i, j in seeds:
        th, ph = theta[i], phi[j]
        ht, hp = h_theta, h_phi
        # zoom with local grids until one grid step moves the objective by < 1e-4
        while True:
            lt = np.clip(th + np.linspace(-2 * ht, 2 * ht, 21), 0.0, np.pi)
            lp = ph + np.linspace(-2 * hp, 2 * hp, 21)
            gt, gp = np.meshgrid(lt, lp, indexing="ij")
            g = _inner_min(t, _bloch(gt.ravel(), gp.ravel()))
            k = int(np.argmin(g))
            th, ph = gt.ravel()[k], gp.ravel()[k]
            ht, hp = ht / 5, hp / 5
            if lipschitz * max(ht, hp) < 1e-4:
                break
        val, th, ph = _coordinate_descent_qubit(t, th, ph, ht, hp, refine_steps)
        if val < best[0]:
            best = (val, th, ph)
    return best


def _coordinate_descent_qubit(t, th, ph, ht, hp, steps):
    def f(a, b):
        return float(_inner_min(t, _bloch([a], [b]))[0])

    val = f(th, ph)
    for _ in range(steps):
        r = minimize_scalar(lambda a: f(a, ph), bounds=(th - 4 * ht, th + 4 * ht), method="bounded",
                            options={"xatol": 1e-12})
        if r.fun < val:
            th, val = float(r.x), float(r.fun)
        r = minimize_scalar(lambda b: f(th, b), bounds=(ph - 4 * hp, ph + 4 * hp), method="bounded",
                            options={"xatol": 1e-12})
        if r.fun < val - 1e-16:
            ph, val = float(r.x), float(r.fun)
        else:
            break
    return val, th, ph


def _coordinate_descent_general(t, alpha, steps):
    """Cyclic line searches over the real and imaginary parts of ``alpha``."""
    dim = alpha.shape[0]

    def f(x):
        a = x[:dim] + 1j * x[dim:]
        a = a / np.linalg.norm(a)
        return float(_inner_min(t, a[None, :])[0])

    x = np.concatenate([alpha.real, alpha.imag])
    val = f(x)
    width = 0.5
    for _ in range(steps):
        start = val
        for c in range(2 * dim):
            def g(s, c=c):
                y = x.copy()
                y[c] += s
                return f(y)

            r = minimize_scalar(g, bounds=(-width, width), method="bounded", options={"xatol": 1e-12})
            if r.fun < val:
                x[c] += r.x
                val = float(r.fun)
        x = x / np.linalg.norm(x)
        if start - val < 1e-15:
            width *= 0.5
            if width < 1e-9:
                break
    a = x[:dim] + 1j * x[dim:]
    return val, a / np.linalg.norm(a)


def brute_force_sep_min_operator(h, dim_a: int, dim_b: int, n_samples: int = 20_000,
                                 refine_steps: int = 50, seed: int = 0) -> SepExtremum:
    """Oracle for the product-state minimum, independent of the seesaw.

    The inner minimization over the B factor is exact (closed form for a
    qubit, dense ``eigvalsh`` otherwise). The A factor is searched on a
    Bloch-sphere grid with local zooming when ``dim_a == 2``, otherwise by
    ``n_samples`` Haar-random draws; the best candidates are polished by
    coordinate descent.
    """
    if n_samples < 1:
        raise InvalidInputError("n_samples must be positive")
    h = np.asarray(as_hermitian(h))
    t = _as_tensor(h, dim_a, dim_b)
    if not np.any(h):
        alpha = np.eye(dim_a, dtype=np.complex128)[0]
        beta = np.eye(dim_b, dtype=np.complex128)[0]
        return SepExtremum(0.0, alpha, beta, 0, 1, True)
    if dim_a == 2:
        lipschitz = 2.0 * float(np.linalg.norm(h, 2))
        _, th, ph = _grid_qubit(t, lipschitz, refine_steps)
        alpha = _bloch(th, ph)
    else:
        rng = np.random.default_rng(seed)
        cand = rng.normal(size=(n_samples, dim_a)) + 1j * rng.normal(size=(n_samples, dim_a))
        cand /= np.linalg.norm(cand, axis=1, keepdims=True)
        vals = _inner_min(t, cand)
        best_val, alpha = np.inf, None
        for idx in np.argsort(vals)[:8]:
            v, a = _coordinate_descent_general(t, cand[idx], refine_steps)
            if v < best_val:
                best_val, alpha = v, a
    _, beta = _inner_argmin(t, alpha)
    psi = np.kron(alpha, beta)
    value = float(np.real(np.vdot(psi, h @ psi)))
    return SepExtremum(value, alpha, beta, refine_steps, 1, True)


def brute_force_sep_min(pair: ProductPair, k1: float, k2: float, n_samples: int = 20_000,
                        refine_steps: int = 50, seed: int = 0) -> SepExtremum:
    return brute_force_sep_min_operator(pair.combination(k1, k2), pair.dim_a, pair.dim_b,
                                        n_samples, refine_steps, seed)
