"""
Symplectic linear algebra on 2m x 2m real matrices.

Quadratures are ordered r = (q_1, p_1, ..., q_m, p_m), so the symplectic form
is block-diagonal with [[0, 1], [-1, 0]] per mode.
"""

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.linalg import block_diag

from .config import VACUUM_VARIANCE, get_config
from .errors import DimensionError, DomainError, NotPureStateError

logger = logging.getLogger(__name__)

# Eigenvalues of 4V closer to 1 than this are treated as an unsqueezed mode.
_UNSQUEEZED_TOL = 1e-8


def symplectic_form(m: int) -> np.ndarray:
    """Standard symplectic form J for m modes"""
    if m < 1:
        raise DimensionError(f"mode count must be positive, got {m}")
    return block_diag(*([np.array([[0.0, 1.0], [-1.0, 0.0]])] * m))


def _modes_of(matrix: np.ndarray) -> int:
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {matrix.shape}")
    if matrix.shape[0] % 2:
        raise DimensionError(f"expected an even dimension, got {matrix.shape[0]}")
    return matrix.shape[0] // 2


def is_symplectic(M, tol: float = 1e-10) -> bool:
    """True iff max|M J M^T - J| <= tol."""
    M = np.asarray(M, dtype=float)
    J = symplectic_form(_modes_of(M))
    return bool(np.max(np.abs(M @ J @ M.T - J)) <= tol)


@dataclass(frozen=True, eq=False)
class SymplecticMatrix:
    """Validated symplectic matrix"""
    entries: np.ndarray

    def __post_init__(self):
        entries = np.array(self.entries, dtype=float)
        _modes_of(entries)
        tol = get_config().numerics.symplectic_tol
        if not is_symplectic(entries, tol):
            raise DomainError(f"matrix is not symplectic within {tol}")
        entries.setflags(write=False)
        object.__setattr__(self, 'entries', entries)

    @property
    def modes(self) -> int:
        return self.entries.shape[0] // 2


@dataclass(frozen=True, eq=False)
class SymplecticDecomposition:
    """S = O D O' with D the direct sum of diag(exp(-xi_k), exp(xi_k))"""
    O: np.ndarray
    D: np.ndarray
    Oprime: np.ndarray
    xi: np.ndarray

    @property
    def modes(self) -> int:
        return len(self.xi)

    @property
    def xi_max(self) -> float:
        return float(np.max(self.xi)) if len(self.xi) else 0.0

    @property
    def s(self) -> float:
        """exp(xi_max), the squeezing scale entering the variance bounds"""
        return float(np.exp(self.xi_max))

    def symplectic(self) -> np.ndarray:
        return self.O @ self.D @ self.Oprime

    def covariance(self) -> np.ndarray:
        """Pure-state covariance V = O D^2 O^T / 4"""
        return VACUUM_VARIANCE * self.O @ self.D @ self.D @ self.O.T


def symplectic_eigenvalues(V) -> np.ndarray:
    """Symplectic eigenvalues of a positive-definite covariance, ascending"""
    V = np.asarray(V, dtype=float)
    m = _modes_of(V)
    J = symplectic_form(m)
    nu = np.sort(np.abs(np.linalg.eigvals(1j * J @ V)))
    # eigenvalues come in +/- pairs
    return nu[::2]


def squeezer_block(xi) -> np.ndarray:
    """Direct sum of diag(exp(-xi_k), exp(xi_k))"""
    xi = np.asarray(xi, dtype=float)
    return np.diag(np.exp(np.column_stack([-xi, xi]).ravel()))


def _sign_fix(v: np.ndarray) -> np.ndarray:
    pivot = np.argmax(np.abs(v))
    return v if v[pivot] >= 0 else -v


def _symplectic_basis(subspace: np.ndarray, J: np.ndarray) -> np.ndarray:
    """Pairs (u, -J u) spanning a J-invariant orthonormal subspace."""
    columns = []
    basis = subspace
    while basis.shape[1] >= 2:
        u = _sign_fix(basis[:, 0] / np.linalg.norm(basis[:, 0]))
        w = -J @ u
        columns.append((u, w))
        rest = basis - np.outer(u, u @ basis) - np.outer(w, w @ basis)
        left, sing, _ = np.linalg.svd(rest, full_matrices=False)
        basis = left[:, : basis.shape[1] - 2]
    return columns


def williamson_euler(V, purity_tol: Optional[float] = None) -> SymplecticDecomposition:
    """
    Decompose a pure-state covariance as V = O D^2 O^T / 4.

    O is orthogonal and symplectic, O' is the identity (a pure V fixes S only up
    to a right orthogonal symplectic factor). Squeezing parameters are sorted
    in descending order; equal values keep eigenvalue order.
    """
    V = np.asarray(V, dtype=float)
    m = _modes_of(V)
    if purity_tol is None:
        purity_tol = get_config().numerics.purity_tol
    if not np.allclose(V, V.T, atol=1e-10):
        raise DomainError("covariance matrix is not symmetric")
    V = (V + V.T) / 2
    if np.min(np.linalg.eigvalsh(V)) <= 0:
        raise DomainError("covariance matrix is not positive-definite")

    nu = symplectic_eigenvalues(V)
    deviation = np.max(np.abs(nu - VACUUM_VARIANCE))
    if deviation > purity_tol:
        raise NotPureStateError(
            f"symplectic eigenvalues deviate from {VACUUM_VARIANCE} by {deviation:.3e}"
        )

    J = symplectic_form(m)
    lam, vecs = np.linalg.eigh(V / VACUUM_VARIANCE)
    squeezed = np.flatnonzero(lam < 1.0 - _UNSQUEEZED_TOL)
    flat = np.flatnonzero(np.abs(lam - 1.0) <= _UNSQUEEZED_TOL)
    if len(squeezed) + len(flat) // 2 != m or len(flat) % 2:
        raise NotPureStateError("eigenvalues of 4V do not pair as (exp(-2xi), exp(2xi))")

    pairs = []
    for idx in squeezed:
        partner = 1.0 / lam[idx]
        if np.min(np.abs(lam - partner)) > 1e-6 * partner:
            raise NotPureStateError("eigenvalues of 4V do not pair as (exp(-2xi), exp(2xi))")
        u = _sign_fix(vecs[:, idx])
        pairs.append((-0.5 * np.log(lam[idx]), u, -J @ u))
    pairs.extend((0.0, u, w) for u, w in _symplectic_basis(vecs[:, flat], J))

    # lam ascending means xi already descending; sorted() is stable for ties
    pairs = sorted(pairs, key=lambda item: -item[0])
    xi = np.array([p[0] for p in pairs])
    O = np.column_stack([vec for _, u, w in pairs for vec in (u, w)])
    logger.debug("williamson_euler: xi=%s", xi)
    return SymplecticDecomposition(O=O, D=squeezer_block(xi), Oprime=np.eye(2 * m), xi=xi)


def euler_decomposition(S) -> SymplecticDecomposition:
    """Euler decomposition S = O D O' of a symplectic matrix."""
    S = np.asarray(S.entries if isinstance(S, SymplecticMatrix) else S, dtype=float)
    dec = williamson_euler(VACUUM_VARIANCE * S @ S.T)
    D_inv = squeezer_block(-dec.xi)
    Oprime = D_inv @ dec.O.T @ S
    return SymplecticDecomposition(O=dec.O, D=dec.D, Oprime=Oprime, xi=dec.xi)


def max_squeezing(dec: SymplecticDecomposition) -> float:
    """xi_max; the matching scale s = exp(xi_max) is dec.s"""
    return dec.xi_max


def random_orthogonal_symplectic(m: int, rng: np.random.Generator) -> np.ndarray:
    """Passive (orthogonal symplectic) matrix from a Haar unitary"""
    z = (rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    unitary = q * (np.diag(r) / np.abs(np.diag(r)))
    X, Y = unitary.real, unitary.imag
    out = np.empty((2 * m, 2 * m))
    out[0::2, 0::2] = X
    out[0::2, 1::2] = -Y
    out[1::2, 0::2] = Y
    out[1::2, 1::2] = X
    return out


def random_symplectic(m: int, xi_max: float, seed, xi=None) -> SymplecticMatrix:
    """
    O D O' with random passive O, O'.

    The xi_k are drawn uniformly on [0, xi_max] unless given explicitly.
    """
    if m < 1:
        raise DimensionError(f"mode count must be positive, got {m}")
    if xi_max < 0:
        raise DomainError(f"xi_max must be nonnegative, got {xi_max}")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    O = random_orthogonal_symplectic(m, rng)
    Oprime = random_orthogonal_symplectic(m, rng)
    if xi is None:
        xi = rng.uniform(0.0, xi_max, size=m)
    xi = np.asarray(xi, dtype=float)
    if xi.shape != (m,):
        raise DimensionError(f"expected {m} squeezing parameters, got shape {xi.shape}")
    return SymplecticMatrix(O @ squeezer_block(xi) @ Oprime)
