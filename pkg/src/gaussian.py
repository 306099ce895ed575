"""
Gaussian states, unitaries and channels in moment representation.
Exact moment bookkeeping, overlaps, and the overlap traces that the
estimators target.
"""

import logging
import math
from functools import reduce
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy.special import comb

from .config import VACUUM_VARIANCE, get_config
from .errors import DimensionError, NotPureStateError, NumericError
from .models import GaussianChannelMap, GaussianState, GaussianUnitary
from .symplectic import symplectic_eigenvalues

logger = logging.getLogger(__name__)


def _check_modes(expected: int, actual: int, what: str):
    if expected != actual:
        raise DimensionError(f"{what}: {expected} modes expected, got {actual}")


def _interleave(alpha) -> np.ndarray:
    alpha = np.atleast_1d(np.asarray(alpha, dtype=complex))
    return np.column_stack([alpha.real, alpha.imag]).ravel()


# States

def vacuum(m: int) -> GaussianState:
    return GaussianState(x=np.zeros(2 * m), V=VACUUM_VARIANCE * np.eye(2 * m))


def coherent_state(alpha) -> GaussianState:
    """Coherent state |alpha>: x = (Re a_1, Im a_1, ...), V = 1/4"""
    x = _interleave(alpha)
    return GaussianState(x=x, V=VACUUM_VARIANCE * np.eye(len(x)))


def thermal_state(m: int, nbar: float) -> GaussianState:
    return GaussianState(x=np.zeros(2 * m), V=VACUUM_VARIANCE * (2 * nbar + 1) * np.eye(2 * m))


def squeezed_vacuum(xi: float, theta: float = 0.0) -> GaussianState:
    """Single-mode vacuum squeezed along the quadrature at angle theta"""
    U = compose_unitaries([squeezer(xi), rotation(theta)])
    return apply_unitary(U, vacuum(1))


# Gaussian unitaries

def _embed(block: np.ndarray, modes: Sequence[int], m: int) -> np.ndarray:
    S = np.eye(2 * m)
    idx = np.concatenate([[2 * j, 2 * j + 1] for j in modes])
    S[np.ix_(idx, idx)] = block
    return S


def identity_unitary(m: int) -> GaussianUnitary:
    return GaussianUnitary(S=np.eye(2 * m), d=np.zeros(2 * m))


def squeezer(xi: float, mode: int = 0, m: int = 1) -> GaussianUnitary:
    """Squeezes q by exp(-xi)"""
    block = np.diag([np.exp(-xi), np.exp(xi)])
    return GaussianUnitary(S=_embed(block, [mode], m), d=np.zeros(2 * m))


def rotation(theta: float, mode: int = 0, m: int = 1) -> GaussianUnitary:
    """Phase rotation a -> exp(i theta) a"""
    c, s = np.cos(theta), np.sin(theta)
    block = np.array([[c, -s], [s, c]])
    return GaussianUnitary(S=_embed(block, [mode], m), d=np.zeros(2 * m))


def beamsplitter(theta: float = np.pi / 4, modes: Tuple[int, int] = (0, 1), m: int = 2) -> GaussianUnitary:
    """a1 -> cos(t) a1 - sin(t) a2, a2 -> sin(t) a1 + cos(t) a2; 50:50 by default"""
    c, s = np.cos(theta), np.sin(theta)
    block = np.block([[c * np.eye(2), -s * np.eye(2)], [s * np.eye(2), c * np.eye(2)]])
    return GaussianUnitary(S=_embed(block, list(modes), m), d=np.zeros(2 * m))


def two_mode_squeezer(r: float, modes: Tuple[int, int] = (0, 1), m: int = 2) -> GaussianUnitary:
    ch, sh = np.cosh(r), np.sinh(r)
    Z = np.diag([1.0, -1.0])
    block = np.block([[ch * np.eye(2), sh * Z], [sh * Z, ch * np.eye(2)]])
    return GaussianUnitary(S=_embed(block, list(modes), m), d=np.zeros(2 * m))


def displacement(alpha, mode: int = 0, m: int = 1) -> GaussianUnitary:
    d = np.zeros(2 * m)
    d[2 * mode], d[2 * mode + 1] = np.real(alpha), np.imag(alpha)
    return GaussianUnitary(S=np.eye(2 * m), d=d)


def compose_unitaries(unitaries: Sequence[GaussianUnitary]) -> GaussianUnitary:
    """Apply unitaries in order (first element acts first)"""
    def step(acc: GaussianUnitary, nxt: GaussianUnitary) -> GaussianUnitary:
        _check_modes(acc.modes, nxt.modes, "compose_unitaries")
        S = nxt.S.entries
        return GaussianUnitary(S=S @ acc.S.entries, d=S @ acc.d + nxt.d)
    return reduce(step, unitaries)


def apply_unitary(U: GaussianUnitary, rho: GaussianState) -> GaussianState:
    """x -> S x + d, V -> S V S^T"""
    _check_modes(U.modes, rho.modes, "apply_unitary")
    S = U.S.entries
    V = S @ rho.V @ S.T
    return GaussianState(x=S @ rho.x + U.d, V=(V + V.T) / 2)


# Gaussian channels

def unitary_as_channel(U: GaussianUnitary) -> GaussianChannelMap:
    size = 2 * U.modes
    return GaussianChannelMap(X=U.S.entries, Y=np.zeros((size, size)), d=U.d)


def loss_channel(eta: float, m: int = 1) -> GaussianChannelMap:
    """Pure loss with transmissivity eta"""
    return GaussianChannelMap(
        X=np.sqrt(eta) * np.eye(2 * m),
        Y=(1 - eta) * VACUUM_VARIANCE * np.eye(2 * m),
        d=np.zeros(2 * m),
    )


def thermal_noise_channel(nbar: float, m: int = 1) -> GaussianChannelMap:
    """Additive classical noise that turns vacuum into a thermal state of occupation nbar"""
    return GaussianChannelMap(X=np.eye(2 * m), Y=2 * nbar * VACUUM_VARIANCE * np.eye(2 * m), d=np.zeros(2 * m))


def compose_channels(first: GaussianChannelMap, second: GaussianChannelMap) -> GaussianChannelMap:
    """second after first"""
    _check_modes(first.modes, second.modes, "compose_channels")
    X2 = second.X
    Y = X2 @ first.Y @ X2.T + second.Y
    return GaussianChannelMap(X=X2 @ first.X, Y=(Y + Y.T) / 2, d=X2 @ first.d + second.d)


def apply_channel(C: GaussianChannelMap, rho: GaussianState) -> GaussianState:
    """x -> X x + d, V -> X V X^T + Y"""
    _check_modes(C.modes, rho.modes, "apply_channel")
    V = C.X @ rho.V @ C.X.T + C.Y
    return GaussianState(x=C.X @ rho.x + C.d, V=(V + V.T) / 2)


# Overlaps

def is_pure(rho: GaussianState, tol: Optional[float] = None) -> bool:
    tol = get_config().numerics.purity_tol if tol is None else tol
    return bool(np.max(np.abs(symplectic_eigenvalues(rho.V) - VACUUM_VARIANCE)) <= tol)


def _require_pure(rho: GaussianState, role: str):
    if not is_pure(rho):
        raise NotPureStateError(f"{role} state must be pure")


def overlap_pure(target: GaussianState, prep: GaussianState) -> float:
    """tr(rho_t rho_p) for a pure target"""
    _require_pure(target, "target")
    _check_modes(target.modes, prep.modes, "overlap_pure")
    m = target.modes
    total = target.V + prep.V
    det = np.linalg.det(total)
    if det <= 0:
        raise NumericError("singular V_t + V_p in overlap")
    delta = target.x - prep.x
    # 2^-m det(V_t + V_p)^-1/2 with the 1/4 vacuum normalization
    scale = (2 * VACUUM_VARIANCE) ** m / np.sqrt(det)
    return float(scale * np.exp(-0.5 * delta @ np.linalg.solve(total, delta)))


def exact_overlap_traces(target: GaussianState, prep: GaussianState) -> Tuple[float, float, float]:
    """(Tr V_t^-1 Gamma_p, Tr V_t^-1 x_p x_t^T, Tr V_t^-1 x_t x_t^T)"""
    _require_pure(target, "target")
    _check_modes(target.modes, prep.modes, "exact_overlap_traces")
    V_inv = np.linalg.inv(target.V)
    t1 = float(np.trace(V_inv @ prep.gamma))
    t2 = float(prep.x @ V_inv @ target.x)
    t3 = float(target.x @ V_inv @ target.x)
    return t1, t2, t3


# Quadrature marginals

def quadrature_marginal(rho: GaussianState, mode: int, theta: float) -> Tuple[float, float]:
    """Mean and variance of q cos(theta) + p sin(theta) on one mode"""
    if not 0 <= mode < rho.modes:
        raise DimensionError(f"mode {mode} out of range for {rho.modes} modes")
    c, s = np.cos(theta), np.sin(theta)
    i = 2 * mode
    mean = c * rho.x[i] + s * rho.x[i + 1]
    var = c * c * rho.V[i, i] + s * s * rho.V[i + 1, i + 1] + 2 * c * s * rho.V[i, i + 1]
    return float(mean), float(var)


def normal_moment(power: int, mean: float, var: float) -> float:
    """E[X^power] for X ~ Normal(mean, var)"""
    total = 0.0
    for j in range(0, power + 1, 2):
        double_factorial = math.prod(range(j - 1, 0, -2))
        total += comb(power, j, exact=True) * mean ** (power - j) * double_factorial * var ** (j // 2)
    return float(total)
