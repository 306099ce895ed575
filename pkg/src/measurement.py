"""
Simulated homodyne detection on Gaussian states.

Quadrature indices are 0-based: index 2j is q_j and 2j + 1 is p_j. Second
moments of a same-mode conjugate pair (2j, 2j + 1) are not jointly measurable;
they are sampled through

    (q p + p q)/2 = ((q + p)/sqrt(2))^2 - q^2/2 - p^2/2

by picking one of the three observables uniformly and weighting by 3 c_y.
"""

import logging
from typing import Optional, Tuple, Union

import numpy as np

from .errors import ContractViolation, DimensionError
from .gaussian import normal_moment, quadrature_marginal
from .models import GaussianState, SecondMomentOutcome, SubObservable

logger = logging.getLogger(__name__)

# Order matches SubObservable: rotated, q^2, p^2
SUB_OBSERVABLES = (SubObservable.ROTATED, SubObservable.Q2, SubObservable.P2)
SUB_WEIGHTS = np.array([1.0, -0.5, -0.5])
SUB_ANGLES = np.array([np.pi / 4, 0.0, np.pi / 2])

Outcome = Union[float, np.ndarray]


def check_index(k: int, m: int):
    if not 0 <= k < 2 * m:
        raise DimensionError(f"quadrature index {k} out of range for {m} modes")


def is_conjugate_pair(k, l):
    """True for (q_j, p_j) or (p_j, q_j) of the same mode"""
    k, l = np.asarray(k), np.asarray(l)
    return (k // 2 == l // 2) & (k != l)


def _as_output(values: np.ndarray, size: Optional[int]) -> Outcome:
    return float(values[0]) if size is None else values


def homodyne_single(rho: GaussianState, k: int, rng: np.random.Generator,
                    size: Optional[int] = None) -> Outcome:
    """Outcome(s) of measuring quadrature k"""
    check_index(k, rho.modes)
    draws = rho.x[k] + np.sqrt(rho.V[k, k]) * rng.standard_normal(1 if size is None else size)
    return _as_output(draws, size)


def homodyne_rotated(rho: GaussianState, mode: int, theta: float, rng: np.random.Generator,
                     size: Optional[int] = None) -> Outcome:
    """Outcome(s) of measuring q cos(theta) + p sin(theta) on one mode"""
    mean, var = quadrature_marginal(rho, mode, theta)
    draws = mean + np.sqrt(var) * rng.standard_normal(1 if size is None else size)
    return _as_output(draws, size)


def _pair_draws(rho: GaussianState, ks: np.ndarray, ls: np.ndarray,
                z1: np.ndarray, z2: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    V, x = rho.V, rho.x
    sd_k = np.sqrt(V[ks, ks])
    coef = V[ks, ls] / sd_k
    resid = np.sqrt(np.maximum(V[ls, ls] - coef ** 2, 0.0))
    r_k = x[ks] + sd_k * z1
    r_l = x[ls] + coef * z1 + resid * z2
    return r_k, r_l


def homodyne_pair(rho: GaussianState, k: int, l: int, rng: np.random.Generator,
                  size: Optional[int] = None):
    """
    Joint outcomes of quadratures k and l on different modes (or k == l).

    Same-mode conjugate pairs are not jointly measurable and raise
    ContractViolation.
    """
    check_index(k, rho.modes)
    check_index(l, rho.modes)
    if is_conjugate_pair(k, l):
        raise ContractViolation(f"quadratures {k} and {l} are conjugate on the same mode")
    n = 1 if size is None else size
    z1 = rng.standard_normal(n)
    z2 = rng.standard_normal(n)
    r_k, r_l = _pair_draws(rho, np.full(n, k), np.full(n, l), z1, z2)
    if k == l:
        r_l = r_k
    if size is None:
        return float(r_k[0]), float(r_l[0])
    return r_k, r_l


def _same_mode_marginals(rho: GaussianState, modes: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Means and variances of (rotated, q, p) per mode, shape (m, 3)"""
    means = np.empty((rho.modes, 3))
    variances = np.empty((rho.modes, 3))
    for j in range(rho.modes):
        for y, theta in enumerate(SUB_ANGLES):
            means[j, y], variances[j, y] = quadrature_marginal(rho, j, theta)
    return means[modes], variances[modes]


def sample_gamma_entries(rho: GaussianState, ks: np.ndarray, ls: np.ndarray,
                         rng: np.random.Generator) -> Tuple[np.ndarray, np.ndarray]:
    """
    Vectorized second-moment sampling.

    Returns (values, sub) where sub is -1 for directly measured pairs and the
    position in SUB_OBSERVABLES for same-mode conjugate pairs. Draw order is
    fixed (two normal vectors, then the sub-observable choices) so results
    depend only on the generator state.
    """
    ks = np.asarray(ks, dtype=int)
    ls = np.asarray(ls, dtype=int)
    if ks.shape != ls.shape:
        raise DimensionError("index arrays must have the same shape")
    if ks.size and (ks.min() < 0 or ls.min() < 0 or max(ks.max(), ls.max()) >= 2 * rho.modes):
        raise DimensionError(f"quadrature index out of range for {rho.modes} modes")
    n = ks.shape[0]
    z1 = rng.standard_normal(n)
    z2 = rng.standard_normal(n)
    choice = rng.integers(0, 3, size=n)

    conj = is_conjugate_pair(ks, ls)
    r_k, r_l = _pair_draws(rho, ks, ls, z1, z2)
    direct = np.where(ks == ls, r_k ** 2, r_k * r_l)

    means, variances = _same_mode_marginals(rho, ks // 2)
    rows = np.arange(n)
    eta = means[rows, choice] + np.sqrt(variances[rows, choice]) * z1
    rotated = 3.0 * SUB_WEIGHTS[choice] * eta ** 2

    values = np.where(conj, rotated, direct)
    sub = np.where(conj, choice, -1)
    return values, sub


def sample_gamma_entry(rho: GaussianState, k: int, l: int, rng: np.random.Generator) -> SecondMomentOutcome:
    """One unbiased sample of Gamma_kl = V_kl + x_k x_l"""
    check_index(k, rho.modes)
    check_index(l, rho.modes)
    values, sub = sample_gamma_entries(rho, np.array([k]), np.array([l]), rng)
    tag = SUB_OBSERVABLES[sub[0]] if sub[0] >= 0 else None
    return SecondMomentOutcome(k=k, l=l, value=float(values[0]), sub_observable=tag)


def gamma_second_moments(rho: GaussianState) -> np.ndarray:
    """E[value^2] of the second-moment sampling scheme for every (k, l)"""
    size = 2 * rho.modes
    x, V = rho.x, rho.V
    out = np.empty((size, size))
    for k in range(size):
        for l in range(size):
            if is_conjugate_pair(k, l):
                j = k // 2
                fourth = [normal_moment(4, *quadrature_marginal(rho, j, theta)) for theta in SUB_ANGLES]
                out[k, l] = 3.0 * float(np.dot(SUB_WEIGHTS ** 2, fourth))
            else:
                a, b, s, t, c = x[k], x[l], V[k, k], V[l, l], V[k, l]
                out[k, l] = a * a * b * b + a * a * t + b * b * s + 4 * a * b * c + s * t + 2 * c * c
    return out
