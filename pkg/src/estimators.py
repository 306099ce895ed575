"""
Importance-sampling estimator kernels and median-of-means aggregation.

Overlaps Tr(V_t^-1 A) are estimated by drawing (k, l) with probability
[V_t^-1]_kl^2 / ||V_t^-1||_F^2 and reweighting one measured entry of A. The
nonlinear witnesses (amplifier, cubic gate) draw one observable k with
probability |c_k| / sum |c_l| and report sign(c_k) * outcome * sum |c_l|.
"""

import itertools
import logging
import math
from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .config import VACUUM_VARIANCE, get_config
from .errors import ContractViolation, DomainError, InsufficientSamplesError
from .models import GaussianUnitary, Kernel, MoMResult, ObservableDictionary, Scenario
from .witnesses import build_dictionary

logger = logging.getLogger(__name__)


def safe_ceil(value: float) -> int:
    """Ceiling that ignores floating-point noise below 1e-6"""
    return int(math.ceil(round(value, 6)))


@dataclass(frozen=True, eq=False)
class IndexDistribution:
    """p(k, l) = [V_t^-1]_kl^2 / ||V_t^-1||_F^2"""
    inverse: np.ndarray
    weights: np.ndarray
    frobenius_sq: float

    def __post_init__(self):
        flat = self.weights.ravel()
        support = np.flatnonzero(flat > 0)
        cumulative = np.cumsum(flat[support])
        cumulative /= cumulative[-1]
        object.__setattr__(self, '_support', support)
        object.__setattr__(self, '_cumulative', cumulative)

    @property
    def size(self) -> int:
        return self.weights.shape[0]

    def probability(self, k: int, l: int) -> float:
        return float(self.weights[k, l])

    def sample(self, rng: np.random.Generator, size: int) -> Tuple[np.ndarray, np.ndarray]:
        """Draw index pairs from the nonzero entries only"""
        u = rng.random(size)
        pick = np.minimum(np.searchsorted(self._cumulative, u, side='right'), len(self._support) - 1)
        flat = self._support[pick]
        return flat // self.size, flat % self.size

    def reweight(self, ks: np.ndarray, ls: np.ndarray) -> np.ndarray:
        """||V_t^-1||_F^2 / [V_t^-1]_kl for each sampled pair"""
        entries = self.inverse[ks, ls]
        if np.any(entries == 0):
            raise ContractViolation("sampled an index pair with zero probability")
        return self.frobenius_sq / entries


def index_distribution(V_target_inverse) -> IndexDistribution:
    """Squared-entry distribution of V_t^-1"""
    M = np.asarray(V_target_inverse, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise DomainError(f"expected a square matrix, got shape {M.shape}")
    if np.max(np.abs(M - M.T)) > 1e-9 * max(1.0, np.max(np.abs(M))):
        raise DomainError("inverse covariance is not symmetric")
    M = (M + M.T) / 2
    frobenius_sq = float(np.sum(M ** 2))
    if frobenius_sq == 0:
        raise DomainError("inverse covariance is identically zero")
    return IndexDistribution(inverse=M, weights=M ** 2 / frobenius_sq, frobenius_sq=frobenius_sq)


# Overlap kernels

def chi_values(ks, ls, r_prime, x_target, dist: IndexDistribution) -> np.ndarray:
    x_target = np.asarray(x_target, dtype=float)
    return np.asarray(r_prime) * x_target[ls] * dist.reweight(np.asarray(ks), np.asarray(ls))


def x_values(ks, ls, gamma_prime, dist: IndexDistribution) -> np.ndarray:
    return np.asarray(gamma_prime) * dist.reweight(np.asarray(ks), np.asarray(ls))


def chi_kernel(k: int, l: int, r_prime: float, x_target, dist: IndexDistribution) -> float:
    """r'_k [x_t]_l / [V_t^-1]_kl * ||V_t^-1||_F^2"""
    return float(chi_values(np.array([k]), np.array([l]), np.array([r_prime]), x_target, dist)[0])


def x_kernel(k: int, l: int, gamma_prime: float, dist: IndexDistribution) -> float:
    """Gamma'_kl / [V_t^-1]_kl * ||V_t^-1||_F^2"""
    return float(x_values(np.array([k]), np.array([l]), np.array([gamma_prime]), dist)[0])


def target_moments(target: GaussianUnitary, alpha) -> Tuple[np.ndarray, np.ndarray]:
    """(x_U(alpha), V_U) for the ideal output U|alpha>"""
    alpha = np.atleast_1d(np.asarray(alpha, dtype=complex))
    x_in = np.column_stack([alpha.real, alpha.imag]).ravel()
    S = target.S.entries
    return S @ x_in + target.d, VACUUM_VARIANCE * S @ S.T


def channel_distribution(target: GaussianUnitary) -> IndexDistribution:
    """Index distribution of V_U (the same for every coherent probe)"""
    _, V_U = target_moments(target, np.zeros(target.modes))
    return index_distribution(np.linalg.inv(V_U))


def channel_kernels(alpha, k: int, l: int, outcome: float, target: GaussianUnitary,
                    kernel: Kernel = Kernel.CHI_C) -> float:
    """chi_c (outcome r'_k) or X_c (outcome Gamma'_kl) for probe alpha"""
    kernel = Kernel(kernel)
    x_U, _ = target_moments(target, alpha)
    dist = channel_distribution(target)
    if kernel is Kernel.CHI_C:
        return chi_kernel(k, l, outcome, x_U, dist)
    if kernel is Kernel.X_C:
        return x_kernel(k, l, outcome, dist)
    raise DomainError(f"channel kernels are chi_c and X_c, got {kernel.value}")


# Dictionary kernels

def dictionary_values(dictionary: ObservableDictionary, ks, outcomes) -> np.ndarray:
    """sign(c_k) * outcome * sum |c_l|"""
    coefs = dictionary.coefficients[np.asarray(ks)]
    if np.any(coefs == 0):
        raise ContractViolation("sampled an observable with zero coefficient")
    return np.sign(coefs) * np.asarray(outcomes) * dictionary.norm1


def zeta_kernel(alpha: complex, k: int, nu_prime: float, g: float) -> float:
    """Amplifier kernel; k indexes {q^2, p^2, q, p} from 0"""
    dictionary = build_dictionary(Scenario.AMPLIFIER, alpha, g)
    return float(dictionary_values(dictionary, [k], [nu_prime])[0])


def z_kernel(alpha: complex, k: int, mu_prime: float, gamma: float) -> float:
    """Cubic-gate kernel; k indexes the eight observables from 0"""
    dictionary = build_dictionary(Scenario.CUBIC, alpha, gamma)
    return float(dictionary_values(dictionary, [k], [mu_prime])[0])


# Median of means

def batch_count(delta: float) -> int:
    """B = ceil(2 ln(2/delta))"""
    if not 0.0 < delta < 1.0:
        raise DomainError(f"delta must lie in (0, 1), got {delta}")
    return int(math.ceil(2.0 * math.log(2.0 / delta)))


def batch_size(epsilon: float, variance_proxy: float, batch_constant: Optional[float] = None) -> int:
    """ceil(34 sigma^2 / epsilon^2), at least one shot"""
    if epsilon <= 0:
        raise DomainError(f"epsilon must be positive, got {epsilon}")
    if variance_proxy < 0:
        raise DomainError(f"variance proxy must be nonnegative, got {variance_proxy}")
    if batch_constant is None:
        batch_constant = get_config().estimation.batch_constant
    return max(1, safe_ceil(batch_constant * variance_proxy / epsilon ** 2))


def lower_median(values: Sequence[float]) -> float:
    ordered = sorted(values)
    return float(ordered[(len(ordered) - 1) // 2])


def aggregate_batches(batch_means: List[float], per_batch_size: int, epsilon: float,
                      delta: float, variance_proxy: float) -> MoMResult:
    """MoMResult from precomputed batch means"""
    B = len(batch_means)
    return MoMResult(
        estimate=lower_median(batch_means),
        B=B,
        batch_means=[float(v) for v in batch_means],
        per_batch_size=per_batch_size,
        total_N=B * per_batch_size,
        epsilon=epsilon,
        delta=delta,
        variance_proxy=variance_proxy,
    )


def median_of_means(stream: Iterable[float], epsilon: float, delta: float,
                    variance_proxy: float, batch_constant: Optional[float] = None) -> MoMResult:
    """
    Median of B batch means, each over ceil(34 sigma^2/epsilon^2) values.

    Consumes exactly B * per_batch values from the stream.
    """
    B = batch_count(delta)
    n = batch_size(epsilon, variance_proxy, batch_constant)
    needed = B * n
    if isinstance(stream, np.ndarray):
        values = np.asarray(stream[:needed], dtype=float)
    else:
        values = np.fromiter(itertools.islice(iter(stream), needed), dtype=float)
    if values.shape[0] < needed:
        raise InsufficientSamplesError(
            f"median of means needs {needed} values ({B} batches of {n}), got {values.shape[0]}"
        )
    means = values.reshape(B, n).mean(axis=1)
    logger.debug("median_of_means: B=%d n=%d means=%s", B, n, means)
    return aggregate_batches(list(means), n, epsilon, delta, variance_proxy)
