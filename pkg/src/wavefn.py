"""
Single-mode pure states on a position grid, plus a truncated Fock-space oracle.

Grid points are q_k = q_min + k dq for k = 0..n-1 with dq = (q_max - q_min)/n.
Quadrature rotations use the three-chirp factorization
exp(-i theta (q^2 + p^2)) = A B A with A = exp(-i tan(theta/2) q^2) applied
pointwise and B = exp(-i sin(theta) p^2) applied in the FFT basis (p = k/2).
"""

import logging
from dataclasses import dataclass
from typing import Callable, Optional, Union

import numpy as np
from scipy.fft import fft, ifft, fftfreq
from scipy.linalg import expm
from scipy.special import gammaln
from scipy.stats import norm

from .config import GridConfig, get_config
from .errors import ConvergenceError, DimensionError, DomainError, GridError, NotPureStateError
from .gaussian import coherent_state, is_pure
from .models import GaussianState

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class GridWavefunction:
    """Normalized wavefunction samples on a periodic position grid"""
    samples: np.ndarray
    q_min: float
    q_max: float

    def __post_init__(self):
        samples = np.array(self.samples, dtype=complex).reshape(-1)
        n = samples.shape[0]
        if n < 2 or n & (n - 1):
            raise GridError(f"grid size must be a power of two, got {n}")
        if self.q_max <= self.q_min:
            raise GridError("q_max must exceed q_min")
        norm_sq = np.sum(np.abs(samples) ** 2) * (self.q_max - self.q_min) / n
        if abs(norm_sq - 1.0) > 1e-9:
            raise DomainError(f"wavefunction norm {norm_sq!r} differs from 1")
        samples.setflags(write=False)
        object.__setattr__(self, 'samples', samples)

    @property
    def n_grid(self) -> int:
        return self.samples.shape[0]

    @property
    def dq(self) -> float:
        return (self.q_max - self.q_min) / self.n_grid

    @property
    def q(self) -> np.ndarray:
        return self.q_min + self.dq * np.arange(self.n_grid)

    def probabilities(self) -> np.ndarray:
        """|psi(q_k)|^2 dq"""
        return np.abs(self.samples) ** 2 * self.dq

    def replace(self, samples: np.ndarray) -> 'GridWavefunction':
        return GridWavefunction(samples=samples, q_min=self.q_min, q_max=self.q_max)


def grid_points(grid: GridConfig) -> np.ndarray:
    return grid.q_min + grid.dq * np.arange(grid.n_grid)


def gaussian_wavefunction(state: GaussianState, grid: Optional[GridConfig] = None) -> GridWavefunction:
    """
    Grid wavefunction of a pure single-mode Gaussian state.

    psi(q) = (2u/pi)^(1/4) exp(-(u + iv)(q - x_q)^2 + 2i x_p q) with
    u = 1/(4 V_qq) and v = -V_qp / V_qq.
    """
    grid = grid or get_config().grid
    if state.modes != 1:
        raise DimensionError("grid wavefunctions are single-mode")
    if not is_pure(state):
        raise NotPureStateError("grid wavefunctions need a pure Gaussian state")
    xq, xp = state.x
    a, c = state.V[0, 0], state.V[0, 1]
    sd = np.sqrt(a)
    tail = norm.cdf(grid.q_min, loc=xq, scale=sd) + norm.sf(grid.q_max, loc=xq, scale=sd)
    if tail > grid.tail_tol:
        raise GridError(f"state mass {tail:.2e} lies outside [{grid.q_min}, {grid.q_max}]")
    u, v = 1.0 / (4 * a), -c / a
    q = grid_points(grid)
    psi = (2 * u / np.pi) ** 0.25 * np.exp(-(u + 1j * v) * (q - xq) ** 2 + 2j * xp * q)
    psi /= np.sqrt(np.sum(np.abs(psi) ** 2) * grid.dq)
    return GridWavefunction(samples=psi, q_min=grid.q_min, q_max=grid.q_max)


def coherent_wavefunction(alpha: complex, grid: Optional[GridConfig] = None) -> GridWavefunction:
    return gaussian_wavefunction(coherent_state([alpha]), grid)


def apply_cubic_phase(psi: GridWavefunction, gamma: float) -> GridWavefunction:
    """Pointwise multiplication by exp(i gamma q^3)"""
    if gamma == 0:
        return psi
    return psi.replace(psi.samples * np.exp(1j * gamma * psi.q ** 3))


def _wrap_angle(theta: float) -> float:
    wrapped = (theta + np.pi) % (2 * np.pi) - np.pi
    return np.pi if wrapped == -np.pi else wrapped


def _boundary_mass(samples: np.ndarray, dq: float, fraction: float) -> float:
    band = max(1, int(fraction * samples.shape[0]))
    edge = np.abs(samples[:band]) ** 2 + np.abs(samples[-band:]) ** 2
    return float(np.sum(edge) * dq)


def _three_chirp(samples: np.ndarray, q: np.ndarray, dq: float, theta: float) -> np.ndarray:
    chirp = np.exp(-1j * np.tan(theta / 2) * q ** 2)
    k = 2 * np.pi * fftfreq(samples.shape[0], d=dq)
    kinetic = np.exp(-1j * np.sin(theta) * (k / 2) ** 2)
    out = ifft(kinetic * fft(chirp * samples))
    # exp(-i theta n) = exp(i theta/2) exp(-i theta (q^2 + p^2))
    return np.exp(0.5j * theta) * chirp * out


def rotate_quadrature(psi: GridWavefunction, theta: float,
                      boundary_tol: Optional[float] = None,
                      boundary_fraction: Optional[float] = None) -> GridWavefunction:
    """
    Wavefunction in the representation of q cos(theta) + p sin(theta).

    Angles beyond pi/2 in magnitude are applied as two half rotations so the
    chirp rate tan(theta/2) stays at most 1.
    """
    grid_cfg = get_config().grid
    boundary_tol = grid_cfg.boundary_tol if boundary_tol is None else boundary_tol
    boundary_fraction = grid_cfg.boundary_fraction if boundary_fraction is None else boundary_fraction

    theta = _wrap_angle(float(theta))
    if theta == 0.0:
        return psi
    if abs(theta) > np.pi / 2:
        half = rotate_quadrature(psi, theta / 2, boundary_tol, boundary_fraction)
        return rotate_quadrature(half, theta / 2, boundary_tol, boundary_fraction)

    samples = _three_chirp(psi.samples, psi.q, psi.dq, theta)
    leaked = _boundary_mass(samples, psi.dq, boundary_fraction)
    if leaked > boundary_tol:
        raise GridError(f"rotation by {theta:.4f} pushed mass {leaked:.2e} to the grid boundary")
    # remove roundoff drift so the result passes the norm invariant
    samples /= np.sqrt(np.sum(np.abs(samples) ** 2) * psi.dq)
    return psi.replace(samples)


class QuadratureSampler:
    """Inverse-CDF sampler for one rotated quadrature, linear inside each grid cell"""

    def __init__(self, psi: GridWavefunction, theta: float):
        rotated = rotate_quadrature(psi, theta)
        self.theta = theta
        self.dq = rotated.dq
        self.pdf = rotated.probabilities()
        self.pdf /= self.pdf.sum()
        self.left_edges = rotated.q - rotated.dq / 2
        self.cdf = np.concatenate([[0.0], np.cumsum(self.pdf)])
        self.cdf[-1] = 1.0

    def sample(self, count: int, rng: np.random.Generator) -> np.ndarray:
        if count < 0:
            raise DomainError(f"sample count must be nonnegative, got {count}")
        u = rng.random(count)
        idx = np.clip(np.searchsorted(self.cdf, u, side='right') - 1, 0, self.pdf.shape[0] - 1)
        mass = self.pdf[idx]
        frac = np.divide(u - self.cdf[idx], mass, out=np.full(count, 0.5), where=mass > 0)
        return self.left_edges[idx] + np.clip(frac, 0.0, 1.0) * self.dq

    def moment(self, power: int) -> float:
        centers = self.left_edges + self.dq / 2
        return float(np.sum(self.pdf * centers ** power))


def quadrature_pdf_and_sample(psi: GridWavefunction, theta: float, count: int,
                              rng: Union[np.random.Generator, int]) -> np.ndarray:
    """Draw homodyne outcomes of q cos(theta) + p sin(theta)"""
    if count < 1:
        raise DomainError(f"count must be at least 1, got {count}")
    if not isinstance(rng, np.random.Generator):
        rng = np.random.default_rng(rng)
    return QuadratureSampler(psi, theta).sample(count, rng)


def grid_moment(psi: GridWavefunction, theta: float, power: int) -> float:
    """<(q cos(theta) + p sin(theta))^power> from the grid"""
    rotated = rotate_quadrature(psi, theta)
    return float(np.sum(rotated.probabilities() * rotated.q ** power))


# Truncated Fock space

class FockOperatorSet:
    """Ladder and quadrature matrices truncated to photon numbers below cutoff"""

    def __init__(self, cutoff: int):
        if cutoff < 2:
            raise DomainError(f"Fock cutoff must be at least 2, got {cutoff}")
        self.cutoff = cutoff
        self.a = np.diag(np.sqrt(np.arange(1, cutoff)), 1).astype(complex)
        self.ad = self.a.conj().T
        self.q = (self.a + self.ad) / 2
        self.p = (self.a - self.ad) / 2j
        self.n = np.diag(np.arange(cutoff)).astype(complex)
        self.identity = np.eye(cutoff, dtype=complex)

    def quadrature(self, theta: float) -> np.ndarray:
        return np.cos(theta) * self.q + np.sin(theta) * self.p

    def displacement(self, alpha: complex) -> np.ndarray:
        return expm(alpha * self.ad - np.conj(alpha) * self.a)

    def squeezing(self, r: float) -> np.ndarray:
        """exp(r/2 (a^2 - a^dag^2)); squeezes q by exp(-r)"""
        return expm(0.5 * r * (self.a @ self.a - self.ad @ self.ad))

    def cubic_phase(self, gamma: float) -> np.ndarray:
        return expm(1j * gamma * self.q @ self.q @ self.q)

    def commutator_defect(self) -> float:
        """max deviation of [q, p] from i/2 on photon numbers below cutoff - 1"""
        block = self.cutoff - 1
        comm = self.q @ self.p - self.p @ self.q
        return float(np.max(np.abs(comm[:block, :block] - 0.5j * np.eye(block))))


def fock_coherent_state(alpha: complex, cutoff: int) -> np.ndarray:
    """Truncated coherent vector exp(-|a|^2/2) a^n / sqrt(n!)"""
    n = np.arange(cutoff)
    if alpha == 0:
        vec = np.zeros(cutoff, dtype=complex)
        vec[0] = 1.0
        return vec
    log_mag = -0.5 * abs(alpha) ** 2 + n * np.log(abs(alpha)) - 0.5 * gammaln(n + 1)
    vec = np.exp(log_mag) * np.exp(1j * n * np.angle(alpha))
    leaked = 1.0 - np.sum(np.abs(vec) ** 2)
    if leaked > 1e-10:
        raise ConvergenceError(f"cutoff {cutoff} drops {leaked:.2e} of the coherent state |{alpha}>")
    return vec


def fock_cubic_state(alpha: complex, gamma: float, cutoff: int,
                     squeezing: float = 0.0, displacement: complex = 0j) -> np.ndarray:
    """
    U(gamma) D(displacement) S(squeezing) |alpha> in a cutoff-dimensional space.

    The gate is exponentiated in a doubled working space; the result is
    truncated, checked for leakage and renormalized.
    """
    work = FockOperatorSet(2 * cutoff)
    vec = fock_coherent_state(alpha, 2 * cutoff)
    if squeezing:
        vec = work.squeezing(squeezing) @ vec
    if displacement:
        vec = work.displacement(displacement) @ vec
    if gamma:
        vec = work.cubic_phase(gamma) @ vec
    leaked = 1.0 - np.sum(np.abs(vec[:cutoff]) ** 2)
    if leaked > 1e-8:
        raise ConvergenceError(f"cutoff {cutoff} drops {leaked:.2e} of the cubic-phase state")
    vec = vec[:cutoff]
    return vec / np.linalg.norm(vec)


Observable = Union[np.ndarray, Callable[[FockOperatorSet], np.ndarray]]


def fock_expectation(opset: FockOperatorSet, state: np.ndarray, observable: Observable) -> float:
    """<psi|A|psi> in the truncated space"""
    matrix = observable(opset) if callable(observable) else np.asarray(observable)
    if matrix.shape != (opset.cutoff, opset.cutoff) or state.shape != (opset.cutoff,):
        raise DimensionError(f"operator/state do not match cutoff {opset.cutoff}")
    if abs(np.linalg.norm(state) - 1.0) > 1e-9:
        raise DomainError("Fock state is not normalized")
    scale = max(1.0, float(np.max(np.abs(matrix))))
    if np.max(np.abs(matrix - matrix.conj().T)) > 1e-10 * scale:
        raise DomainError("observable is not Hermitian")
    return float(np.real(np.vdot(state, matrix @ state)))


def converged_expectation(state_fn: Callable[[int], np.ndarray], observable: Observable,
                          cutoff: Optional[int] = None, tol: Optional[float] = None,
                          max_doublings: Optional[int] = None) -> float:
    """
    Expectation value checked for stability under cutoff doubling.

    state_fn(cutoff) must return the state vector at that cutoff.
    """
    fock_cfg = get_config().fock
    cutoff = cutoff or fock_cfg.cutoff
    tol = fock_cfg.convergence_tol if tol is None else tol
    max_doublings = fock_cfg.max_doublings if max_doublings is None else max_doublings

    previous = fock_expectation(FockOperatorSet(cutoff), state_fn(cutoff), observable)
    for _ in range(max(1, max_doublings)):
        cutoff *= 2
        current = fock_expectation(FockOperatorSet(cutoff), state_fn(cutoff), observable)
        if abs(current - previous) <= tol:
            logger.debug("Fock expectation converged at cutoff %d: %.12f", cutoff, current)
            return current
        previous = current
    raise ConvergenceError(f"Fock expectation not stable to {tol} up to cutoff {cutoff}")


def fock_overlap(target: np.ndarray, prep: np.ndarray) -> float:
    """|<target|prep>|^2 for pure Fock vectors"""
    if target.shape != prep.shape:
        raise DimensionError("Fock vectors have different cutoffs")
    return float(abs(np.vdot(target, prep)) ** 2)
