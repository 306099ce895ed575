"""
Data models for the witness toolkit.
Defines Gaussian states, unitaries and channels, probe ensembles, devices,
and the records produced by estimation runs.
"""

from dataclasses import dataclass, field, asdict
from typing import List, Optional, Dict, Any, Tuple
from enum import Enum

import numpy as np

from .config import VACUUM_VARIANCE, get_config
from .errors import ConfigError, DimensionError, DomainError
from .symplectic import SymplecticMatrix, symplectic_form


class Scenario(str, Enum):
    """Benchmarking scenarios"""
    GAUSSIAN_STATE = "gaussian_state"
    GAUSSIAN_CHANNEL = "gaussian_channel"
    AMPLIFIER = "amplifier"
    CUBIC = "cubic"


class DeviceKind(str, Enum):
    """Simulated devices under test"""
    IDEAL_GAUSSIAN = "ideal_gaussian"
    LOSSY_GAUSSIAN = "lossy_gaussian"
    THERMAL_GAUSSIAN = "thermal_gaussian"
    MISCALIBRATED_GAUSSIAN = "miscalibrated_gaussian"
    AMPLIFIER = "amplifier"
    CUBIC_PHASE = "cubic_phase"


class Kernel(str, Enum):
    """Estimator kernels"""
    CHI = "chi"
    X = "X"
    CHI_C = "chi_c"
    X_C = "X_c"
    ZETA = "zeta"
    Z = "Z"


class VarianceMode(str, Enum):
    """Source of the median-of-means variance proxy"""
    THEOREM = "theorem"
    PILOT = "pilot"


class SubObservable(str, Enum):
    """Same-mode second-moment sub-observables"""
    ROTATED = "rotated"
    Q2 = "q2"
    P2 = "p2"


def _vector(values, length: Optional[int] = None, name: str = "vector") -> np.ndarray:
    arr = np.array(values, dtype=float).reshape(-1)
    if length is not None and arr.shape != (length,):
        raise DimensionError(f"{name} must have length {length}, got {arr.shape[0]}")
    arr.setflags(write=False)
    return arr


def _square(values, size: int, name: str) -> np.ndarray:
    arr = np.array(values, dtype=float)
    if arr.shape != (size, size):
        raise DimensionError(f"{name} must be {size}x{size}, got {arr.shape}")
    return arr


@dataclass(frozen=True, eq=False)
class GaussianState:
    """First moments x and covariance V of an m-mode Gaussian state"""
    x: np.ndarray
    V: np.ndarray

    def __post_init__(self):
        V = np.array(self.V, dtype=float)
        if V.ndim != 2 or V.shape[0] != V.shape[1] or V.shape[0] % 2:
            raise DimensionError(f"covariance must be 2m x 2m, got {V.shape}")
        x = _vector(self.x, V.shape[0], "first-moment vector")
        numerics = get_config().numerics
        if np.max(np.abs(V - V.T)) > numerics.symmetry_tol * max(1.0, np.max(np.abs(V))):
            raise DomainError("covariance matrix is not symmetric")
        V = (V + V.T) / 2
        J = symplectic_form(V.shape[0] // 2)
        if np.min(np.linalg.eigvalsh(V + 1j * VACUUM_VARIANCE * J)) < -numerics.physicality_tol:
            raise DomainError("covariance violates the uncertainty relation")
        V.setflags(write=False)
        object.__setattr__(self, 'x', x)
        object.__setattr__(self, 'V', V)

    @property
    def modes(self) -> int:
        return self.V.shape[0] // 2

    @property
    def gamma(self) -> np.ndarray:
        """Second-moment matrix V + x x^T"""
        return self.V + np.outer(self.x, self.x)

    def mode_energies(self) -> np.ndarray:
        """<q_j^2> + <p_j^2> for each mode"""
        diag = np.diag(self.gamma)
        return diag[0::2] + diag[1::2]


@dataclass(frozen=True, eq=False)
class GaussianUnitary:
    """Gaussian unitary r -> S r + d"""
    S: SymplecticMatrix
    d: np.ndarray

    def __post_init__(self):
        S = self.S if isinstance(self.S, SymplecticMatrix) else SymplecticMatrix(self.S)
        object.__setattr__(self, 'S', S)
        object.__setattr__(self, 'd', _vector(self.d, S.entries.shape[0], "displacement"))

    @property
    def modes(self) -> int:
        return self.S.modes


@dataclass(frozen=True, eq=False)
class GaussianChannelMap:
    """Gaussian CPTP map x -> X x + d, V -> X V X^T + Y"""
    X: np.ndarray
    Y: np.ndarray
    d: np.ndarray

    def __post_init__(self):
        X = np.array(self.X, dtype=float)
        if X.ndim != 2 or X.shape[0] != X.shape[1] or X.shape[0] % 2:
            raise ConfigError(f"channel matrix X must be 2m x 2m, got {X.shape}")
        size = X.shape[0]
        Y = _square(self.Y, size, "channel noise Y")
        if np.max(np.abs(Y - Y.T)) > 1e-12:
            raise ConfigError("channel noise Y is not symmetric")
        Y = (Y + Y.T) / 2
        J = symplectic_form(size // 2)
        cp = Y + 1j * VACUUM_VARIANCE * (J - X @ J @ X.T)
        if np.min(np.linalg.eigvalsh(cp)) < -get_config().numerics.physicality_tol:
            raise ConfigError("channel violates complete positivity")
        X.setflags(write=False)
        Y.setflags(write=False)
        object.__setattr__(self, 'X', X)
        object.__setattr__(self, 'Y', Y)
        object.__setattr__(self, 'd', _vector(self.d, size, "channel displacement"))

    @property
    def modes(self) -> int:
        return self.X.shape[0] // 2


@dataclass(frozen=True, eq=False)
class ProbeEnsemble:
    """Coherent probe amplitudes with prior probabilities"""
    amplitudes: Tuple[np.ndarray, ...]
    priors: np.ndarray

    def __post_init__(self):
        amps = tuple(np.atleast_1d(np.array(a, dtype=complex)) for a in self.amplitudes)
        if not amps:
            raise ConfigError("probe ensemble must not be empty")
        if len({a.shape for a in amps}) != 1 or amps[0].ndim != 1:
            raise ConfigError("all probe amplitudes must have the same mode count")
        priors = np.array(self.priors, dtype=float).reshape(-1)
        if priors.shape[0] != len(amps):
            raise ConfigError(f"{len(amps)} amplitudes but {priors.shape[0]} priors")
        if np.any(priors < 0):
            raise ConfigError("priors must be nonnegative")
        if abs(priors.sum() - 1.0) > 1e-12:
            raise ConfigError(f"priors must sum to 1, got {priors.sum()!r}")
        priors.setflags(write=False)
        object.__setattr__(self, 'amplitudes', amps)
        object.__setattr__(self, 'priors', priors)

    @classmethod
    def uniform(cls, amplitudes) -> 'ProbeEnsemble':
        amplitudes = list(amplitudes)
        return cls(amplitudes=tuple(amplitudes), priors=np.full(len(amplitudes), 1.0 / len(amplitudes)))

    @property
    def modes(self) -> int:
        return self.amplitudes[0].shape[0]

    def __len__(self) -> int:
        return len(self.amplitudes)

    def mean_photon_number(self) -> float:
        """Sum over probes of P(alpha) |alpha|^2"""
        return float(sum(p * np.sum(np.abs(a) ** 2) for a, p in zip(self.amplitudes, self.priors)))


@dataclass(frozen=True, eq=False)
class DeviceModel:
    """Simulated experimental channel"""
    kind: DeviceKind
    target: Optional[GaussianUnitary] = None
    eta: float = 1.0
    nbar: float = 0.0
    actual: Optional[GaussianUnitary] = None
    gain: float = 1.0
    n_add: float = 0.0
    gamma: float = 0.0
    pre_squeezing: float = 0.0
    pre_displacement: complex = 0j

    def __post_init__(self):
        kind = DeviceKind(self.kind)
        object.__setattr__(self, 'kind', kind)
        if not 0.0 <= self.eta <= 1.0:
            raise ConfigError(f"loss transmissivity eta must lie in [0, 1], got {self.eta}")
        if self.nbar < 0:
            raise ConfigError(f"thermal occupation must be nonnegative, got {self.nbar}")
        if self.n_add < 0:
            raise ConfigError(f"added noise must be nonnegative, got {self.n_add}")
        if kind is DeviceKind.AMPLIFIER and self.gain <= 1.0:
            raise ConfigError(f"amplifier gain must exceed 1, got {self.gain}")
        if kind in (DeviceKind.IDEAL_GAUSSIAN, DeviceKind.LOSSY_GAUSSIAN, DeviceKind.THERMAL_GAUSSIAN) \
                and self.target is None:
            raise ConfigError(f"device kind {kind.value} needs a target unitary")
        if kind is DeviceKind.MISCALIBRATED_GAUSSIAN and self.actual is None:
            raise ConfigError("miscalibrated device needs the applied (S', d')")

    @property
    def is_gaussian(self) -> bool:
        return self.kind is not DeviceKind.CUBIC_PHASE


@dataclass(frozen=True, eq=False)
class QuadratureMonomial:
    """Power of the rotated quadrature q cos(theta) + p sin(theta)"""
    theta: float
    power: int


@dataclass(frozen=True, eq=False)
class ObservableDictionary:
    """Homodyne-accessible observables with their coefficients"""
    observables: Tuple[QuadratureMonomial, ...]
    coefficients: np.ndarray

    def __post_init__(self):
        coefficients = _vector(self.coefficients, len(self.observables), "coefficients")
        object.__setattr__(self, 'coefficients', coefficients)

    @property
    def norm1(self) -> float:
        return float(np.sum(np.abs(self.coefficients)))

    def probabilities(self) -> np.ndarray:
        """p(k) = |c_k| / sum |c_l|"""
        norm = self.norm1
        if norm == 0:
            return np.zeros(len(self.coefficients))
        return np.abs(self.coefficients) / norm


@dataclass
class SecondMomentOutcome:
    """One sampled contribution to a second-moment entry"""
    k: int
    l: int
    value: float
    sub_observable: Optional[SubObservable] = None


@dataclass
class EstimatorSample:
    """One importance-sampled shot"""
    kernel: Kernel
    indices: Tuple
    outcome: float
    value: float


@dataclass
class WitnessValue:
    """Witness lower bound with its constituent terms"""
    value: float
    scenario: Scenario
    components: Dict[str, float] = field(default_factory=dict)


@dataclass
class MoMResult:
    """Median-of-means estimate"""
    estimate: float
    B: int
    batch_means: List[float]
    per_batch_size: int
    total_N: int
    epsilon: float
    delta: float
    variance_proxy: float = 0.0

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


@dataclass
class ComplexityBudget:
    """Upper-bound shot budget from the variance bounds"""
    scenario: Scenario
    epsilon: float
    delta: float
    m: int
    s: float = 1.0
    E_max_prep: Optional[float] = None
    E_max_target: Optional[float] = None
    Gamma_max: Optional[float] = None
    r_max: Optional[float] = None
    q_max: Optional[float] = None
    S_max: Optional[float] = None
    S_prime_max: Optional[float] = None
    batches: int = 0
    N_chi: int = 0
    N_X: int = 0
    N_total: int = 0
    variance_bounds: Dict[str, float] = field(default_factory=dict)
    label: str = "upper-bound budget"

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data['scenario'] = self.scenario.value
        return data


@dataclass
class RunReport:
    """Result of one benchmarking run"""
    scenario: Scenario
    seed: Optional[int]
    config: Dict[str, Any]
    witness: Optional[float] = None
    epsilon: Optional[float] = None
    delta: Optional[float] = None
    variance_mode: Optional[str] = None
    estimators: Dict[str, MoMResult] = field(default_factory=dict)
    known_terms: Dict[str, float] = field(default_factory=dict)
    oracle: Dict[str, float] = field(default_factory=dict)
    shots: int = 0
    pilot_shots: int = 0
    budget: Optional[ComplexityBudget] = None
    timing: Dict[str, float] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'scenario': self.scenario.value,
            'seed': self.seed,
            'config': self.config,
            'witness': self.witness,
            'epsilon': self.epsilon,
            'delta': self.delta,
            'variance_mode': self.variance_mode,
            'estimators': {name: result.to_dict() for name, result in self.estimators.items()},
            'known_terms': self.known_terms,
            'oracle': self.oracle,
            'shots': self.shots,
            'pilot_shots': self.pilot_shots,
            'budget': self.budget.to_dict() if self.budget else None,
            'timing': self.timing,
        }
