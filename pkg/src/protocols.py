"""
Shot samplers for the four benchmarking protocols.

A sampler turns a generator into estimator values for one kernel, drawing the
index or observable, the probe (channel scenarios) and the homodyne outcome
in a fixed order. Values for a batch depend only on the generator state.
"""

import logging
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .channels import probe_cubic, probe_gaussian
from .config import GridConfig
from .errors import ConfigError
from .estimators import (
    channel_distribution, chi_values, index_distribution, target_moments, x_values,
)
from .gaussian import quadrature_marginal
from .measurement import sample_gamma_entries
from .models import (
    DeviceModel, EstimatorSample, GaussianState, GaussianUnitary, Kernel, ProbeEnsemble, Scenario,
)
from .wavefn import QuadratureSampler
from .witnesses import build_dictionary

logger = logging.getLogger(__name__)


@dataclass
class ShotBatch:
    """Vectorized estimator samples of one kernel"""
    kernel: Kernel
    first: np.ndarray
    second: np.ndarray
    outcomes: np.ndarray
    values: np.ndarray
    probes: Optional[np.ndarray] = None
    amplitudes: Optional[Tuple[np.ndarray, ...]] = None

    def __len__(self) -> int:
        return self.values.shape[0]

    def _alpha(self, i: int):
        alpha = self.amplitudes[self.probes[i]]
        return complex(alpha[0]) if alpha.shape[0] == 1 else tuple(complex(a) for a in alpha)

    def samples(self) -> List[EstimatorSample]:
        """Per-shot records: indices are (k, l), (k, l, alpha) or (k, alpha)"""
        records = []
        for i in range(len(self)):
            if self.kernel in (Kernel.CHI, Kernel.X):
                indices = (int(self.first[i]), int(self.second[i]))
            elif self.kernel in (Kernel.CHI_C, Kernel.X_C):
                indices = (int(self.first[i]), int(self.second[i]), self._alpha(i))
            else:
                indices = (int(self.first[i]), self._alpha(i))
            records.append(EstimatorSample(kernel=self.kernel, indices=indices,
                                           outcome=float(self.outcomes[i]), value=float(self.values[i])))
        return records


def _draw_probes(ensemble: ProbeEnsemble, count: int, rng: np.random.Generator) -> np.ndarray:
    """Probe indices drawn from the prior, one per shot"""
    if len(ensemble) == 1:
        return np.zeros(count, dtype=int)
    cumulative = np.cumsum(ensemble.priors)
    cumulative /= cumulative[-1]
    return np.minimum(np.searchsorted(cumulative, rng.random(count), side='right'), len(ensemble) - 1)


class ShotSampler:
    """Base class: kernels served and the draw interface"""

    kernels: Tuple[Kernel, ...] = ()

    def draw(self, kernel: Kernel, count: int, rng: np.random.Generator) -> ShotBatch:
        kernel = Kernel(kernel)
        if kernel not in self.kernels:
            raise ConfigError(f"{type(self).__name__} does not sample the {kernel.value} kernel")
        return self._draw(kernel, count, rng)

    def _draw(self, kernel: Kernel, count: int, rng: np.random.Generator) -> ShotBatch:
        raise NotImplementedError


class StateShotSampler(ShotSampler):
    """chi and X shots for a Gaussian target state and prepared state"""

    kernels = (Kernel.CHI, Kernel.X)

    def __init__(self, target: GaussianState, prep: GaussianState):
        self.target = target
        self.prep = prep
        self.dist = index_distribution(np.linalg.inv(target.V))

    def _draw(self, kernel, count, rng):
        ks, ls = self.dist.sample(rng, count)
        if kernel is Kernel.CHI:
            outcomes = self.prep.x[ks] + np.sqrt(self.prep.V[ks, ks]) * rng.standard_normal(count)
            values = chi_values(ks, ls, outcomes, self.target.x, self.dist)
        else:
            outcomes, _ = sample_gamma_entries(self.prep, ks, ls, rng)
            values = x_values(ks, ls, outcomes, self.dist)
        return ShotBatch(kernel=kernel, first=ks, second=ls, outcomes=outcomes, values=values)


class ChannelShotSampler(ShotSampler):
    """chi_c and X_c shots: probe from the prior, then index pair, then outcome"""

    kernels = (Kernel.CHI_C, Kernel.X_C)

    def __init__(self, target: GaussianUnitary, device: DeviceModel, ensemble: ProbeEnsemble):
        if ensemble.modes != target.modes:
            raise ConfigError(f"probes have {ensemble.modes} modes, target acts on {target.modes}")
        self.ensemble = ensemble
        self.dist = channel_distribution(target)
        self.outputs = [probe_gaussian(device, alpha) for alpha in ensemble.amplitudes]
        self.x_target = np.array([target_moments(target, alpha)[0] for alpha in ensemble.amplitudes])
        self.x_out = np.array([out.x for out in self.outputs])
        self.sd_out = np.array([np.sqrt(np.diag(out.V)) for out in self.outputs])

    def _draw(self, kernel, count, rng):
        probes = _draw_probes(self.ensemble, count, rng)
        ks, ls = self.dist.sample(rng, count)
        if kernel is Kernel.CHI_C:
            outcomes = self.x_out[probes, ks] + self.sd_out[probes, ks] * rng.standard_normal(count)
            values = outcomes * self.x_target[probes, ls] * self.dist.reweight(ks, ls)
        else:
            outcomes = np.empty(count)
            for j, out in enumerate(self.outputs):
                mask = probes == j
                if mask.any():
                    outcomes[mask], _ = sample_gamma_entries(out, ks[mask], ls[mask], rng)
            values = x_values(ks, ls, outcomes, self.dist)
        return ShotBatch(kernel=kernel, first=ks, second=ls, outcomes=outcomes, values=values,
                         probes=probes, amplitudes=self.ensemble.amplitudes)


class DictionaryShotSampler(ShotSampler):
    """
    Shots of a single-mode observable dictionary.

    Per shot: probe alpha from the prior, observable k with probability
    |c_k(alpha)| / sum |c_l(alpha)|, then one homodyne outcome at angle
    theta_k raised to power_k.
    """

    scenario: Scenario

    def __init__(self, parameter: float, ensemble: ProbeEnsemble):
        if ensemble.modes != 1:
            raise ConfigError(f"{self.scenario.value} probes must be single-mode")
        self.ensemble = ensemble
        self.dictionaries = [build_dictionary(self.scenario, alpha, parameter) for alpha in ensemble.amplitudes]
        self.coefficients = np.array([d.coefficients for d in self.dictionaries])
        self.norms = np.array([d.norm1 for d in self.dictionaries])
        self.powers = np.array([obs.power for obs in self.dictionaries[0].observables])
        cumulative = np.cumsum(np.abs(self.coefficients), axis=1)
        # all-zero rows cannot occur: the q^2 / p^2 coefficients are 1
        self.cumulative = cumulative / cumulative[:, -1:]

    def _homodyne(self, probes: np.ndarray, ks: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        raise NotImplementedError

    def _draw(self, kernel, count, rng):
        probes = _draw_probes(self.ensemble, count, rng)
        u = rng.random(count)
        ks = np.sum(self.cumulative[probes] <= u[:, None], axis=1)
        readings = self._homodyne(probes, ks, rng)
        outcomes = readings ** self.powers[ks]
        values = np.sign(self.coefficients[probes, ks]) * outcomes * self.norms[probes]
        return ShotBatch(kernel=kernel, first=ks, second=probes, outcomes=outcomes, values=values,
                         probes=probes, amplitudes=self.ensemble.amplitudes)


class AmplifierShotSampler(DictionaryShotSampler):
    """zeta shots on the amplifier outputs"""

    kernels = (Kernel.ZETA,)
    scenario = Scenario.AMPLIFIER

    def __init__(self, gain: float, device: DeviceModel, ensemble: ProbeEnsemble):
        super().__init__(gain, ensemble)
        observables = self.dictionaries[0].observables
        means, sds = [], []
        for alpha in ensemble.amplitudes:
            out = probe_gaussian(device, alpha)
            marginals = [quadrature_marginal(out, 0, obs.theta) for obs in observables]
            means.append([mean for mean, _ in marginals])
            sds.append([np.sqrt(var) for _, var in marginals])
        self.means = np.array(means)
        self.sds = np.array(sds)

    def _homodyne(self, probes, ks, rng):
        return self.means[probes, ks] + self.sds[probes, ks] * rng.standard_normal(probes.shape[0])


class CubicShotSampler(DictionaryShotSampler):
    """Z shots on grid wavefunctions of the cubic-phase device outputs"""

    kernels = (Kernel.Z,)
    scenario = Scenario.CUBIC

    def __init__(self, gamma: float, device: DeviceModel, ensemble: ProbeEnsemble,
                 grid: Optional[GridConfig] = None):
        super().__init__(gamma, ensemble)
        self.device = device
        self.grid = grid
        self.outputs = [probe_cubic(device, alpha, grid) for alpha in ensemble.amplitudes]
        self._samplers: Dict[Tuple[int, int], QuadratureSampler] = {}

    def sampler(self, probe: int, k: int) -> QuadratureSampler:
        """Cached inverse-CDF sampler for probe index and observable k"""
        key = (probe, k)
        if key not in self._samplers:
            theta = self.dictionaries[probe].observables[k].theta
            self._samplers[key] = QuadratureSampler(self.outputs[probe], theta)
        return self._samplers[key]

    def prepare(self):
        """Build every sampler with a nonzero coefficient up front"""
        for j, dictionary in enumerate(self.dictionaries):
            for k, coef in enumerate(dictionary.coefficients):
                if coef:
                    self.sampler(j, k)
        return self

    def _homodyne(self, probes, ks, rng):
        readings = np.empty(probes.shape[0])
        pairs = sorted(set(zip(probes.tolist(), ks.tolist())))
        for j, k in pairs:
            mask = (probes == j) & (ks == k)
            readings[mask] = self.sampler(j, k).sample(int(mask.sum()), rng)
        return readings


def build_sampler(scenario: Scenario, **kwargs) -> ShotSampler:
    """Sampler for a scenario from its keyword arguments"""
    factories = {
        Scenario.GAUSSIAN_STATE: StateShotSampler,
        Scenario.GAUSSIAN_CHANNEL: ChannelShotSampler,
        Scenario.AMPLIFIER: AmplifierShotSampler,
        Scenario.CUBIC: CubicShotSampler,
    }
    return factories[Scenario(scenario)](**kwargs)


def scenario_kernels(scenario: Scenario) -> Sequence[Kernel]:
    return {
        Scenario.GAUSSIAN_STATE: StateShotSampler.kernels,
        Scenario.GAUSSIAN_CHANNEL: ChannelShotSampler.kernels,
        Scenario.AMPLIFIER: AmplifierShotSampler.kernels,
        Scenario.CUBIC: CubicShotSampler.kernels,
    }[Scenario(scenario)]
