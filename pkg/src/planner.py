"""
Sample-complexity planner.

Turns the variance bounds of the four estimators into median-of-means shot
budgets. Budgets are upper bounds built from explicit constants (2^6, 2^8,
the batch constant and the batch-count formula), never a required N.
"""

import logging
import math
from typing import Dict, Optional

import numpy as np

from .channels import probe_cubic, probe_gaussian, target_output
from .config import GridConfig
from .errors import DomainError
from .estimators import batch_count, batch_size
from .gaussian import normal_moment, quadrature_marginal
from .measurement import gamma_second_moments
from .models import (
    ComplexityBudget, DeviceModel, GaussianState, GaussianUnitary, ProbeEnsemble, Scenario,
)
from .symplectic import euler_decomposition, williamson_euler
from .wavefn import grid_moment
from .witnesses import AMPLIFIER_OBSERVABLES, CUBIC_OBSERVABLES

logger = logging.getLogger(__name__)

BUDGET_LABEL = "upper-bound budget"


def _check_accuracy(epsilon: float, delta: float):
    if epsilon <= 0:
        raise DomainError(f"epsilon must be positive, got {epsilon}")
    if not 0.0 < delta < 1.0:
        raise DomainError(f"delta must lie in (0, 1), got {delta}")


def _check_positive(**values: float):
    for name, value in values.items():
        if value is None or value <= 0:
            raise DomainError(f"{name} must be positive, got {value}")


# Frobenius-norm chain

def frobenius_bound_chain(xi) -> Dict[str, float]:
    """
    ||V^-1||_F^2 of the squeezed vacuum with squeezing vector xi and each
    step of the bound chain:

        exact <= [8 sum cosh(2 xi_k)]^2 <= 2^6 m^2 cosh^2(2 xi_max) <= 2^6 m^2 s^4
    """
    xi = np.atleast_1d(np.asarray(xi, dtype=float))
    if np.any(xi < 0):
        raise DomainError("squeezing parameters must be nonnegative")
    m = xi.shape[0]
    xi_max = float(xi.max())
    return {
        'exact': float(np.sum(32.0 * np.cosh(4 * xi))),
        'cauchy_schwarz': float((8.0 * np.sum(np.cosh(2 * xi))) ** 2),
        'max_squeezing': 64.0 * m ** 2 * math.cosh(2 * xi_max) ** 2,
        'bound': 64.0 * m ** 2 * math.exp(4 * xi_max),
    }


def bound_frobenius(xi) -> float:
    """2^6 m^2 s^4 with s = exp(xi_max)"""
    return frobenius_bound_chain(xi)['bound']


# Budgets

def _two_estimator_budget(scenario: Scenario, epsilon: float, delta: float, m: int, s: float,
                          chi_bound: float, x_bound: float, **inputs) -> ComplexityBudget:
    """Shared chi/X budget: err_chi = eps, err_X = 2 eps, failure delta/2 each"""
    B = batch_count(delta / 2)
    n_chi = batch_size(epsilon, chi_bound)
    n_x = batch_size(2 * epsilon, x_bound)
    budget = ComplexityBudget(
        scenario=scenario, epsilon=epsilon, delta=delta, m=m, s=s,
        batches=B, N_chi=B * n_chi, N_X=B * n_x, N_total=B * (n_chi + n_x),
        variance_bounds={'chi': chi_bound, 'X': x_bound},
        label=BUDGET_LABEL, **inputs,
    )
    logger.debug("%s budget: %s", scenario.value, budget)
    return budget


def plan_state(epsilon: float, delta: float, m: int, s_t: float, E_max_p: float,
               Gamma_max: float, x_t_norm_sq: float) -> ComplexityBudget:
    """Budget for the Gaussian-state witness"""
    _check_accuracy(epsilon, delta)
    _check_positive(m=m, s_t=s_t, E_max_p=E_max_p, Gamma_max=Gamma_max)
    if x_t_norm_sq < 0:
        raise DomainError(f"x_t_norm_sq must be nonnegative, got {x_t_norm_sq}")
    s4 = s_t ** 4
    return _two_estimator_budget(
        Scenario.GAUSSIAN_STATE, epsilon, delta, m, s_t,
        chi_bound=2 ** 6 * m ** 3 * s4 * E_max_p * x_t_norm_sq,
        x_bound=2 ** 8 * m ** 4 * s4 * Gamma_max,
        E_max_prep=E_max_p, Gamma_max=Gamma_max,
    )


def plan_channel(epsilon: float, delta: float, m: int, s_U: float, E_max_U: float,
                 E_max_E: float, Gamma_max: float) -> ComplexityBudget:
    """Budget for the Gaussian-channel witness (independent of the prior)"""
    _check_accuracy(epsilon, delta)
    _check_positive(m=m, s_U=s_U, E_max_U=E_max_U, E_max_E=E_max_E, Gamma_max=Gamma_max)
    s4 = s_U ** 4
    return _two_estimator_budget(
        Scenario.GAUSSIAN_CHANNEL, epsilon, delta, m, s_U,
        chi_bound=2 ** 6 * m ** 4 * s4 * E_max_U * E_max_E,
        x_bound=2 ** 8 * m ** 4 * s4 * Gamma_max,
        E_max_prep=E_max_E, E_max_target=E_max_U, Gamma_max=Gamma_max,
    )


def _single_estimator_budget(scenario: Scenario, name: str, epsilon: float, delta: float,
                             bound: float, **inputs) -> ComplexityBudget:
    B = batch_count(delta)
    n = batch_size(epsilon, bound)
    return ComplexityBudget(
        scenario=scenario, epsilon=epsilon, delta=delta, m=1,
        batches=B, N_total=B * n, variance_bounds={name: bound},
        label=BUDGET_LABEL, **inputs,
    )


def plan_amplifier(epsilon: float, delta: float, S_max: float, r_max: float) -> ComplexityBudget:
    """N = B ceil(34 S_max^2 r_max / eps^2)"""
    _check_accuracy(epsilon, delta)
    _check_positive(S_max=S_max, r_max=r_max)
    return _single_estimator_budget(Scenario.AMPLIFIER, 'zeta', epsilon, delta,
                                    S_max ** 2 * r_max, S_max=S_max, r_max=r_max)


def plan_cubic(epsilon: float, delta: float, gamma: float, ensemble: ProbeEnsemble,
               q_max: float) -> ComplexityBudget:
    """N = B ceil(34 S'_max^2 q_max / eps^2)"""
    _check_accuracy(epsilon, delta)
    _check_positive(q_max=q_max)
    S_prime = cubic_set_bound(gamma, ensemble)
    return _single_estimator_budget(Scenario.CUBIC, 'Z', epsilon, delta,
                                    S_prime ** 2 * q_max, S_prime_max=S_prime, q_max=q_max)


# Coefficient-set bounds

def _max_parts(ensemble: ProbeEnsemble):
    alphas = np.array([complex(a[0]) for a in ensemble.amplitudes])
    return np.abs(alphas.real).max(), np.abs(alphas.imag).max(), alphas


def amplifier_set_bound(ensemble: ProbeEnsemble, gain: float = 1.0) -> float:
    """2(1 + g max|Re a| + g max|Im a|); dominates sum |tau| over the ensemble"""
    re_max, im_max, _ = _max_parts(ensemble)
    return float(2.0 * (1.0 + gain * re_max + gain * im_max))


def cubic_set_bound(gamma: float, ensemble: ProbeEnsemble) -> float:
    """1 + 9g^2/4 + (1 + 2 sqrt2)|g| + max|1 + 3g Im a| + 2(max|Re a| + max|Im a|)"""
    re_max, im_max, alphas = _max_parts(ensemble)
    return float(
        1.0 + 9 * gamma ** 2 / 4 + (1 + 2 * math.sqrt(2)) * abs(gamma)
        + np.abs(1 + 3 * gamma * alphas.imag).max()
        + 2 * (re_max + im_max)
    )


def vacuum_q_max() -> float:
    """<q^8> on vacuum, 105/256"""
    return normal_moment(8, 0.0, 0.25)


# Bound inputs from simulated devices

def state_bound_inputs(target: GaussianState, prep: GaussianState) -> Dict[str, float]:
    """m, s_t, E_max, Gamma_max and ||x_t||^2 for plan_state"""
    return {
        'm': target.modes,
        's_t': williamson_euler(target.V).s,
        'E_max_p': float(prep.mode_energies().max()),
        'Gamma_max': float(gamma_second_moments(prep).max()),
        'x_t_norm_sq': float(target.x @ target.x),
    }


def channel_bound_inputs(target: GaussianUnitary, device: DeviceModel,
                         ensemble: ProbeEnsemble) -> Dict[str, float]:
    """Maxima over the probe set; the priors never enter"""
    E_U, E_E, Gamma_max = 0.0, 0.0, 0.0
    for alpha in ensemble.amplitudes:
        ideal = target_output(target, alpha)
        actual = probe_gaussian(device, alpha)
        E_U = max(E_U, float(ideal.mode_energies().max()))
        E_E = max(E_E, float(actual.mode_energies().max()))
        Gamma_max = max(Gamma_max, float(gamma_second_moments(actual).max()))
    return {
        'm': target.modes,
        's_U': euler_decomposition(target.S.entries).s,
        'E_max_U': E_U,
        'E_max_E': E_E,
        'Gamma_max': Gamma_max,
    }


def amplifier_bound_inputs(g: float, device: DeviceModel, ensemble: ProbeEnsemble) -> Dict[str, float]:
    """S_max and r_max = max <nu_k^2> over observables and probes"""
    r_max = 0.0
    for alpha in ensemble.amplitudes:
        out = probe_gaussian(device, alpha)
        for obs in AMPLIFIER_OBSERVABLES:
            r_max = max(r_max, normal_moment(2 * obs.power, *quadrature_marginal(out, 0, obs.theta)))
    return {'S_max': amplifier_set_bound(ensemble, g), 'r_max': r_max}


def cubic_bound_inputs(gamma: float, device: DeviceModel, ensemble: ProbeEnsemble,
                       grid: Optional[GridConfig] = None) -> Dict[str, float]:
    """S'_max and q_max = max <mu_k^2> over observables and probes, from the grid"""
    q_max = 0.0
    for alpha in ensemble.amplitudes:
        psi = probe_cubic(device, alpha, grid)
        for obs in CUBIC_OBSERVABLES:
            q_max = max(q_max, grid_moment(psi, obs.theta, 2 * obs.power))
    return {'S_prime_max': cubic_set_bound(gamma, ensemble), 'q_max': q_max}
