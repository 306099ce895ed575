"""
Witness evaluators.

Closed-form witnesses for the four scenarios (Gaussian state, Gaussian
channel, coherent-state amplifier, cubic-phase gate), the homodyne-accessible
observable dictionaries, and exact oracle evaluations against simulated
devices. Witness values are never clamped.
"""

import logging
from typing import Optional, Tuple

import numpy as np

from .channels import probe_cubic, probe_cubic_fock, probe_gaussian, target_output
from .config import GridConfig, get_config
from .errors import ConvergenceError, DimensionError, DomainError
from .gaussian import (
    coherent_state, exact_overlap_traces, normal_moment, overlap_pure, quadrature_marginal,
)
from .models import (
    DeviceModel, GaussianState, GaussianUnitary, ObservableDictionary, ProbeEnsemble,
    QuadratureMonomial, Scenario, WitnessValue,
)
from .wavefn import (
    FockOperatorSet, converged_expectation, fock_cubic_state, fock_overlap, grid_moment,
)

logger = logging.getLogger(__name__)

SQRT2 = np.sqrt(2.0)

AMPLIFIER_OBSERVABLES = (
    QuadratureMonomial(0.0, 2),
    QuadratureMonomial(np.pi / 2, 2),
    QuadratureMonomial(0.0, 1),
    QuadratureMonomial(np.pi / 2, 1),
)

CUBIC_OBSERVABLES = (
    QuadratureMonomial(0.0, 4),
    QuadratureMonomial(np.pi / 4, 3),
    QuadratureMonomial(-np.pi / 4, 3),
    QuadratureMonomial(np.pi / 2, 3),
    QuadratureMonomial(0.0, 2),
    QuadratureMonomial(np.pi / 2, 2),
    QuadratureMonomial(0.0, 1),
    QuadratureMonomial(np.pi / 2, 1),
)


def _single_mode(ensemble: ProbeEnsemble, scenario: str):
    if ensemble.modes != 1:
        raise DimensionError(f"{scenario} witness is defined for single-mode probes")


# Closed forms

def witness_gaussian_state(target: GaussianState, t1: float, t2: float, t3: float) -> WitnessValue:
    """1 + m/2 - (t1 - 2 t2 + t3)/4"""
    value = 1.0 + target.modes / 2 - 0.25 * (t1 - 2 * t2 + t3)
    return WitnessValue(value=float(value), scenario=Scenario.GAUSSIAN_STATE,
                        components={'t1': t1, 't2': t2, 't3': t3})


def channel_known_term(target: GaussianUnitary, ensemble: ProbeEnsemble) -> float:
    """Sum over probes of P(alpha) Tr[V_U^-1 x_U x_U^T]"""
    total = 0.0
    for alpha, prior in zip(ensemble.amplitudes, ensemble.priors):
        out = target_output(target, alpha)
        total += prior * float(out.x @ np.linalg.solve(out.V, out.x))
    return total


def witness_gaussian_channel(target: GaussianUnitary, ensemble: ProbeEnsemble,
                             x_c: float, chi_c: float) -> WitnessValue:
    """
    Average-fidelity witness from E(X_c) and E(chi_c).

    The first-moment term of the target outputs is known and computed exactly.
    """
    known = channel_known_term(target, ensemble)
    value = 1.0 + target.modes / 2 - 0.25 * x_c - 0.25 * known + 0.5 * chi_c
    return WitnessValue(value=float(value), scenario=Scenario.GAUSSIAN_CHANNEL,
                        components={'X_c': x_c, 'chi_c': chi_c, 'target_first_moments': known})


def witness_amplifier(g: float, ensemble: ProbeEnsemble, zeta: float) -> WitnessValue:
    """3/2 - g^2 sum P |alpha|^2 - E(zeta)"""
    if g <= 1.0:
        raise DomainError(f"amplifier gain must exceed 1, got {g}")
    _single_mode(ensemble, "amplifier")
    value = 1.5 - g * g * ensemble.mean_photon_number() - zeta
    return WitnessValue(value=float(value), scenario=Scenario.AMPLIFIER, components={'zeta': zeta})


def witness_cubic(gamma: float, ensemble: ProbeEnsemble, z: float) -> WitnessValue:
    """3/2 - sum P |alpha|^2 - E(Z)"""
    _single_mode(ensemble, "cubic-phase")
    value = 1.5 - ensemble.mean_photon_number() - z
    return WitnessValue(value=float(value), scenario=Scenario.CUBIC,
                        components={'Z': z, 'gamma': gamma})


def build_dictionary(scenario: Scenario, alpha: complex, g_or_gamma: float) -> ObservableDictionary:
    """
    Observables and coefficients for the single-shot witness estimators.

    Amplifier: {q^2, p^2, q, p} with tau = {1, 1, -2g Re a, -2g Im a}.
    Cubic: {q^4, q_{pi/4}^3, q_{-pi/4}^3, p^3, q^2, p^2, q, p} with
    kappa = {9g^2/4, -sqrt2 g, sqrt2 g, g, 1 + 3g Im a, 1, -2 Re a, -2 Im a},
    which expands (q - Re a)^2 + (p - 3g q^2/2 - Im a)^2 - |a|^2.
    """
    scenario = Scenario(scenario)
    alpha = complex(np.ravel(alpha)[0]) if np.ndim(alpha) else complex(alpha)
    re, im = alpha.real, alpha.imag
    if scenario is Scenario.AMPLIFIER:
        g = g_or_gamma
        return ObservableDictionary(AMPLIFIER_OBSERVABLES, np.array([1.0, 1.0, -2 * g * re, -2 * g * im]))
    if scenario is Scenario.CUBIC:
        gamma = g_or_gamma
        kappa = np.array([
            9 * gamma ** 2 / 4,
            -SQRT2 * gamma,
            SQRT2 * gamma,
            gamma,
            1 + 3 * gamma * im,
            1.0,
            -2 * re,
            -2 * im,
        ])
        return ObservableDictionary(CUBIC_OBSERVABLES, kappa)
    raise DomainError(f"no observable dictionary for scenario {scenario.value}")


def dictionary_expectation(dictionary: ObservableDictionary, state: GaussianState) -> float:
    """Sum_k c_k <mu_k> for a single-mode Gaussian state"""
    total = 0.0
    for obs, coef in zip(dictionary.observables, dictionary.coefficients):
        mean, var = quadrature_marginal(state, 0, obs.theta)
        total += coef * normal_moment(obs.power, mean, var)
    return float(total)


def dictionary_operator(opset: FockOperatorSet, dictionary: ObservableDictionary) -> np.ndarray:
    """Sum_k c_k mu_k as a truncated matrix"""
    out = np.zeros((opset.cutoff, opset.cutoff), dtype=complex)
    for obs, coef in zip(dictionary.observables, dictionary.coefficients):
        if coef:
            out += coef * np.linalg.matrix_power(opset.quadrature(obs.theta), obs.power)
    return out


def cubic_witness_operator(opset: FockOperatorSet, alpha: complex, gamma: float) -> np.ndarray:
    """3/2 - (q - Re a)^2 - (p - 3 gamma q^2 / 2 - Im a)^2"""
    shifted_q = opset.q - alpha.real * opset.identity
    shifted_p = opset.p - 1.5 * gamma * opset.q @ opset.q - alpha.imag * opset.identity
    return 1.5 * opset.identity - shifted_q @ shifted_q - shifted_p @ shifted_p


# Exact oracles

def exact_state_witness(target: GaussianState, prep: GaussianState) -> WitnessValue:
    return witness_gaussian_state(target, *exact_overlap_traces(target, prep))


def state_fidelity(target: GaussianState, prep: GaussianState) -> float:
    return overlap_pure(target, prep)


def exact_channel_terms(target: GaussianUnitary, device: DeviceModel,
                        ensemble: ProbeEnsemble) -> Tuple[float, float]:
    """Exact (E(X_c), E(chi_c)) averaged over the ensemble"""
    x_c, chi_c = 0.0, 0.0
    for alpha, prior in zip(ensemble.amplitudes, ensemble.priors):
        t1, t2, _ = exact_overlap_traces(target_output(target, alpha), probe_gaussian(device, alpha))
        x_c += prior * t1
        chi_c += prior * t2
    return x_c, chi_c


def exact_channel_witness(target: GaussianUnitary, device: DeviceModel,
                          ensemble: ProbeEnsemble) -> WitnessValue:
    return witness_gaussian_channel(target, ensemble, *exact_channel_terms(target, device, ensemble))


def average_channel_fidelity(target: GaussianUnitary, device: DeviceModel,
                             ensemble: ProbeEnsemble) -> float:
    return float(sum(
        prior * overlap_pure(target_output(target, alpha), probe_gaussian(device, alpha))
        for alpha, prior in zip(ensemble.amplitudes, ensemble.priors)
    ))


def exact_amplifier_term(g: float, device: DeviceModel, ensemble: ProbeEnsemble) -> float:
    """Exact E(zeta) = sum P(alpha) sum_k tau_k <nu_k>"""
    _single_mode(ensemble, "amplifier")
    return float(sum(
        prior * dictionary_expectation(build_dictionary(Scenario.AMPLIFIER, alpha, g),
                                       probe_gaussian(device, alpha))
        for alpha, prior in zip(ensemble.amplitudes, ensemble.priors)
    ))


def exact_amplifier_witness(g: float, device: DeviceModel, ensemble: ProbeEnsemble) -> WitnessValue:
    return witness_amplifier(g, ensemble, exact_amplifier_term(g, device, ensemble))


def amplifier_fidelity(g: float, device: DeviceModel, ensemble: ProbeEnsemble) -> float:
    """Average overlap with the ideal outputs |g alpha>"""
    return float(sum(
        prior * overlap_pure(coherent_state(g * alpha), probe_gaussian(device, alpha))
        for alpha, prior in zip(ensemble.amplitudes, ensemble.priors)
    ))


def exact_cubic_term(gamma: float, device: DeviceModel, ensemble: ProbeEnsemble,
                     cutoff: Optional[int] = None) -> float:
    """E(Z) from cutoff-converged Fock expectations"""
    _single_mode(ensemble, "cubic-phase")
    total = 0.0
    for alpha, prior in zip(ensemble.amplitudes, ensemble.priors):
        dictionary = build_dictionary(Scenario.CUBIC, alpha, gamma)
        total += prior * converged_expectation(
            lambda c, a=alpha: probe_cubic_fock(device, a, c),
            lambda ops, d=dictionary: dictionary_operator(ops, d),
            cutoff,
        )
    return float(total)


def exact_cubic_witness(gamma: float, device: DeviceModel, ensemble: ProbeEnsemble,
                        cutoff: Optional[int] = None) -> WitnessValue:
    return witness_cubic(gamma, ensemble, exact_cubic_term(gamma, device, ensemble, cutoff))


def cubic_operator_witness(gamma: float, device: DeviceModel, ensemble: ProbeEnsemble,
                           cutoff: Optional[int] = None) -> float:
    """Prior-weighted <W_gamma> from the operator form"""
    total = 0.0
    for alpha, prior in zip(ensemble.amplitudes, ensemble.priors):
        a = complex(alpha[0])
        total += prior * converged_expectation(
            lambda c, a=a: probe_cubic_fock(device, a, c),
            lambda ops, a=a: cubic_witness_operator(ops, a, gamma),
            cutoff,
        )
    return float(total)


def cubic_fidelity(gamma: float, device: DeviceModel, ensemble: ProbeEnsemble,
                   cutoff: Optional[int] = None) -> float:
    """Average |<U(gamma) alpha | device output>|^2, checked under cutoff doubling"""
    fock_cfg = get_config().fock
    cutoff = cutoff or fock_cfg.cutoff
    total = 0.0
    for alpha, prior in zip(ensemble.amplitudes, ensemble.priors):
        a = complex(alpha[0])
        low = fock_overlap(fock_cubic_state(a, gamma, cutoff), probe_cubic_fock(device, a, cutoff))
        high = fock_overlap(fock_cubic_state(a, gamma, 2 * cutoff), probe_cubic_fock(device, a, 2 * cutoff))
        if abs(high - low) > fock_cfg.convergence_tol:
            raise ConvergenceError(f"cubic fidelity not stable at cutoff {cutoff}")
        total += prior * high
    return float(total)


def grid_cubic_term(gamma: float, device: DeviceModel, ensemble: ProbeEnsemble,
                    grid: Optional[GridConfig] = None) -> float:
    """E(Z) from grid moments of the device outputs"""
    total = 0.0
    for alpha, prior in zip(ensemble.amplitudes, ensemble.priors):
        psi = probe_cubic(device, alpha, grid)
        dictionary = build_dictionary(Scenario.CUBIC, alpha, gamma)
        total += prior * sum(coef * grid_moment(psi, obs.theta, obs.power)
                             for obs, coef in zip(dictionary.observables, dictionary.coefficients)
                             if coef)
    return float(total)
