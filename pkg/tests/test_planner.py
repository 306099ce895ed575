"""
Tests for the sample-complexity planner.
"""

import math

import numpy as np
import pytest

from src.errors import DomainError
from src.gaussian import identity_unitary, squeezer, vacuum
from src.models import DeviceKind, DeviceModel, ProbeEnsemble, Scenario
from src.planner import (
    BUDGET_LABEL, amplifier_bound_inputs, amplifier_set_bound, bound_frobenius,
    channel_bound_inputs, cubic_bound_inputs, cubic_set_bound, frobenius_bound_chain,
    plan_amplifier, plan_channel, plan_cubic, plan_state, state_bound_inputs, vacuum_q_max,
)
from src.symplectic import random_symplectic
from src.witnesses import build_dictionary


def test_bound_frobenius_values():
    """2^6 m^2 s^4 for a few squeezing vectors"""
    assert bound_frobenius([0.0]) == pytest.approx(64.0)
    assert bound_frobenius([0.0, 0.0]) == pytest.approx(256.0)
    assert bound_frobenius([0.5]) == pytest.approx(64.0 * math.e ** 2)


def test_frobenius_chain_is_ordered():
    """Each step of the chain dominates the previous one"""
    for xi in ([0.0], [0.3, 0.1], [1.0, 0.2, 0.0]):
        chain = frobenius_bound_chain(xi)
        assert chain['exact'] <= chain['cauchy_schwarz'] + 1e-9
        assert chain['cauchy_schwarz'] <= chain['max_squeezing'] + 1e-9
        assert chain['max_squeezing'] <= chain['bound'] + 1e-9


def test_frobenius_bound_holds_for_random_targets():
    """||V^-1||_F^2 <= 2^6 m^2 s^4 over 200 random pure targets"""
    rng = np.random.default_rng(2024)
    for _ in range(200):
        m = int(rng.integers(1, 5))
        xi = rng.uniform(0.0, 1.0, size=m)
        S = random_symplectic(m, 1.0, rng, xi=xi).entries
        V = 0.25 * S @ S.T
        frobenius = float(np.sum(np.linalg.inv(V) ** 2))
        assert frobenius == pytest.approx(frobenius_bound_chain(xi)["exact"], rel=1e-6)
        assert frobenius <= bound_frobenius(xi) * (1 + 1e-9)


def test_frobenius_chain_exact_matches_matrix():
    """The exact step equals ||V^-1||_F^2 of the squeezed vacuum"""
    xi = 0.4
    V = 0.25 * np.diag([np.exp(-2 * xi), np.exp(2 * xi)])
    assert frobenius_bound_chain([xi])['exact'] == pytest.approx(np.sum(np.linalg.inv(V) ** 2))


def test_frobenius_rejects_negative_squeezing():
    """Squeezing parameters are nonnegative"""
    with pytest.raises(DomainError):
        frobenius_bound_chain([-0.1])


def test_plan_state_example():
    """eps = 0.1, delta = 0.05, vacuum target displaced by |x_t|^2 = 1"""
    budget = plan_state(0.1, 0.05, 1, 1.0, 0.5, 3 / 16, 1.0)
    assert budget.batches == 9
    assert budget.N_chi == 9 * 108800
    assert budget.N_X == 9 * 40800
    assert budget.N_total == budget.N_chi + budget.N_X
    assert budget.label == BUDGET_LABEL
    assert budget.scenario is Scenario.GAUSSIAN_STATE


def test_plan_state_without_displacement():
    """x_t = 0 needs a single chi shot per batch"""
    budget = plan_state(0.1, 0.05, 1, 1.0, 0.5, 3 / 16, 0.0)
    assert budget.N_chi == budget.batches


def test_plan_state_rejects_bad_inputs():
    """Nonpositive epsilon or delta outside (0, 1) are domain errors"""
    with pytest.raises(DomainError):
        plan_state(0.0, 0.05, 1, 1.0, 0.5, 1.0, 0.0)
    with pytest.raises(DomainError):
        plan_state(0.1, 1.5, 1, 1.0, 0.5, 1.0, 0.0)
    with pytest.raises(DomainError):
        plan_state(0.1, 0.05, 1, 1.0, 0.5, 1.0, -1.0)


def test_plan_scales_inverse_square_in_epsilon():
    """Halving epsilon quadruples the per-batch sizes"""
    coarse = plan_channel(0.2, 0.05, 1, 1.0, 1.0, 1.0, 1.0)
    fine = plan_channel(0.1, 0.05, 1, 1.0, 1.0, 1.0, 1.0)
    assert fine.N_chi == 4 * coarse.N_chi
    assert fine.N_X == 4 * coarse.N_X


def test_plan_channel_grows_with_modes():
    """Channel budget grows as m^4"""
    one = plan_channel(0.5, 0.05, 1, 1.0, 1.0, 1.0, 1.0)
    two = plan_channel(0.5, 0.05, 2, 1.0, 1.0, 1.0, 1.0)
    assert two.N_X == 16 * one.N_X


def test_plan_amplifier_example():
    """S_max = 6, r_max = 1: 8 batches of 122400"""
    budget = plan_amplifier(0.1, 0.05, 6.0, 1.0)
    assert budget.batches == 8
    assert budget.N_total == 8 * 122400
    assert budget.variance_bounds == {'zeta': 36.0}


def test_amplifier_set_bound():
    """2(1 + g max|Re| + g max|Im|)"""
    assert amplifier_set_bound(ProbeEnsemble.uniform([1 + 1j])) == pytest.approx(6.0)
    assert amplifier_set_bound(ProbeEnsemble.uniform([0.0])) == pytest.approx(2.0)
    assert amplifier_set_bound(ProbeEnsemble.uniform([1 + 1j]), gain=2.0) == pytest.approx(10.0)


def test_amplifier_set_bound_dominates_coefficients():
    """sum |tau| never exceeds the set bound"""
    ens = ProbeEnsemble.uniform([1 + 1j, -0.5, 0.3j])
    bound = amplifier_set_bound(ens, gain=2.0)
    for alpha in ens.amplitudes:
        assert build_dictionary(Scenario.AMPLIFIER, alpha, 2.0).norm1 <= bound + 1e-12


def test_cubic_set_bound():
    """gamma = 0.1 on the vacuum probe gives 2.405343"""
    assert cubic_set_bound(0.1, ProbeEnsemble.uniform([0.0])) == pytest.approx(2.405343, abs=1e-6)


def test_cubic_set_bound_dominates_coefficients():
    """sum |kappa| never exceeds S'_max"""
    ens = ProbeEnsemble.uniform([0.5 - 0.4j, -1.0 + 0.2j])
    bound = cubic_set_bound(0.2, ens)
    for alpha in ens.amplitudes:
        assert build_dictionary(Scenario.CUBIC, alpha, 0.2).norm1 <= bound + 1e-12


def test_vacuum_q_max():
    """<q^8> on vacuum is 105/256"""
    assert vacuum_q_max() == pytest.approx(105 / 256)


def test_plan_cubic_uses_set_bound():
    """Cubic variance bound is S'_max^2 q_max"""
    ens = ProbeEnsemble.uniform([0.0])
    budget = plan_cubic(0.1, 0.05, 0.1, ens, vacuum_q_max())
    assert budget.S_prime_max == pytest.approx(2.405343, abs=1e-6)
    assert budget.variance_bounds['Z'] == pytest.approx(2.405343 ** 2 * 105 / 256, rel=1e-6)
    assert budget.m == 1


def test_state_bound_inputs_vacuum():
    """Vacuum target and preparation"""
    inputs = state_bound_inputs(vacuum(1), vacuum(1))
    assert inputs['m'] == 1
    assert inputs['s_t'] == pytest.approx(1.0)
    assert inputs['E_max_p'] == pytest.approx(0.5)
    assert inputs['Gamma_max'] == pytest.approx(27 / 32)
    assert inputs['x_t_norm_sq'] == 0.0


def test_channel_bound_inputs_squeezer():
    """s_U of a squeezer is exp(xi)"""
    target = squeezer(0.5)
    dev = DeviceModel(kind=DeviceKind.IDEAL_GAUSSIAN, target=target)
    inputs = channel_bound_inputs(target, dev, ProbeEnsemble.uniform([0.0, 1.0]))
    assert inputs['s_U'] == pytest.approx(np.exp(0.5))
    assert inputs['E_max_U'] == pytest.approx(inputs['E_max_E'])


def test_channel_bound_ignores_priors():
    """Maxima over the probe set do not depend on the priors"""
    target = identity_unitary(1)
    dev = DeviceModel(kind=DeviceKind.LOSSY_GAUSSIAN, target=target, eta=0.5)
    first = channel_bound_inputs(target, dev, ProbeEnsemble((0.0, 1.0), [0.9, 0.1]))
    second = channel_bound_inputs(target, dev, ProbeEnsemble((0.0, 1.0), [0.1, 0.9]))
    assert first == second


def test_amplifier_bound_inputs():
    """S_max = 10 and r_max = <q^4> of |2 + 2i>"""
    dev = DeviceModel(kind=DeviceKind.AMPLIFIER, gain=2.0)
    inputs = amplifier_bound_inputs(2.0, dev, ProbeEnsemble.uniform([1 + 1j]))
    assert inputs['S_max'] == pytest.approx(10.0)
    assert inputs['r_max'] == pytest.approx(22.1875)


def test_cubic_bound_inputs_vacuum():
    """Ideal gate on vacuum: q_max at least the vacuum <q^8>"""
    dev = DeviceModel(kind=DeviceKind.CUBIC_PHASE, gamma=0.1)
    inputs = cubic_bound_inputs(0.1, dev, ProbeEnsemble.uniform([0.0]))
    assert inputs['S_prime_max'] == pytest.approx(2.405343, abs=1e-6)
    assert inputs['q_max'] >= vacuum_q_max() - 1e-6
