"""
Tests for closed-form witnesses, observable dictionaries and exact oracles.
"""

import numpy as np
import pytest

from src.errors import DimensionError, DomainError
from src.gaussian import (
    coherent_state, displacement, identity_unitary, squeezed_vacuum, squeezer, thermal_state, vacuum,
)
from src.models import DeviceKind, DeviceModel, GaussianState, ProbeEnsemble, Scenario
from src.symplectic import random_symplectic
from src.witnesses import (
    amplifier_fidelity, average_channel_fidelity, build_dictionary, cubic_fidelity,
    cubic_operator_witness, dictionary_expectation, exact_amplifier_witness, exact_channel_witness,
    exact_cubic_witness, exact_state_witness, grid_cubic_term, exact_cubic_term, state_fidelity,
    witness_amplifier, witness_gaussian_state,
)


def test_state_witness_closed_form():
    """W = 1 + m/2 - (t1 - 2 t2 + t3)/4"""
    w = witness_gaussian_state(vacuum(1), 3.2, 0.0, 0.0)
    assert w.value == pytest.approx(0.7)
    assert w.scenario is Scenario.GAUSSIAN_STATE


def test_state_witness_thermal():
    """Thermal nbar = 0.3 against vacuum: W = 0.7, F = 1/1.3"""
    assert exact_state_witness(vacuum(1), thermal_state(1, 0.3)).value == pytest.approx(0.7)
    assert state_fidelity(vacuum(1), thermal_state(1, 0.3)) == pytest.approx(1 / 1.3)


def test_state_witness_displacement_error():
    """Target |0.5>, prepared vacuum: W = 0.75, F = exp(-0.25)"""
    target = coherent_state(0.5)
    assert exact_state_witness(target, vacuum(1)).value == pytest.approx(0.75)
    assert state_fidelity(target, vacuum(1)) == pytest.approx(np.exp(-0.25))


def test_state_witness_perfect_preparation():
    """Preparing the target exactly gives W = 1"""
    target = squeezed_vacuum(0.6, 0.2)
    assert exact_state_witness(target, target).value == pytest.approx(1.0)


def test_state_witness_is_lower_bound():
    """W never exceeds the fidelity"""
    target = squeezed_vacuum(0.4)
    for prep in [thermal_state(1, 0.2), coherent_state(0.3 + 0.1j), squeezed_vacuum(0.2, 0.5)]:
        assert exact_state_witness(target, prep).value <= state_fidelity(target, prep) + 1e-12


def _random_pure_state(m, rng):
    S = random_symplectic(m, 1.0, rng).entries
    V = 0.25 * S @ S.T
    return GaussianState(x=rng.normal(0.0, 0.5, size=2 * m), V=(V + V.T) / 2)


def test_state_witness_sound_for_random_gaussian_devices():
    """W <= F over 200 random targets, W = 1 only for the target itself"""
    rng = np.random.default_rng(11)
    for _ in range(200):
        m = int(rng.integers(1, 5))
        target = _random_pure_state(m, rng)
        assert exact_state_witness(target, target).value == pytest.approx(1.0, abs=1e-9)

        if rng.random() < 0.5:
            base = _random_pure_state(m, rng)
        else:
            kick = random_symplectic(m, 0.1, rng).entries
            moved = kick @ target.V @ kick.T
            base = GaussianState(x=target.x + rng.normal(0.0, 0.1, size=2 * m), V=(moved + moved.T) / 2)
        noise = np.diag(rng.uniform(0.01, 0.3, size=2 * m))
        prep = GaussianState(x=base.x, V=base.V + noise)

        w = exact_state_witness(target, prep).value
        f = state_fidelity(target, prep)
        assert w <= f + 1e-9
        assert w < 1.0 - 1e-9


def test_channel_witness_loss():
    """Identity target, loss 0.64, probe |1>: W = 0.96"""
    dev = DeviceModel(kind=DeviceKind.LOSSY_GAUSSIAN, target=identity_unitary(1), eta=0.64)
    ens = ProbeEnsemble.uniform([1.0])
    w = exact_channel_witness(identity_unitary(1), dev, ens)
    assert w.value == pytest.approx(0.96)
    assert w.components['X_c'] == pytest.approx(4.56)
    assert w.components['chi_c'] == pytest.approx(3.2)
    assert average_channel_fidelity(identity_unitary(1), dev, ens) == pytest.approx(np.exp(-0.04))


def test_channel_witness_ideal_device():
    """Ideal device reaches W = 1 for every ensemble"""
    target = squeezer(0.5)
    dev = DeviceModel(kind=DeviceKind.IDEAL_GAUSSIAN, target=target)
    ens = ProbeEnsemble.uniform([0.0, 1.0, 1j, -0.5 + 0.5j])
    assert exact_channel_witness(target, dev, ens).value == pytest.approx(1.0)


def test_channel_witness_miscalibrated_is_lower_bound():
    """Miscalibrated displacement: W <= average fidelity"""
    target = identity_unitary(1)
    dev = DeviceModel(kind=DeviceKind.MISCALIBRATED_GAUSSIAN, target=target, actual=displacement(0.3))
    ens = ProbeEnsemble.uniform([0.0, 0.5])
    w = exact_channel_witness(target, dev, ens).value
    assert w <= average_channel_fidelity(target, dev, ens) + 1e-12
    assert w == pytest.approx(1.0 - 0.09)


def test_channel_witness_is_linear_in_priors():
    """Probes {0, 1} with equal priors average the single-probe witnesses to 0.98"""
    target = identity_unitary(1)
    dev = DeviceModel(kind=DeviceKind.LOSSY_GAUSSIAN, target=target, eta=0.64)
    mixed = exact_channel_witness(target, dev, ProbeEnsemble((0.0, 1.0), [0.5, 0.5])).value
    singles = [exact_channel_witness(target, dev, ProbeEnsemble.uniform([a])).value for a in (0.0, 1.0)]
    assert mixed == pytest.approx(0.98)
    assert mixed == pytest.approx(0.5 * singles[0] + 0.5 * singles[1])


def test_cubic_witness_is_linear_in_priors():
    """Priors (0.3, 0.7) weight the single-probe cubic witnesses"""
    dev = DeviceModel(kind=DeviceKind.CUBIC_PHASE, gamma=0.08, pre_squeezing=0.1)
    amplitudes = (0.0, 0.3 - 0.2j)
    mixed = exact_cubic_witness(0.1, dev, ProbeEnsemble(amplitudes, [0.3, 0.7]), cutoff=40).value
    singles = [exact_cubic_witness(0.1, dev, ProbeEnsemble.uniform([a]), cutoff=40).value
               for a in amplitudes]
    assert mixed == pytest.approx(0.3 * singles[0] + 0.7 * singles[1], abs=1e-6)


def test_amplifier_witness_noisy():
    """g = 2, n_add = 0.5, probe 1 + i: W = 0.5"""
    dev = DeviceModel(kind=DeviceKind.AMPLIFIER, gain=2.0, n_add=0.5)
    ens = ProbeEnsemble.uniform([1 + 1j])
    w = exact_amplifier_witness(2.0, dev, ens)
    assert w.value == pytest.approx(0.5)
    assert w.components['zeta'] == pytest.approx(-7.0)
    assert amplifier_fidelity(2.0, dev, ens) == pytest.approx(2 / 3)


def test_amplifier_witness_ideal():
    """Noiseless amplifier reaches W = 1"""
    dev = DeviceModel(kind=DeviceKind.AMPLIFIER, gain=2.0)
    ens = ProbeEnsemble.uniform([1 + 1j, -0.5])
    assert exact_amplifier_witness(2.0, dev, ens).value == pytest.approx(1.0)


def test_amplifier_witness_rejects_low_gain():
    """g <= 1 is outside the amplifier witness domain"""
    with pytest.raises(DomainError):
        witness_amplifier(1.0, ProbeEnsemble.uniform([0.0]), 0.0)


def test_amplifier_witness_rejects_multimode_amplitudes():
    """Amplifier witness is single-mode"""
    with pytest.raises(DimensionError):
        witness_amplifier(2.0, ProbeEnsemble.uniform([[0.0, 0.0]]), 0.0)


def test_amplifier_dictionary():
    """tau = {1, 1, -2g Re a, -2g Im a}"""
    d = build_dictionary(Scenario.AMPLIFIER, 1 + 1j, 2.0)
    assert d.coefficients == pytest.approx([1.0, 1.0, -4.0, -4.0])
    assert d.norm1 == pytest.approx(10.0)
    assert d.probabilities().sum() == pytest.approx(1.0)


def test_cubic_dictionary():
    """kappa at gamma = 0.1, alpha = 0 has one-norm 2.405343"""
    d = build_dictionary(Scenario.CUBIC, 0.0, 0.1)
    assert d.coefficients == pytest.approx(
        [0.0225, -np.sqrt(2) * 0.1, np.sqrt(2) * 0.1, 0.1, 1.0, 1.0, 0.0, 0.0])
    assert d.norm1 == pytest.approx(2.405343, abs=1e-6)
    assert [(o.theta, o.power) for o in d.observables][:4] == [
        (0.0, 4), (np.pi / 4, 3), (-np.pi / 4, 3), (np.pi / 2, 3)]


def test_dictionary_expectation_gaussian():
    """Amplifier dictionary on the ideal output gives -g^2 |a|^2 + 1/2"""
    d = build_dictionary(Scenario.AMPLIFIER, 1 + 1j, 2.0)
    assert dictionary_expectation(d, coherent_state(2 + 2j)) == pytest.approx(-7.5)


def test_cubic_witness_ideal_gate():
    """Ideal cubic-phase gate gives E(Z) = 1/2 and W = 1"""
    dev = DeviceModel(kind=DeviceKind.CUBIC_PHASE, gamma=0.1)
    ens = ProbeEnsemble.uniform([0.0])
    w = exact_cubic_witness(0.1, dev, ens, cutoff=40)
    assert w.components['Z'] == pytest.approx(0.5, abs=1e-6)
    assert w.value == pytest.approx(1.0, abs=1e-6)


def test_cubic_witness_gamma_mismatch():
    """Device gamma 0 against target 0.1: W = 1 - 27 gamma^2 / 64"""
    dev = DeviceModel(kind=DeviceKind.CUBIC_PHASE, gamma=0.0)
    ens = ProbeEnsemble.uniform([0.0])
    assert exact_cubic_witness(0.1, dev, ens, cutoff=40).value == pytest.approx(0.99578125, abs=1e-6)


@pytest.mark.parametrize("alpha, gamma", [
    (0.3 + 0.2j, 0.1),
    (-0.4 + 0.25j, 0.05),
    (0.25 - 0.35j, 0.12),
    (-0.2 - 0.3j, 0.08),
])
def test_cubic_operator_form_matches_dictionary(alpha, gamma):
    """Operator witness equals 3/2 - |alpha|^2 - E(Z)"""
    dev = DeviceModel(kind=DeviceKind.CUBIC_PHASE, gamma=0.8 * gamma, pre_squeezing=0.1)
    ens = ProbeEnsemble.uniform([alpha])
    dictionary_value = exact_cubic_witness(gamma, dev, ens, cutoff=40).value
    assert cubic_operator_witness(gamma, dev, ens, cutoff=40) == pytest.approx(dictionary_value, abs=1e-6)



def test_cubic_witness_is_lower_bound():
    """Imperfect cubic-phase gate: W <= F"""
    dev = DeviceModel(kind=DeviceKind.CUBIC_PHASE, gamma=0.1, pre_displacement=0.1)
    ens = ProbeEnsemble.uniform([0.0])
    w = exact_cubic_witness(0.1, dev, ens, cutoff=40).value
    assert w <= cubic_fidelity(0.1, dev, ens, cutoff=40) + 1e-6


def test_grid_cubic_term_matches_fock():
    """Grid and Fock evaluations of E(Z) agree"""
    dev = DeviceModel(kind=DeviceKind.CUBIC_PHASE, gamma=0.1)
    ens = ProbeEnsemble.uniform([0.5])
    fock = exact_cubic_term(0.1, dev, ens, cutoff=40)
    assert grid_cubic_term(0.1, dev, ens) == pytest.approx(fock, abs=1e-4)
