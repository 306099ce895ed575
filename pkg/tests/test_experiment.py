"""
Tests for experiment config parsing and validation.
"""

from pathlib import Path

import numpy as np
import pytest

from src.errors import ConfigError, DomainError
from src.experiment import load_experiment, parse_amplitude, parse_complex, parse_ensemble, parse_unitary
from src.models import DeviceKind, Scenario, VarianceMode

CONFIG_DIR = Path(__file__).parent.parent / "configs"


def _channel_doc(**overrides):
    doc = {
        "scenario": "gaussian_channel",
        "seed": 1,
        "target": {"modes": 1, "gates": []},
        "device": {"kind": "lossy_gaussian", "eta": 0.64},
        "ensemble": {"amplitudes": [1.0]},
    }
    doc.update(overrides)
    return doc


def test_parse_complex_forms():
    """Numbers, strings and [re, im] pairs are accepted"""
    assert parse_complex(1.5) == 1.5 + 0j
    assert parse_complex("1+2j") == 1 + 2j
    assert parse_complex([0.5, -0.5]) == 0.5 - 0.5j
    with pytest.raises(ConfigError):
        parse_complex("abc")
    with pytest.raises(ConfigError):
        parse_complex(True)


def test_parse_amplitude_modes():
    """A pair is one mode; a list of pairs is one amplitude per mode"""
    assert parse_amplitude([1.0, 1.0]).shape == (1,)
    assert np.array_equal(parse_amplitude([[1.0, 0.0], [0.0, 1.0]]), np.array([1.0, 1j]))
    assert np.array_equal(parse_amplitude(["1j", "2"]), np.array([1j, 2.0]))


def test_parse_ensemble_default_is_vacuum():
    """Missing ensemble means the vacuum probe"""
    ens = parse_ensemble(None, 2)
    assert len(ens) == 1
    assert ens.modes == 2


def test_parse_ensemble_priors_must_sum_to_one():
    """Priors off by more than 1e-9 are rejected"""
    with pytest.raises(ConfigError):
        parse_ensemble({"amplitudes": [0.0, 1.0], "priors": [0.5, 0.6]})


def test_parse_ensemble_renormalizes_small_drift():
    """Priors within tolerance are renormalized"""
    ens = parse_ensemble({"amplitudes": [0.0, 1.0], "priors": [0.5, 0.5 + 1e-12]})
    assert ens.priors.sum() == pytest.approx(1.0, abs=1e-15)


def test_parse_unitary_gates():
    """Gate lists compose in order"""
    U = parse_unitary({"modes": 1, "gates": [{"type": "displacement", "alpha": 1.0},
                                             {"type": "squeezer", "xi": float(np.log(2.0))}]})
    assert U.d == pytest.approx([0.5, 0.0])


def test_parse_unitary_matrix_literal():
    """{S, d} literals are validated as symplectic"""
    U = parse_unitary({"S": [[2.0, 0.0], [0.0, 0.5]], "d": [0.1, 0.0]})
    assert U.modes == 1
    with pytest.raises(DomainError):
        parse_unitary({"S": [[2.0, 0.0], [0.0, 2.0]]})


def test_gate_outside_modes_rejected():
    """A squeezer on mode 1 of a one-mode target is a config error"""
    with pytest.raises(ConfigError):
        parse_unitary({"modes": 1, "gates": [{"type": "squeezer", "xi": 0.1, "mode": 1}]})


def test_unknown_gate_rejected():
    """Unknown gate types are config errors"""
    with pytest.raises(ConfigError):
        parse_unitary({"modes": 1, "gates": [{"type": "kerr"}]})


def test_load_channel_experiment():
    """Channel document builds device, target and ensemble"""
    cfg = load_experiment(_channel_doc())
    assert cfg.scenario is Scenario.GAUSSIAN_CHANNEL
    assert cfg.device.kind is DeviceKind.LOSSY_GAUSSIAN
    assert cfg.device.target is cfg.target
    assert cfg.epsilon == 0.05
    assert cfg.delta == 0.05


def test_seed_is_mandatory():
    """Experiments without a seed are rejected"""
    doc = _channel_doc()
    del doc["seed"]
    with pytest.raises(ConfigError):
        load_experiment(doc)


def test_unknown_scenario_rejected():
    """Unknown scenarios are config errors"""
    with pytest.raises(ConfigError):
        load_experiment(_channel_doc(scenario="teleportation"))


def test_delta_range_checked():
    """delta must lie in (0, 1)"""
    with pytest.raises(ConfigError):
        load_experiment(_channel_doc(delta=1.0))


def test_probe_mode_mismatch_rejected():
    """Two-mode probes against a one-mode target are rejected"""
    with pytest.raises(ConfigError):
        load_experiment(_channel_doc(ensemble={"amplitudes": [[[0, 0], [0, 0]]]}))


def test_device_kind_must_fit_scenario():
    """Cubic devices cannot run the channel scenario"""
    with pytest.raises(ConfigError):
        load_experiment(_channel_doc(device={"kind": "cubic_phase", "gamma": 0.1}))


def test_state_scenario_takes_single_amplitude():
    """gaussian_state rejects probe ensembles"""
    with pytest.raises(ConfigError):
        load_experiment(_channel_doc(scenario="gaussian_state",
                                     ensemble={"amplitudes": [0.0, 1.0]}))


def test_amplifier_needs_gain_above_one():
    """Amplifier scenarios need g > 1"""
    doc = {"scenario": "amplifier", "seed": 1, "gain": 1.0, "device": {"kind": "lossy_gaussian",
           "eta": 0.5}, "target": {"modes": 1, "gates": []}}
    with pytest.raises(ConfigError):
        load_experiment(doc)


def test_cubic_needs_gamma():
    """Cubic scenarios need gamma"""
    with pytest.raises(ConfigError):
        load_experiment({"scenario": "cubic", "seed": 1, "device": {"kind": "cubic_phase"}})


def test_device_errors_become_config_errors():
    """Invalid device parameters surface as config errors"""
    with pytest.raises(ConfigError):
        load_experiment(_channel_doc(device={"kind": "lossy_gaussian", "eta": 1.5}))


def test_with_overrides():
    """CLI overrides replace seed, output and threads"""
    cfg = load_experiment(_channel_doc()).with_overrides(seed=99, output_dir="out", threads=4)
    assert cfg.seed == 99
    assert cfg.output_dir == "out"
    assert cfg.threads == 4
    assert cfg.to_dict()["seed"] == 99
    assert "threads" not in cfg.to_dict()


def test_grid_and_fock_overrides():
    """Per-experiment grid and fock sections override config.yaml"""
    cfg = load_experiment({"scenario": "cubic", "seed": 1, "gamma": 0.1,
                           "device": {"kind": "cubic_phase"},
                           "grid": {"n_grid": 2048}, "fock": {"cutoff": 40}})
    assert cfg.grid.n_grid == 2048
    assert cfg.fock.cutoff == 40
    assert cfg.device.gamma == 0.1


def test_shipped_configs_load():
    """Every bundled experiment config is valid"""
    paths = sorted(CONFIG_DIR.glob("*.json"))
    assert paths
    for path in paths:
        cfg = load_experiment(path)
        assert cfg.variance_mode in (VarianceMode.PILOT, VarianceMode.THEOREM)


def test_missing_file_is_config_error(tmp_path):
    """Unreadable and malformed files raise ConfigError"""
    with pytest.raises(ConfigError):
        load_experiment(tmp_path / "missing.json")
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ConfigError):
        load_experiment(bad)
