"""
Tests for config.yaml loading.
"""

import pytest

from src.config import Config, get_config, reset_config
from src.errors import ConfigError


def _write(tmp_path, text):
    path = tmp_path / "config.yaml"
    path.write_text(text)
    return path


VALID = """
numerics: {symplectic_tol: 1.0e-9, purity_tol: 1.0e-6, physicality_tol: 1.0e-9, symmetry_tol: 1.0e-12}
grid: {n_grid: 1024, q_min: -10.0, q_max: 10.0, tail_tol: 1.0e-8, boundary_tol: 1.0e-6, boundary_fraction: 0.02}
fock: {cutoff: 40, convergence_tol: 1.0e-6, max_doublings: 2}
estimation: {variance_mode: theorem, pilot_size: 100, pilot_safety_factor: 2.0, batch_constant: 34, chunk_size: 1024}
run: {threads: 2, output_dir: out}
"""


def test_default_config_loads():
    """The shipped config.yaml is valid"""
    reset_config()
    config = get_config()
    assert config.estimation.batch_constant == 34
    assert config.grid.n_grid & (config.grid.n_grid - 1) == 0
    assert get_config() is config


def test_custom_config(tmp_path):
    """Values are read from the given file"""
    config = Config(_write(tmp_path, VALID))
    assert config.grid.n_grid == 1024
    assert config.grid.dq == pytest.approx(20.0 / 1024)
    assert config.estimation.variance_mode == "theorem"
    assert config.run.threads == 2


def test_missing_section(tmp_path):
    """A missing section is a config error"""
    text = VALID.replace("run: {threads: 2, output_dir: out}", "")
    with pytest.raises(ConfigError):
        Config(_write(tmp_path, text))


def test_grid_size_must_be_power_of_two(tmp_path):
    """n_grid = 1000 is rejected"""
    with pytest.raises(ConfigError):
        Config(_write(tmp_path, VALID.replace("n_grid: 1024", "n_grid: 1000")))


def test_unknown_variance_mode(tmp_path):
    """variance_mode must be pilot or theorem"""
    with pytest.raises(ConfigError):
        Config(_write(tmp_path, VALID.replace("variance_mode: theorem", "variance_mode: guess")))


def test_unknown_key(tmp_path):
    """Unexpected keys in a section are config errors"""
    with pytest.raises(ConfigError):
        Config(_write(tmp_path, VALID.replace("max_doublings: 2", "max_doublings: 2, extra: 1")))


def test_missing_file(tmp_path):
    """Unreadable config files raise ConfigError"""
    with pytest.raises(ConfigError):
        Config(tmp_path / "nope.yaml")


def test_config_from_environment(tmp_path, monkeypatch):
    """CVWITNESS_CONFIG points get_config at another file"""
    monkeypatch.setenv("CVWITNESS_CONFIG", str(_write(tmp_path, VALID)))
    reset_config()
    try:
        assert get_config().fock.cutoff == 40
    finally:
        reset_config()


def test_grid_overrides():
    """with_grid merges overrides and validates them"""
    reset_config()
    config = get_config()
    assert config.with_grid({"n_grid": 512}).n_grid == 512
    assert config.with_grid(None).n_grid == config.grid.n_grid
    with pytest.raises(ConfigError):
        config.with_grid({"n_grid": 500})
    with pytest.raises(ConfigError):
        config.with_fock({"unknown": 1})
