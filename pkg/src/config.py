"""
Configuration management for the toolkit.
Loads and validates config.yaml (numeric defaults shared by every module).
"""

import logging
import os
import yaml
from pathlib import Path
from typing import Dict, Any, Optional
from dataclasses import dataclass

from dotenv import load_dotenv

from .errors import ConfigError


# Vacuum covariance is VACUUM_VARIANCE * identity ([q, p] = i/2).
VACUUM_VARIANCE = 0.25

CONFIG_ENV_VAR = "CVWITNESS_CONFIG"


@dataclass
class NumericsConfig:
    """Tolerances for matrix validation"""
    symplectic_tol: float
    purity_tol: float
    physicality_tol: float
    symmetry_tol: float


@dataclass
class GridConfig:
    """Position-grid settings for single-mode wavefunctions"""
    n_grid: int
    q_min: float
    q_max: float
    tail_tol: float
    boundary_tol: float
    boundary_fraction: float

    @property
    def dq(self) -> float:
        return (self.q_max - self.q_min) / self.n_grid


@dataclass
class FockConfig:
    """Truncated Fock-space oracle settings"""
    cutoff: int
    convergence_tol: float
    max_doublings: int


@dataclass
class EstimationConfig:
    """Median-of-means and variance-proxy settings"""
    variance_mode: str
    pilot_size: int
    pilot_safety_factor: float
    batch_constant: float
    chunk_size: int


@dataclass
class RunConfig:
    """Execution settings"""
    threads: int
    output_dir: str


def _section(raw: Dict[str, Any], name: str) -> Dict[str, Any]:
    section = raw.get(name)
    if not isinstance(section, dict):
        raise ConfigError(f"config.yaml is missing the '{name}' section")
    return section


class Config:
    """Main configuration class"""

    def __init__(self, config_path: Optional[Path] = None):
        if config_path is None:
            load_dotenv()
            env_path = os.environ.get(CONFIG_ENV_VAR)
            config_path = Path(env_path) if env_path else Path(__file__).parent.parent / "config.yaml"

        try:
            with open(config_path, 'r') as f:
                self._raw = yaml.safe_load(f) or {}
        except OSError as exc:
            raise ConfigError(f"cannot read config file {config_path}: {exc}") from exc

        try:
            self.numerics = NumericsConfig(**_section(self._raw, 'numerics'))
            self.grid = GridConfig(**_section(self._raw, 'grid'))
            self.fock = FockConfig(**_section(self._raw, 'fock'))
            self.estimation = EstimationConfig(**_section(self._raw, 'estimation'))
            self.run = RunConfig(**_section(self._raw, 'run'))
        except TypeError as exc:
            raise ConfigError(f"malformed config.yaml: {exc}") from exc

        self.logging = self._raw.get('logging', {})
        self._validate()

    def _validate(self):
        n = self.grid.n_grid
        if n < 2 or n & (n - 1):
            raise ConfigError(f"grid.n_grid must be a power of two, got {n}")
        if self.grid.q_max <= self.grid.q_min:
            raise ConfigError("grid.q_max must exceed grid.q_min")
        if self.fock.cutoff < 4:
            raise ConfigError("fock.cutoff must be at least 4")
        if self.estimation.variance_mode not in ('pilot', 'theorem'):
            raise ConfigError(
                f"estimation.variance_mode must be 'pilot' or 'theorem', "
                f"got {self.estimation.variance_mode!r}"
            )
        if self.estimation.pilot_size < 2:
            raise ConfigError("estimation.pilot_size must be at least 2")
        if self.run.threads < 1:
            raise ConfigError("run.threads must be at least 1")

    def with_grid(self, overrides: Dict[str, Any]) -> GridConfig:
        """Grid settings with per-experiment overrides applied"""
        merged = {**self.grid.__dict__, **(overrides or {})}
        try:
            grid = GridConfig(**merged)
        except TypeError as exc:
            raise ConfigError(f"unknown grid override: {exc}") from exc
        n = grid.n_grid
        if n < 2 or n & (n - 1):
            raise ConfigError(f"grid.n_grid must be a power of two, got {n}")
        return grid

    def with_fock(self, overrides: Dict[str, Any]) -> FockConfig:
        """Fock settings with per-experiment overrides applied"""
        merged = {**self.fock.__dict__, **(overrides or {})}
        try:
            return FockConfig(**merged)
        except TypeError as exc:
            raise ConfigError(f"unknown fock override: {exc}") from exc


def configure_logging(config: Optional[Config] = None, verbose: bool = False):
    """Apply the logging section of config.yaml"""
    config = config or get_config()
    level = logging.DEBUG if verbose else config.logging.get('level', 'INFO')
    logging.basicConfig(
        level=level,
        format=config.logging.get('format', "%(levelname)s %(name)s: %(message)s"),
    )


# Global config instance
_config: Optional[Config] = None


def get_config() -> Config:
    """Get global config instance"""
    global _config
    if _config is None:
        _config = Config()
    return _config


def reset_config():
    """Drop the cached config (next get_config() reloads)"""
    global _config
    _config = None
