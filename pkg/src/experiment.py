"""
Experiment configuration for benchmarking runs.
Parses and validates the JSON experiment documents (target, device, probe
ensemble, accuracy, seed) into model objects.
"""

import json
import logging
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Dict, Optional, Union

import numpy as np

from .config import FockConfig, GridConfig, get_config
from .errors import ConfigError, WitnessError
from .gaussian import (
    beamsplitter, compose_unitaries, displacement, identity_unitary, rotation, squeezer,
    two_mode_squeezer,
)
from .models import DeviceKind, DeviceModel, GaussianUnitary, ProbeEnsemble, Scenario, VarianceMode

logger = logging.getLogger(__name__)

PRIOR_TOL = 1e-9

_SCENARIO_DEVICES = {
    Scenario.GAUSSIAN_STATE: {DeviceKind.IDEAL_GAUSSIAN, DeviceKind.LOSSY_GAUSSIAN,
                              DeviceKind.THERMAL_GAUSSIAN, DeviceKind.MISCALIBRATED_GAUSSIAN},
    Scenario.GAUSSIAN_CHANNEL: {DeviceKind.IDEAL_GAUSSIAN, DeviceKind.LOSSY_GAUSSIAN,
                                DeviceKind.THERMAL_GAUSSIAN, DeviceKind.MISCALIBRATED_GAUSSIAN},
    Scenario.AMPLIFIER: {DeviceKind.AMPLIFIER, DeviceKind.IDEAL_GAUSSIAN, DeviceKind.LOSSY_GAUSSIAN,
                         DeviceKind.THERMAL_GAUSSIAN, DeviceKind.MISCALIBRATED_GAUSSIAN},
    Scenario.CUBIC: {DeviceKind.CUBIC_PHASE},
}


@dataclass(frozen=True, eq=False)
class ExperimentConfig:
    """Validated experiment description"""
    scenario: Scenario
    seed: int
    epsilon: float
    delta: float
    variance_mode: VarianceMode
    pilot_size: int
    device: DeviceModel
    ensemble: ProbeEnsemble
    grid: GridConfig
    fock: FockConfig
    target: Optional[GaussianUnitary] = None
    gain: Optional[float] = None
    gamma: Optional[float] = None
    output_dir: str = "results"
    threads: int = 1
    raw: Dict[str, Any] = field(default_factory=dict)

    def with_overrides(self, seed: Optional[int] = None, output_dir: Optional[str] = None,
                       threads: Optional[int] = None) -> 'ExperimentConfig':
        """Copy with CLI overrides applied"""
        raw = dict(self.raw)
        changes = {}
        if seed is not None:
            changes['seed'] = _parse_seed(seed)
            raw['seed'] = changes['seed']
        if output_dir is not None:
            changes['output_dir'] = str(output_dir)
            raw['output'] = changes['output_dir']
        if threads is not None:
            if threads < 1:
                raise ConfigError(f"threads must be at least 1, got {threads}")
            changes['threads'] = threads
        return replace(self, raw=raw, **changes)

    def to_dict(self) -> Dict[str, Any]:
        """Config echo for reports (thread count excluded; it never changes results)"""
        return dict(self.raw)


# Field parsers

def _number(raw: Dict[str, Any], key: str, default=None) -> Optional[float]:
    value = raw.get(key, default)
    if value is None:
        return None
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"'{key}' must be a number, got {value!r}")
    return float(value)


def _parse_seed(value) -> int:
    if isinstance(value, bool) or not isinstance(value, int) or value < 0:
        raise ConfigError(f"'seed' must be a non-negative integer, got {value!r}")
    return value


def parse_complex(value) -> complex:
    """Number, "1+2j" string or [re, im] pair"""
    if isinstance(value, bool):
        raise ConfigError(f"not a complex amplitude: {value!r}")
    if isinstance(value, (int, float)):
        return complex(value)
    if isinstance(value, str):
        try:
            return complex(value.replace(' ', ''))
        except ValueError as exc:
            raise ConfigError(f"not a complex amplitude: {value!r}") from exc
    if isinstance(value, (list, tuple)) and len(value) == 2 \
            and all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in value):
        return complex(value[0], value[1])
    raise ConfigError(f"not a complex amplitude: {value!r}")


def parse_amplitude(value) -> np.ndarray:
    """
    One probe amplitude vector.

    A number, string or [re, im] pair is a single-mode amplitude; a list of
    those is one amplitude per mode.
    """
    if isinstance(value, list) and value and all(isinstance(v, (list, tuple, str)) for v in value):
        return np.array([parse_complex(v) for v in value], dtype=complex)
    return np.array([parse_complex(value)], dtype=complex)


def parse_ensemble(raw: Optional[Dict[str, Any]], default_modes: int = 1) -> ProbeEnsemble:
    """Amplitudes and priors; priors default to uniform and are renormalized within 1e-9"""
    if raw is None:
        return ProbeEnsemble.uniform([np.zeros(default_modes, dtype=complex)])
    if not isinstance(raw, dict) or 'amplitudes' not in raw:
        raise ConfigError("'ensemble' must be an object with 'amplitudes'")
    amplitudes = raw['amplitudes']
    if not isinstance(amplitudes, list) or not amplitudes:
        raise ConfigError("'ensemble.amplitudes' must be a non-empty list")
    parsed = [parse_amplitude(a) for a in amplitudes]
    priors = raw.get('priors')
    if priors is None:
        return ProbeEnsemble.uniform(parsed)
    try:
        priors = np.array(priors, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"'ensemble.priors' must be numbers: {exc}") from exc
    if priors.ndim != 1 or np.any(priors < 0):
        raise ConfigError("'ensemble.priors' must be a list of nonnegative numbers")
    if abs(priors.sum() - 1.0) > PRIOR_TOL:
        raise ConfigError(f"'ensemble.priors' must sum to 1, got {priors.sum()!r}")
    return ProbeEnsemble(amplitudes=tuple(parsed), priors=priors / priors.sum())


def _gate(entry: Dict[str, Any], m: int) -> GaussianUnitary:
    if not isinstance(entry, dict) or 'type' not in entry:
        raise ConfigError(f"gate must be an object with a 'type', got {entry!r}")
    kind = entry['type']
    mode = entry.get('mode', 0)
    modes = tuple(entry.get('modes', (0, 1)))
    used = modes if kind in ('beamsplitter', 'two_mode_squeezer') else (mode,)
    if any(not 0 <= j < m for j in used):
        raise ConfigError(f"gate {kind!r} addresses a mode outside 0..{m - 1}")
    if kind == 'squeezer':
        return squeezer(_number(entry, 'xi', 0.0), mode=mode, m=m)
    if kind == 'rotation':
        return rotation(_number(entry, 'theta', 0.0), mode=mode, m=m)
    if kind == 'beamsplitter':
        return beamsplitter(_number(entry, 'theta', np.pi / 4), modes=modes, m=m)
    if kind == 'two_mode_squeezer':
        return two_mode_squeezer(_number(entry, 'r', 0.0), modes=modes, m=m)
    if kind == 'displacement':
        return displacement(parse_complex(entry.get('alpha', 0.0)), mode=mode, m=m)
    raise ConfigError(f"unknown gate type {kind!r}")


def parse_unitary(raw: Dict[str, Any]) -> GaussianUnitary:
    """Matrix literal {S, d} or {modes, gates}"""
    if not isinstance(raw, dict):
        raise ConfigError(f"Gaussian unitary must be an object, got {raw!r}")
    if 'S' in raw:
        S = np.array(raw['S'], dtype=float)
        d = np.array(raw.get('d', np.zeros(S.shape[0])), dtype=float)
        return GaussianUnitary(S=S, d=d)
    m = raw.get('modes')
    if isinstance(m, bool) or not isinstance(m, int) or m < 1:
        raise ConfigError(f"'modes' must be a positive integer, got {m!r}")
    gates = raw.get('gates', [])
    if not isinstance(gates, list):
        raise ConfigError("'gates' must be a list")
    return compose_unitaries([identity_unitary(m)] + [_gate(g, m) for g in gates])


def parse_device(raw: Dict[str, Any], target: Optional[GaussianUnitary],
                 gain: Optional[float], gamma: Optional[float]) -> DeviceModel:
    """Device entry; target, gain and gamma default to the experiment values"""
    if not isinstance(raw, dict) or 'kind' not in raw:
        raise ConfigError("'device' must be an object with a 'kind'")
    try:
        kind = DeviceKind(raw['kind'])
    except ValueError as exc:
        raise ConfigError(f"unknown device kind {raw['kind']!r}") from exc
    device_target = parse_unitary(raw['target']) if 'target' in raw else target
    actual = parse_unitary(raw['actual']) if 'actual' in raw else None
    return DeviceModel(
        kind=kind,
        target=device_target,
        eta=_number(raw, 'eta', 1.0),
        nbar=_number(raw, 'nbar', 0.0),
        actual=actual,
        gain=_number(raw, 'gain', gain if gain is not None else 1.0),
        n_add=_number(raw, 'n_add', 0.0),
        gamma=_number(raw, 'gamma', gamma if gamma is not None else 0.0),
        pre_squeezing=_number(raw, 'pre_squeezing', 0.0),
        pre_displacement=parse_complex(raw.get('pre_displacement', 0.0)),
    )


def _validate_scenario(cfg: ExperimentConfig):
    if cfg.device.kind not in _SCENARIO_DEVICES[cfg.scenario]:
        raise ConfigError(f"device kind {cfg.device.kind.value} cannot run the {cfg.scenario.value} scenario")
    if cfg.scenario in (Scenario.GAUSSIAN_STATE, Scenario.GAUSSIAN_CHANNEL):
        if cfg.target is None:
            raise ConfigError(f"scenario {cfg.scenario.value} needs a 'target'")
        if cfg.ensemble.modes != cfg.target.modes:
            raise ConfigError(f"probes have {cfg.ensemble.modes} modes, target has {cfg.target.modes}")
        device_modes = (cfg.device.actual or cfg.device.target).modes
        if device_modes != cfg.target.modes:
            raise ConfigError(f"device acts on {device_modes} modes, target has {cfg.target.modes}")
    if cfg.scenario is Scenario.GAUSSIAN_STATE and len(cfg.ensemble) != 1:
        raise ConfigError("gaussian_state takes a single input amplitude")
    if cfg.scenario is Scenario.AMPLIFIER:
        if cfg.gain is None or cfg.gain <= 1.0:
            raise ConfigError(f"amplifier scenario needs 'gain' > 1, got {cfg.gain}")
    if cfg.scenario is Scenario.CUBIC and cfg.gamma is None:
        raise ConfigError("cubic scenario needs 'gamma'")
    if cfg.scenario in (Scenario.AMPLIFIER, Scenario.CUBIC) and cfg.ensemble.modes != 1:
        raise ConfigError(f"{cfg.scenario.value} probes must be single-mode")


def build_experiment(raw: Dict[str, Any]) -> ExperimentConfig:
    """ExperimentConfig from a parsed JSON document"""
    if not isinstance(raw, dict):
        raise ConfigError("experiment config must be a JSON object")
    defaults = get_config()
    try:
        scenario = Scenario(raw.get('scenario'))
    except ValueError as exc:
        raise ConfigError(f"unknown scenario {raw.get('scenario')!r}") from exc
    if 'seed' not in raw:
        raise ConfigError("'seed' is mandatory")
    seed = _parse_seed(raw['seed'])

    epsilon = _number(raw, 'epsilon', 0.05)
    delta = _number(raw, 'delta', 0.05)
    if epsilon <= 0:
        raise ConfigError(f"'epsilon' must be positive, got {epsilon}")
    if not 0.0 < delta < 1.0:
        raise ConfigError(f"'delta' must lie in (0, 1), got {delta}")
    try:
        variance_mode = VarianceMode(raw.get('variance_mode', defaults.estimation.variance_mode))
    except ValueError as exc:
        raise ConfigError(f"unknown variance_mode {raw.get('variance_mode')!r}") from exc
    pilot_size = raw.get('pilot_size', defaults.estimation.pilot_size)
    if isinstance(pilot_size, bool) or not isinstance(pilot_size, int) or pilot_size < 2:
        raise ConfigError(f"'pilot_size' must be an integer >= 2, got {pilot_size!r}")

    target = parse_unitary(raw['target']) if 'target' in raw else None
    gain = _number(raw, 'gain')
    gamma = _number(raw, 'gamma')
    default_modes = target.modes if target is not None else 1
    ensemble = parse_ensemble(raw.get('ensemble'), default_modes)
    if 'device' not in raw:
        raise ConfigError("'device' is mandatory")
    device = parse_device(raw['device'], target, gain, gamma)

    threads = raw.get('threads', defaults.run.threads)
    if isinstance(threads, bool) or not isinstance(threads, int) or threads < 1:
        raise ConfigError(f"'threads' must be a positive integer, got {threads!r}")

    cfg = ExperimentConfig(
        scenario=scenario,
        seed=seed,
        epsilon=epsilon,
        delta=delta,
        variance_mode=variance_mode,
        pilot_size=pilot_size,
        device=device,
        ensemble=ensemble,
        grid=defaults.with_grid(raw.get('grid')),
        fock=defaults.with_fock(raw.get('fock')),
        target=target,
        gain=gain,
        gamma=gamma,
        output_dir=str(raw.get('output', defaults.run.output_dir)),
        threads=threads,
        raw=dict(raw),
    )
    _validate_scenario(cfg)
    return cfg


def load_experiment(source: Union[str, Path, Dict[str, Any]]) -> ExperimentConfig:
    """Load an experiment from a JSON file path or an already parsed dict"""
    if isinstance(source, dict):
        raw = source
    else:
        try:
            with open(source, 'r', encoding='utf-8') as f:
                raw = json.load(f)
        except OSError as exc:
            raise ConfigError(f"cannot read experiment config {source}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"experiment config {source} is not valid JSON: {exc}") from exc
    try:
        cfg = build_experiment(raw)
    except ConfigError:
        raise
    except WitnessError as exc:
        raise ConfigError(str(exc)) from exc
    logger.info("Loaded %s experiment (seed %d)", cfg.scenario.value, cfg.seed)
    return cfg
