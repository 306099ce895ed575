"""
Simulated devices under test.
Each device maps a coherent probe to an output state: Gaussian moments for the
Gaussian kinds and the amplifier, a grid wavefunction for the cubic-phase gate.
"""

import logging
from typing import Optional

import numpy as np

from .config import VACUUM_VARIANCE, GridConfig, get_config
from .errors import DomainError
from .gaussian import (
    apply_channel, apply_unitary, coherent_state, compose_channels, compose_unitaries,
    displacement, loss_channel, squeezer, thermal_noise_channel, unitary_as_channel,
)
from .models import DeviceKind, DeviceModel, GaussianChannelMap, GaussianState, GaussianUnitary
from .wavefn import GridWavefunction, apply_cubic_phase, fock_cubic_state, gaussian_wavefunction

logger = logging.getLogger(__name__)

_CHANNEL_KINDS = (DeviceKind.IDEAL_GAUSSIAN, DeviceKind.LOSSY_GAUSSIAN,
                  DeviceKind.THERMAL_GAUSSIAN, DeviceKind.MISCALIBRATED_GAUSSIAN)


def device_channel(dev: DeviceModel) -> GaussianChannelMap:
    """
    Gaussian CPTP map implemented by a Gaussian device.

    Lossy and thermal devices apply the target unitary, then loss eta, then
    additive noise nbar.
    """
    if dev.kind not in _CHANNEL_KINDS:
        raise DomainError(f"device kind {dev.kind.value} is not a Gaussian channel")
    if dev.kind is DeviceKind.MISCALIBRATED_GAUSSIAN:
        return unitary_as_channel(dev.actual)
    channel = unitary_as_channel(dev.target)
    if dev.kind is DeviceKind.IDEAL_GAUSSIAN:
        return channel
    m = dev.target.modes
    if dev.eta < 1.0:
        channel = compose_channels(channel, loss_channel(dev.eta, m))
    if dev.nbar > 0.0:
        channel = compose_channels(channel, thermal_noise_channel(dev.nbar, m))
    return channel


def target_output(target: GaussianUnitary, alpha) -> GaussianState:
    """Ideal output U|alpha>"""
    return apply_unitary(target, coherent_state(alpha))


def probe_gaussian(dev: DeviceModel, alpha) -> GaussianState:
    """Device output for the coherent probe |alpha> in moment form"""
    if dev.kind is DeviceKind.CUBIC_PHASE:
        raise DomainError("cubic-phase devices produce grid wavefunctions; use probe_cubic")
    rho = coherent_state(alpha)
    if dev.kind is DeviceKind.AMPLIFIER:
        size = 2 * rho.modes
        return GaussianState(
            x=dev.gain * rho.x,
            V=(VACUUM_VARIANCE + dev.n_add / 2) * np.eye(size),
        )
    return apply_channel(device_channel(dev), rho)


def pre_gate(dev: DeviceModel) -> GaussianUnitary:
    """Input imperfection: squeeze by pre_squeezing, then displace by pre_displacement"""
    return compose_unitaries([squeezer(dev.pre_squeezing), displacement(dev.pre_displacement)])


def probe_cubic(dev: DeviceModel, alpha: complex, grid: Optional[GridConfig] = None) -> GridWavefunction:
    """exp(i gamma_actual q^3) applied to the (imperfect) coherent input on the grid"""
    if dev.kind is not DeviceKind.CUBIC_PHASE:
        raise DomainError(f"device kind {dev.kind.value} does not produce grid wavefunctions")
    alpha = complex(np.ravel(alpha)[0]) if np.ndim(alpha) else complex(alpha)
    grid = grid or get_config().grid
    state = apply_unitary(pre_gate(dev), coherent_state([alpha]))
    psi = gaussian_wavefunction(state, grid)
    return apply_cubic_phase(psi, dev.gamma)


def probe_cubic_fock(dev: DeviceModel, alpha: complex, cutoff: int) -> np.ndarray:
    """Same output as probe_cubic, as a truncated Fock vector"""
    if dev.kind is not DeviceKind.CUBIC_PHASE:
        raise DomainError(f"device kind {dev.kind.value} does not produce cubic-phase outputs")
    alpha = complex(np.ravel(alpha)[0]) if np.ndim(alpha) else complex(alpha)
    return fock_cubic_state(alpha, dev.gamma, cutoff,
                            squeezing=dev.pre_squeezing, displacement=dev.pre_displacement)
