"""
Exception hierarchy for the witness toolkit.
Each error carries the CLI exit code it maps to.
"""


class WitnessError(Exception):
    """Base class for all toolkit errors"""
    exit_code = 1


class ConfigError(WitnessError, ValueError):
    """Invalid experiment or device configuration"""
    exit_code = 2


class DimensionError(WitnessError, ValueError):
    """Matrix or vector shapes do not match"""
    exit_code = 2


class NumericError(WitnessError, ArithmeticError):
    """Numerical failure during simulation"""
    exit_code = 3


class DomainError(NumericError, ValueError):
    """Input outside the mathematical domain of an operation"""


class NotPureStateError(NumericError, ValueError):
    """Covariance matrix does not describe a pure Gaussian state"""


class GridError(NumericError):
    """Position grid too small or too coarse for the state"""

    hint = "increase the grid extent (q_min/q_max) or resolution (n_grid)"

    def __str__(self):
        return f"{super().__str__()} ({self.hint})"


class ConvergenceError(NumericError):
    """Fock-space value not stable under cutoff doubling"""


class ContractViolation(WitnessError, RuntimeError):
    """Caller broke a sampling precondition"""
    exit_code = 3


class InsufficientSamplesError(WitnessError, RuntimeError):
    """Sample stream exhausted before the batch plan was filled"""
    exit_code = 4
