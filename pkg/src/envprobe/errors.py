"""Exception types shared across the package."""


class EnvProbeError(Exception):
    """Base class for every error raised by envprobe."""


class ParameterError(EnvProbeError, ValueError):
    """Invalid argument or parameter record."""


class SolverError(EnvProbeError, ArithmeticError):
    """A numerical procedure could not produce a trustworthy result."""


class InitialStateRequiredError(SolverError):
    """The steady state is not unique and no initial state was supplied."""


class SingularParametersError(SolverError):
    """A closed-form expression has a vanishing denominator."""


class TruncationError(SolverError):
    """A time series was cut off before the correlation decayed."""

    def __init__(self, message, residual):
        super().__init__(message)
        self.residual = residual
