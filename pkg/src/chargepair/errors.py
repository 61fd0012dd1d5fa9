"""Exception and warning types shared across the package."""


class ChargePairError(Exception):
    """Base class for all package errors."""


class DimensionError(ChargePairError, ValueError):
    pass


class NotHermitianError(ChargePairError, ValueError):
    pass


class InvalidStateError(ChargePairError, ValueError):
    """A density matrix or state vector failed validation."""


class PreconditionError(ChargePairError, ValueError):
    pass


class NoCommensurateSolution(ChargePairError):
    """No pulse duration satisfies all phase conditions within the search bound."""


class RankDeficient(ChargePairError):
    """A tomography schedule does not determine the density matrix."""


class StepSizeUnderflow(ChargePairError):
    """The integration step required by the fastest timescale is too small for the horizon."""


class ConfigError(ChargePairError, ValueError):
    pass


class NonExponentialWarning(UserWarning):
    """A decay fit has r^2 below the exponential threshold."""


class RegimeWarning(UserWarning):
    """A circuit parameter set violates the charge-regime inequalities."""
