"""Exception types shared across the toolkit."""


class NashflowError(Exception):
    """Base class for all toolkit errors."""


class UsageError(NashflowError, ValueError):
    """An operation was called with arguments outside its contract."""


class DimensionError(UsageError):
    """A point or cloud has the wrong dimension for the game at hand."""


class ConfigError(NashflowError, ValueError):
    """An experiment or solver configuration violates its invariants."""


class StabilityError(ConfigError):
    """Explicit time step exceeds the stability bound of the scheme."""


class SchemeError(NashflowError):
    """The discrete scheme produced an inadmissible state (e.g. negative mass)."""


class NumericalBlowupError(NashflowError):
    """A simulation produced non-finite values."""


class DegenerateInputError(NashflowError, ValueError):
    """Input measure is degenerate for the requested operation."""


class OptimizerFailureError(NashflowError):
    """The best-response search returned an inconsistent optimum."""


class DegenerateBasisError(NashflowError):
    """All test-function gradients vanish on the support of the measure."""


class SingularSystemError(NashflowError):
    """A linear solve hit a singular matrix; a ridge term is required."""
