"""Exception and warning types shared across the package."""


class ExballError(Exception):
    """Base class for all package errors."""


class DataError(ExballError, ValueError):
    """Input samples are invalid (non-finite values, broken boundary condition)."""


class ParameterError(ExballError, ValueError):
    """A parameter is out of its admissible range or inconsistent."""


class DomainError(ExballError, ValueError):
    """A point lies outside the domain where a formula is defined."""


class DegenerateInputError(ExballError, ValueError):
    """The requested quantity is undefined for this input (e.g. a ratio with zero norm)."""


class UnderResolvedError(ExballError, RuntimeError):
    """The grid cannot resolve the requested frequency scale."""


class ResolutionError(ExballError, RuntimeError):
    """Snapshot spacing is too coarse for the requested time decomposition."""


class NumericalAbort(ExballError, RuntimeError):
    """The time integration produced non-finite values."""

    def __init__(self, message, step=None):
        super().__init__(message)
        self.step = step


class BudgetExceededError(ExballError, RuntimeError):
    """A trajectory left the trusted region of the truncated domain."""

    def __init__(self, message, last_trusted_time=None):
        super().__init__(message)
        self.last_trusted_time = last_trusted_time


class IntegrityError(ExballError, OSError):
    """A persisted snapshot is missing or fails its hash check."""


class AccuracyWarning(UserWarning):
    """A result was computed but its discretisation error may be large."""


class BudgetWarning(UserWarning):
    """A field carries more than the allowed mass near the truncation boundary."""
