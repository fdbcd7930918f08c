"""Exception types shared across the package."""


class DomainError(ValueError):
    """Argument outside the domain of a log/arg/division (w = 0, singular point)."""


class ExpOverflowError(ArithmeticError):
    """exp argument beyond the overflow guard; use the log-form residual instead."""


class InadmissibleZError(ValueError):
    """z = 0 or z = 1 (Log z = 0)."""


class ConfigurationError(ValueError):
    """Invalid stack/region pairing or solver configuration."""


class SeedError(RuntimeError):
    """No usable seed could be built from the branch geometry."""


class MultiplicityError(ArithmeticError):
    """Newton denominator vanished: the iterate sits on a multiple root."""


class ConvergenceError(RuntimeError):
    """Iteration failed to reach the target accuracy.

    ``record`` carries the last iterate as an unconverged RootRecord.
    """

    def __init__(self, message, record=None):
        super().__init__(message)
        self.record = record
