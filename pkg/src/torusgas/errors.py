"""Exception types shared across the package."""


class TorusGasError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(TorusGasError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class RangeError(TorusGasError, LookupError):
    """A lookup (e.g. a tabulated potential) was queried outside its domain."""


class ConfigurationError(TorusGasError, ValueError):
    """A run configuration is inconsistent or incomplete.

    The first constructor argument should name the offending field so that
    front-ends can report it.
    """

    def __init__(self, field, message):
        super().__init__(f"{field}: {message}")
        self.field = field
        self.message = message


class ConsistencyError(TorusGasError, RuntimeError):
    """An internal invariant failed; results cannot be trusted."""
