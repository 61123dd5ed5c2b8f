"""Exception types raised by the library.

Each class maps onto one failure family so that callers (and the command
line front end) can tell bad input apart from numerical trouble.
"""


class EnergyFwdError(Exception):
    """Base class for every error raised by this package."""


class ConfigurationError(EnergyFwdError, ValueError):
    """Inputs are individually fine but do not fit together (e.g. two
    curves carrying different weight rates)."""


class DomainError(EnergyFwdError, ValueError):
    """An argument lies outside the domain of the operation."""


class ParameterError(EnergyFwdError, ValueError):
    """A model or method parameter is inadmissible."""


class SchemaError(EnergyFwdError, ValueError):
    """A serialized object does not match the expected schema version."""

    def __init__(self, message, version=None):
        self.version = version
        if version is not None:
            message = f"{message} (schema {version})"
        super().__init__(message)


class QuoteParseError(EnergyFwdError, ValueError):
    """Malformed line in a quote file."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class InvalidBlockError(EnergyFwdError, ValueError):
    """A block covariance fails a validity condition."""


class UnsupportedModelError(EnergyFwdError, ValueError):
    """The requested model combination is not implemented."""


class NumericRangeError(EnergyFwdError, ArithmeticError):
    """A computation left the range of double precision (e.g. exp overflow)."""


class OperatorError(EnergyFwdError, RuntimeError):
    """A user supplied operator could not be evaluated."""


class NumericalFailure(EnergyFwdError, ArithmeticError):
    """A numerical routine failed to reach its accuracy target."""
