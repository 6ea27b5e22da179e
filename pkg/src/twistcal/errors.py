"""Exception types shared across the package."""


class TwistcalError(Exception):
    """Base class for all package errors."""


class DimensionMismatchError(TwistcalError, ValueError):
    """Operands live over different spaces or an operation needs another dimension."""


class GradeError(TwistcalError, ValueError):
    """A multivector does not have the grade an operation requires."""


class DomainError(TwistcalError, ValueError):
    """A point or argument lies outside the admissible domain."""


class ChartError(DomainError):
    """A coordinate chart guard was violated (e.g. |z_0| too small)."""


class ImmersionDegenerateError(TwistcalError, RuntimeError):
    """The differential of a chart map fails to have full rank."""


class ConfigError(TwistcalError, ValueError):
    """Invalid suite configuration (unknown suite, chart, malformed value)."""
