"""Exception hierarchy.

Input problems subclass :class:`ValueError`, so callers that only care about
"bad argument" can keep catching that.
"""


class QremError(Exception):
    """Base class for all errors raised by this package."""


class InputError(QremError, ValueError):
    """Malformed or inconsistent input data."""


class WidthMismatchError(InputError):
    pass


class EmptyDistributionError(InputError):
    pass


class DomainError(InputError):
    """A numeric argument lies outside its admissible range."""


class PreconditionError(InputError):
    pass


class AliasingError(InputError):
    """Too few MQC angles to resolve the requested Fourier line."""


class SizeCapError(QremError):
    """An operation would exceed a configured size cap."""


class NumericalError(QremError, ArithmeticError):
    pass


class NoninvertibleCalibrationError(NumericalError):
    pass


class DegenerateConstraintError(NumericalError):
    """The sum-to-one constraint has no component along the chosen directions."""
