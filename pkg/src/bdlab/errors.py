"""Exception hierarchy shared by the numerical core and the CLI.

Every class also derives from the closest builtin, so callers that only know
about ``ValueError`` or ``ArithmeticError`` keep working. ``exit_code`` is the
process status the CLI reports for an uncaught instance.
"""


class LabError(Exception):
    exit_code: int = 3


class ConfigurationError(LabError, ValueError):
    exit_code = 2


class CapacityError(LabError, ValueError):
    """Requested Hilbert space exceeds the configured maximum dimension."""


class ShapeError(LabError, ValueError):
    """Operator dimensions or parameter counts do not match."""


class NumericError(LabError, ArithmeticError):
    """A numerical routine left its well-conditioned regime."""

    def __init__(self, message: str, residual: float = float("nan")):
        super().__init__(message)
        self.residual = residual


class ConsistencyError(LabError, ArithmeticError):
    """Two quantities that must agree algebraically did not."""


class VerificationError(LabError, AssertionError):
    exit_code = 1
