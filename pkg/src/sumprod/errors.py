"""Exception types shared across the package."""


class SumprodError(Exception):
    """Base class for all package-specific errors."""


class DimensionMismatchError(SumprodError, ValueError):
    """Operands live in different ambient dimensions."""


class EmptySetError(SumprodError, ValueError):
    """A theorem-facing operation received an empty set."""


class ParseError(SumprodError, ValueError):
    """Malformed textual input; carries the 1-based line number when known."""

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class SingularMatrixError(SumprodError, ArithmeticError):
    """Condition number requested for a (numerically) singular matrix."""


class BudgetExceededError(SumprodError, ValueError):
    """An exhaustive search would exceed its enumeration budget."""
