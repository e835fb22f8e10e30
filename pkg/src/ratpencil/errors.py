"""Exception types shared by the package."""


class RatPencilError(Exception):
    """Base class for all errors raised by ratpencil."""


class InvalidInputError(RatPencilError, ValueError):
    """Input violates a precondition (bad sizes, poles on the unit circle, ...)."""


class NumericalFailure(RatPencilError, ArithmeticError):
    """A numerical step could not be carried out reliably (rank deficiency, overflow)."""
