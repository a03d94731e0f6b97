"""Exception hierarchy shared by every plin module."""


class PlinError(Exception):
    """Base class for all errors raised by plin."""


class ExprError(PlinError):
    """Expression error; ``pos`` is the 0-based offset into the source text when known."""

    def __init__(self, message="", pos=None):
        self.msg = message
        self.pos = pos
        super().__init__(message if pos is None else f"col {pos + 1}: {message}")


class ParseError(ExprError):
    """Syntax error in an expression; ``pos`` is the 0-based character offset."""

    def __init__(self, message, text="", pos=0):
        self.text = text
        super().__init__(message, pos)


class UnknownVariableError(ExprError):
    pass


class ZeroDenominatorError(ExprError, ZeroDivisionError):
    """Division by the zero polynomial, or a denominator that vanishes after substitution."""


class NotAUnitError(ExprError):
    """Denominator vanishes at the expansion point."""


class GeometryError(PlinError):
    pass


class TangencyError(GeometryError):
    """The bivector (or a vector field) is not tangent to S = {y = 0}."""


class NotPoissonError(GeometryError):
    pass


class SingularError(GeometryError):
    """A matrix that must be invertible is singular (possibly only along S)."""


class NonPolynomialError(GeometryError):
    pass
