"""Exception hierarchy shared by every module of the package."""


class ArithError(Exception):
    """Base class for all domain errors raised by arithring."""


class NotInvertible(ArithError):
    pass


class ZeroToThePowerZero(ArithError):
    pass


class NotInA0(ArithError):
    """Exp was asked for a function with f(1) != 0."""


class NotInA1(ArithError):
    """Log was asked for a function with f(1) != 1."""


class UnsupportedDepth(ArithError):
    pass


class HorizonExhausted(ArithError):
    """An operator would leave no exact values at all."""


class DivisionByZeroValue(ArithError):
    pass


class NotSquare(ArithError):
    pass


class DimensionTooLarge(ArithError):
    pass


class NonDistinctPrimes(ArithError):
    pass


class HypothesisViolated(ArithError):
    pass


class ZeroFunction(ArithError):
    pass


class CapExceeded(ArithError):
    pass


class OutOfRange(ArithError, ValueError):
    pass


class InvalidQ(ArithError, ValueError):
    pass


class UnknownBuiltin(ArithError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


class InvalidParams(ArithError, ValueError):
    pass


class DSLSyntaxError(ArithError):
    """Parse failure with a 0-based character position and the expected tokens."""

    def __init__(self, message, position, expected=()):
        self.position = position
        self.expected = tuple(sorted(set(expected)))
        if self.expected:
            message = f"{message} at position {position}; expected one of: {', '.join(self.expected)}"
        else:
            message = f"{message} at position {position}"
        super().__init__(message)


class EvalError(ArithError):
    """A domain error raised while evaluating a DSL expression, tagged with its source position."""

    def __init__(self, message, position, cause=None):
        self.position = position
        self.cause = cause
        super().__init__(f"{message} (at position {position})")
