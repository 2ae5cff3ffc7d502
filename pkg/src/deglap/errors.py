"""Exception hierarchy shared by every module."""


class DegLapError(Exception):
    pass


class DomainError(DegLapError, ValueError):
    """Argument outside the region where a formula or integral is defined."""


class DivergenceError(DomainError):
    """The defining integral does not converge at the requested s."""


class NonDifferentiableAtZero(DomainError):
    pass


class ParameterOutOfDomain(DomainError):
    pass


class ToleranceNotReached(DegLapError):
    pass


class UnsupportedShape(DegLapError):
    """No closed-form rule covers the expression; use the numeric path."""


class UnknownCheckId(DegLapError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


class ParseError(DegLapError):
    """Expression text rejected by the parser.

    ``position`` is the 0-based character offset where the problem was
    detected and ``expected`` names what the parser wanted to see there.
    """

    def __init__(self, message, position=None, expected=None):
        self.position = position
        self.expected = expected
        detail = message if position is None else f"at position {position}: {message}"
        if expected:
            detail += f" (expected {expected})"
        super().__init__(detail)


class ExprSyntaxError(ParseError):
    pass


class ExponentOutOfRange(ParseError):
    pass


class NonIntegerLogPower(ParseError):
    pass


class NonLinearArgument(ParseError):
    pass
