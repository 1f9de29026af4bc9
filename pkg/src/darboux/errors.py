"""Exception hierarchy.

Every error raised on purpose by the library derives from :class:`DarbouxError`.
The CLI maps :class:`ParseError`/:class:`UsageError` to exit code 2 and every
other :class:`MathError` to exit code 3.
"""


class DarbouxError(Exception):
    pass


class MathError(DarbouxError):
    """A precondition of a mathematical operation was violated."""


class DivisionByZero(MathError, ZeroDivisionError):
    pass


class UnknownVariable(MathError):
    pass


class UnknownSymbol(DarbouxError):
    pass


class InconsistentDerivations(MathError):
    """Declared derivative tables of an adjoined symbol do not commute."""


class ContextMismatch(MathError):
    pass


class ZeroOperator(MathError):
    pass


class SingularWronskian(MathError):
    pass


class ChainMismatch(MathError):
    pass


class InvalidWitness(MathError):
    pass


class NotInKernel(MathError):
    pass


class ZeroInvariant(MathError):
    def __init__(self, which, message=None):
        self.which = which
        super().__init__(message or f"Laplace invariant {which} vanishes")


class NoVerifiedCandidate(MathError):
    pass


class ZeroF(MathError):
    pass


class NonCommutingTail(MathError):
    pass


class NotScalarTail(MathError):
    pass


class WrongShape(MathError):
    pass


class ZeroLeading(MathError):
    pass


class SingularP(MathError):
    pass


class NotDifferential(MathError):
    pass


class ZeroGauge(MathError):
    pass


class NonCommuting(MathError):
    pass


class NotFirstOrder(MathError):
    pass


class ParseError(DarbouxError):
    """Syntax error in an expression; ``position`` is a 0-based offset."""

    def __init__(self, message, position=None, source=None):
        self.position = position
        self.source = source
        if position is not None:
            message = f"{message} at position {position}"
        super().__init__(message)


class UsageError(DarbouxError):
    pass
