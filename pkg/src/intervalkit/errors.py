"""Exception types raised across the package."""


class IntervalError(Exception):
    """Base class for every error raised by intervalkit."""


class DegenerateInterval(IntervalError, ValueError):
    pass


class IntervalOverflow(IntervalError, OverflowError):
    pass


class NotInvertible(IntervalError, ZeroDivisionError):
    pass


class DivisionUndefined(IntervalError, ZeroDivisionError):
    pass


class MooreDivByZeroSpanning(IntervalError, ZeroDivisionError):
    pass


class HDiffNotExists(IntervalError, ValueError):
    pass


class GridMismatch(IntervalError, ValueError):
    pass


class ExprSyntaxError(IntervalError, SyntaxError):
    """Parse failure; ``offset`` is the byte offset into the UTF-8 source."""

    def __init__(self, message, offset):
        super().__init__(f"{message} at offset {offset}")
        self.message = message
        self.offset = offset


class EvalTypeError(IntervalError, TypeError):
    pass


class ParamOutOfRange(IntervalError, ValueError):
    pass


class ParamArityMismatch(IntervalError, ValueError):
    pass


class DomainBoundary(IntervalError, ValueError):
    pass


class NonFinite(IntervalError, ArithmeticError):
    pass


class NonDifferentiable(IntervalError, ArithmeticError):
    pass


class MaxDepthExceeded(IntervalError, RuntimeError):
    pass


class NonPositiveIntegrand(IntervalError, ValueError):
    pass


class RhsEvaluation(IntervalError, ArithmeticError):
    """The right-hand side could not be evaluated at time ``t``."""

    def __init__(self, t, cause=None):
        msg = f"rhs evaluation failed at t={float(t)!r}"
        if cause is not None:
            msg += f": {cause}"
        super().__init__(msg)
        self.t = t
        self.cause = cause


class NonConvergence(IntervalError, RuntimeError):
    """Picard iteration hit its cap; the last iterate is kept for inspection."""

    def __init__(self, last_iterate, residual, iterations):
        super().__init__(
            f"no convergence after {iterations} iterations (residual {residual:.3e})")
        self.last_iterate = last_iterate
        self.residual = residual
        self.iterations = iterations


class BranchInfeasible(IntervalError, RuntimeError):
    pass


class ConfigError(IntervalError, ValueError):
    pass
