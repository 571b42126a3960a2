"""Exception hierarchy shared by all modules."""


class LoewnerQCError(Exception):
    """Base class for every error raised by the package."""


class DomainError(LoewnerQCError, ValueError):
    """Point lies outside the region where an operation is defined."""


class RangeError(LoewnerQCError, ValueError):
    """Scalar parameter outside its admissible range."""


class SingularityError(LoewnerQCError, ZeroDivisionError):
    """A denominator vanished."""

    def __init__(self, message, location=None):
        super().__init__(message)
        self.location = location


class ConvergenceError(LoewnerQCError, ArithmeticError):
    """An iterative limit or root-finder failed to stabilise."""


class StepFailure(LoewnerQCError, ArithmeticError):
    """Adaptive integrator step size underflowed, or an accepted step broke monotonicity."""

    def __init__(self, message, t=None):
        super().__init__(message)
        self.t = t


class SeriesError(LoewnerQCError, ValueError):
    """Series operation is not defined (e.g. non-normalized driver, zero constant term)."""


class DerivativeError(LoewnerQCError, ArithmeticError):
    """Finite-difference derivative is too small to form a dilatation quotient."""


class ZeroDivisorError(LoewnerQCError, ZeroDivisionError):
    """Quadratic differential vanishes at a requested point."""


class BranchError(LoewnerQCError, ValueError):
    """Point sits on a branch point of a multivalued closed form."""


class TruncationError(LoewnerQCError, ArithmeticError):
    """Tail bound of a truncated integral exceeds the requested tolerance."""


class EvaluationError(LoewnerQCError, ArithmeticError):
    """User-supplied evaluator returned a non-finite value (pole)."""

    def __init__(self, message, points=()):
        super().__init__(message)
        self.points = list(points)


class ExpressionError(LoewnerQCError, ValueError):
    """User-supplied expression outside the accepted grammar."""
