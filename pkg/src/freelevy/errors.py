"""Exception hierarchy shared by all modules."""


class FreeLevyError(Exception):
    """Base class for library errors."""


class DomainError(FreeLevyError, ValueError):
    """Argument outside the domain of an operation."""


class PoleError(DomainError):
    """Argument hits a pole."""


class ConvergenceError(FreeLevyError, ArithmeticError):
    """A series or iteration failed to converge."""


class BoundaryError(FreeLevyError):
    """Boundary value on the real axis could not be estimated."""


class InversionError(FreeLevyError):
    """Stieltjes inversion produced a clearly negative density."""


class DivergenceError(FreeLevyError):
    """An integral appears to be infinite."""


class HypothesisError(FreeLevyError):
    """Input law does not satisfy the hypothesis of a limit theorem."""


class NotInfinitelyDivisibleError(FreeLevyError):
    """Law is not infinitely divisible for multiplicative free convolution."""


class ContinuationError(FreeLevyError):
    """Complex Newton continuation did not converge."""


class ClassError(FreeLevyError):
    """Law is not in the class required by the wrapping homomorphism."""


class TruncationError(FreeLevyError):
    """A truncated sum did not reach its tail tolerance."""


class NumericError(FreeLevyError):
    """Generic numerical failure (e.g. eigensolver did not converge)."""
