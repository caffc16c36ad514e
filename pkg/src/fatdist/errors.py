"""Exception hierarchy shared by every fatdist module."""


class FatDistError(Exception):
    """Base class for all fatdist errors."""


class DimensionMismatchError(FatDistError, ValueError):
    """Operands live in ambient spaces of different dimension."""


class InvalidFormError(FatDistError, ValueError):
    """A matrix that should represent a skew form is not skew (or not square)."""


class NumericFailure(FatDistError, ArithmeticError):
    """A factorization or eigen-solve failed, or a conditioning bound was exceeded."""


class PreconditionError(FatDistError, ValueError):
    """The input violates a documented precondition of the operation."""


class NotRegularError(PreconditionError):
    """A subspace or jet that must be Omega-regular is not."""


class InternalInconsistencyError(FatDistError, AssertionError):
    """Two independent computations of the same quantity disagree.

    This almost always means the tolerance is miscalibrated for the input.
    """


class NoRoomError(FatDistError):
    """A sampling step has an empty admissible set at the active tolerance."""


class ConstructionFailure(FatDistError):
    """A randomized builder exhausted its retries without producing a valid frame."""


class SizeError(FatDistError, ValueError):
    """The requested dense assembly is too large."""


class SchemaError(FatDistError, ValueError):
    """An instance file does not match the documented JSON schema."""
