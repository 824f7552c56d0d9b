"""Exception hierarchy shared by all qpp modules."""


class QppError(Exception):
    """Base class for all errors raised by this package."""


class NotHermitian(QppError):
    """Input matrix is not Hermitian within the equality tolerance."""


class SpectrumViolation(QppError):
    """An eigenvalue lies strictly inside the forbidden open interval (0, 1)."""


class NotIdempotent(QppError):
    """Matrix fails the idempotency residual test."""


class NotProjection(QppError):
    """Matrix fails the projection (Hermitian idempotent) residual test."""


class NotQuasiPair(QppError):
    """(P, Q) fails the quasi-projection-pair identity."""


class IsProjection(QppError):
    """Operation requires a non-projection idempotent but received a projection."""


class IllConditioned(QppError):
    """A matrix that must be inverted is numerically singular."""


class CrossCheckFailure(QppError):
    """Two independent closed forms of the same quantity disagree."""


class DegenerateSplit(QppError):
    """Range/co-kernel split does not cover the ambient space."""


class TrivialProjection(QppError):
    """Operation requires a non-trivial projection (P != 0 and P != I)."""


class DimensionMismatch(QppError):
    """Block dimensions are inconsistent with the ambient dimension."""


class InvariantViolation(QppError):
    """A structured value fails its declared invariants."""


class NotSquareZero(QppError):
    """Matrix fails the square-zero residual test."""


class NotQuadratic(QppError):
    """No monic polynomial of degree <= 2 annihilates the matrix."""


class BadSpec(QppError):
    """Generator specification is inconsistent or out of range."""
