"""Exception hierarchy.

Every error raised on purpose by this package derives from
MedianFraisseError, so callers can catch the whole family at once.
Ordinary misuse of Python-level contracts (wrong argument types and the
like) still surfaces as the usual built-ins.
"""


class MedianFraisseError(Exception):
    """Base class for all errors raised by this package."""


class EmptyCarrier(MedianFraisseError):
    """An algebra was given no points at all."""


class NotMedianClosed(MedianFraisseError):
    """A point set is not closed under the majority operation.

    Attributes:
        witness: triple of points whose majority is missing.
        missing: the absent majority point.
    """

    def __init__(self, message, witness=None, missing=None):
        super().__init__(message)
        self.witness = witness
        self.missing = missing


class PointNotInCarrier(MedianFraisseError):
    """A point argument does not belong to the algebra it was used with."""


class NotConvex(MedianFraisseError):
    """A point set fails interval closure where a convex set was required."""


class NotDisjoint(MedianFraisseError):
    """Two set families that must not meet do meet."""


class NotCovering(MedianFraisseError):
    """A pair of sets fails to cover the carrier it should cover."""


class EmptySide(MedianFraisseError):
    """A construction received an empty side where a nonempty one is required."""


class NotLinked(MedianFraisseError):
    """A family that must be pairwise intersecting has two disjoint members."""


class NotSurjective(MedianFraisseError):
    """A map fails to hit every point of its target."""


class NotMedianPreserving(MedianFraisseError):
    """A map sends some majority triple to the wrong point.

    Attributes:
        witness: triple of source points on which preservation fails.
    """

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class TypeMismatch(MedianFraisseError):
    """Objects built over different algebras or grounds were combined."""


class AxiomViolation(MedianFraisseError):
    """A table or family violates the axioms of the structure it claims to be.

    Attributes:
        witness: the offending tuple, when one exists.
    """

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class EmbeddingNotFaithful(MedianFraisseError):
    """The halfspace coordinates of an abstract table fail to separate it."""


class GroundSizeTooLarge(MedianFraisseError):
    """A superextension was requested over a ground set beyond the bound."""


class BoundExceeded(MedianFraisseError):
    """An input is larger than the documented size bound of the operation."""


class ResourceLimit(MedianFraisseError):
    """A construction would exceed a configured cap and was refused whole.

    Results are never silently truncated; the caller may raise the cap.
    """


class IndexOutOfRange(MedianFraisseError):
    """A stage or level index points outside the sequence it refers to."""


class ParseError(MedianFraisseError):
    """Malformed textual or JSON input."""


class InternalInvariantViolation(MedianFraisseError):
    """A consistency check that should be unreachable fired; this is a bug."""
