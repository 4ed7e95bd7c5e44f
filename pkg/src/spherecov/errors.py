"""Exception types shared across the package."""

__all__ = [
    "SphereCovError",
    "AntipodalPointError",
    "CoincidentPointError",
    "NotPositiveDefiniteError",
    "DimensionMismatchError",
    "FrameMismatchError",
    "ObservationMismatchError",
    "NotHemisphericError",
    "IterationLimitError",
    "TooFewPairsError",
    "SampleSizeMismatchError",
]


class SphereCovError(Exception):
    """Base class for all package-specific errors."""


class AntipodalPointError(SphereCovError):
    """Log map (or an operation built on it) requested at an antipodal pair."""


class CoincidentPointError(SphereCovError):
    """Operation undefined when the two points coincide (rank-1 direction lost)."""


class NotPositiveDefiniteError(SphereCovError):
    """A matrix required to be strictly positive definite is not."""


class DimensionMismatchError(SphereCovError):
    """Array shapes are inconsistent with each other."""


class FrameMismatchError(SphereCovError):
    """Tangent-space objects expressed in different frames were combined."""


class ObservationMismatchError(SphereCovError):
    """Two fields evaluated on different observation sets were compared."""


class NotHemisphericError(SphereCovError):
    """Point set is not contained in any open hemisphere."""


class IterationLimitError(SphereCovError):
    """Iterative routine exhausted its iteration budget before converging."""


class TooFewPairsError(SphereCovError):
    """Not enough effective observations for a rank test."""


class SampleSizeMismatchError(SphereCovError):
    """Paired procedure called with samples of different sizes."""
