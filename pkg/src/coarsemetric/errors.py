"""Exception types raised by coarsemetric operations."""

from __future__ import annotations


class CoarseMetricError(Exception):
    """Base class for all library errors."""


class SpaceError(CoarseMetricError):
    """Malformed space description."""


class EmptyLevel(CoarseMetricError):
    """Two consecutive exhaustion levels coincide."""


class NoCollar(CoarseMetricError):
    """An exhaustion level touches the complement of the next one."""


class DepthTooSmall(CoarseMetricError):
    pass


class ZeroGap(CoarseMetricError):
    """A plateau ramp would divide by a zero collar."""


class NegativeArgument(CoarseMetricError):
    pass


class AsymmetricInput(CoarseMetricError):
    pass


class GuaranteeViolation(CoarseMetricError):
    """An amplified metric failed one of its construction guarantees.

    ``witness`` holds ``(n, x, y)`` for the first offending level and pair.
    """

    def __init__(self, message: str, witness: tuple[int, int, int]):
        super().__init__(message)
        self.witness = witness


class EmptySide(CoarseMetricError):
    """A closed-set pair has an empty side."""


class EmptyFamily(CoarseMetricError):
    pass


class PreconditionFailed(CoarseMetricError):
    pass


class MissingLimitTags(CoarseMetricError):
    pass
