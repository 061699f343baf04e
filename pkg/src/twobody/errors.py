"""Exception types raised by the toolkit.

Every error subclasses :class:`TwoBodyError` so callers can catch the whole
family at once.  The CLI maps several of them onto fixed exit codes.
"""


class TwoBodyError(Exception):
    """Base class for all toolkit errors."""


class DomainError(TwoBodyError, ValueError):
    """An argument lies outside the domain of the operation."""


class PreconditionError(TwoBodyError, ValueError):
    """A documented precondition of an operation does not hold."""


class DegenerateCasimirError(DomainError):
    """Spherical angles were requested for a state with zero Casimir."""


class EquatorError(DomainError):
    """The square completion of the energy is undefined at ``m3 == 0``."""


class DegenerateParametersError(TwoBodyError):
    """The parameters lie on the bifurcation locus (a multiple root was found)."""


class EmptyLevelSetError(TwoBodyError):
    """The requested level set has no points (or none could be sampled)."""


class OutOfBandError(DomainError):
    """A latitude lies outside the permitted band of the level set."""


class BracketError(TwoBodyError):
    """A root could not be bracketed."""

    def __init__(self, message, c=None):
        super().__init__(message)
        self.c = c


class BlowupError(TwoBodyError):
    """Integration reached a collision or antipodal configuration.

    The partial trajectory up to the last valid sample is attached as
    ``trajectory`` so nothing computed before the blowup is lost.
    """

    def __init__(self, message, trajectory=None):
        super().__init__(message)
        self.trajectory = trajectory


class ResolutionWarning(UserWarning):
    """A grid-based computation resolved a feature with very few cells."""


class FiniteDifferenceWarning(UserWarning):
    """Finite-difference estimates at two step sizes disagree."""
