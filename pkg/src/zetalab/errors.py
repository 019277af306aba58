"""Exception hierarchy shared by every zetalab module."""


class ZetaLabError(Exception):
    """Base class for all evaluation and verification failures."""


class DomainError(ZetaLabError, ValueError):
    """Argument lies outside the supported region of an operation."""


class PoleError(DomainError):
    """Argument sits on a pole of the function being evaluated."""


class NonConvergence(ZetaLabError, ArithmeticError):
    """A series or iteration did not meet its target within the allowed budget."""


class BracketError(ZetaLabError):
    """A bisection bracket does not straddle a sign change."""


class ContourTooClose(ZetaLabError):
    """A zero lies on (or numerically too close to) a counting contour."""


class RoundingDefect(ZetaLabError):
    """Accumulated winding is not close enough to an integer to be trusted."""


class StepTooCoarse(ZetaLabError):
    """The line scan found fewer sign changes than the contour count."""


class ZeroCountMismatch(ZetaLabError):
    """The line scan found more zeros than the contour count admits."""


class NotPrimitive(DomainError):
    """Operation requires a primitive Dirichlet character."""
