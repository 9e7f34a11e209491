"""Exception hierarchy shared by all modules.

Validation problems derive from ``ValueError`` and numerical breakdowns from
``ArithmeticError``; the command line maps the two families onto distinct
exit codes.
"""


class DomainError(ValueError):
    """Parameters or inputs outside the mathematically admissible range."""


class NumericalError(ArithmeticError):
    """A computation could not be carried out to the requested accuracy."""


class NonEllipticError(NumericalError):
    """A symbol vanishes (to tolerance) where invertibility is required."""


class ResolutionError(NumericalError):
    """A sampled curve is too coarse for a reliable winding number."""


class ConditioningError(NumericalError):
    """A discretized operator is too ill-conditioned to trust its solution."""


class SingularSampleError(NumericalError):
    """A symbol evaluation produced a non-finite value."""

    def __init__(self, message, point=None):
        super().__init__(message)
        self.point = point


class TruncationWarning(UserWarning):
    """Data does not decay at the ends of its grid or frequency window."""


class GrowthWarning(UserWarning):
    """A logarithmic potential is applied to a density with non-zero mean."""
