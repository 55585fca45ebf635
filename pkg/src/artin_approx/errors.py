"""Exception hierarchy.

Errors split into two families that the CLI maps to distinct exit codes:
mathematical precondition failures (a hypothesis does not hold for the given
data) and precision shortfalls (the data is too short to decide or to reach
the requested order).
"""


class ArtinError(Exception):
    """Base class for all library errors."""


class PreconditionError(ArtinError):
    """A mathematical hypothesis of an operation is violated."""


class PrecisionError(ArtinError):
    """Input precision is insufficient for the requested output precision."""

    def __init__(self, message, required=None, available=None, step=None):
        super().__init__(message)
        self.required = required
        self.available = available
        self.step = step


class NonUnitError(PreconditionError):
    pass


class NotRegularError(PreconditionError):
    pass


class RegularizationError(PreconditionError):
    pass


class SingularJacobianError(PreconditionError):
    pass


class VanishingMinorError(PreconditionError):
    pass


class CertificateError(PreconditionError):
    pass


class InexactDivisionError(PreconditionError):
    pass


class CongruenceError(PreconditionError):
    pass


class SimplicityError(PreconditionError):
    pass
