"""Exception hierarchy shared by all muchan modules."""


class MuchanError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(MuchanError, ValueError):
    """An input value violates a structural invariant or a precondition.

    Raised for non-PSD Choi matrices, non-trace-preserving Kraus lists,
    shape mismatches, unmet theorem hypotheses (refusals), and similar.
    """


class NumericalError(MuchanError, RuntimeError):
    """A numerical procedure failed to meet its certified tolerance.

    Raised when a factorization does not converge, a constructed witness
    misses its residual bound, or a derived unitary fails unitarity
    beyond the allowed slack.  Never used for a plain "not found".
    """


class FileFormatError(MuchanError, ValueError):
    """A serialized object is malformed or has an unsupported version."""

    def __init__(self, message: str, path: str | None = None):
        super().__init__(message)
        self.path = path
