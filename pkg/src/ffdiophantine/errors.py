"""Exception hierarchy shared by every module of the package."""


class FFDError(Exception):
    """Base class for all package errors."""


class DivisionByZero(FFDError, ZeroDivisionError):
    pass


class SpecMismatch(FFDError, ValueError):
    """Operands live over different finite fields."""


class InsufficientPrecision(FFDError):
    """A coefficient beyond the guaranteed precision was requested."""


class PreconditionViolated(FFDError, ValueError):
    pass


class CertificateFailed(FFDError):
    pass


class DegenerateQuadratic(FFDError, ValueError):
    pass


class InseparableQuadratic(FFDError, ValueError):
    pass


class SearchExhausted(FFDError):
    pass


class InternalInvariantViolated(FFDError, AssertionError):
    pass


class ThresholdViolated(FFDError, ValueError):
    pass


class EnumerationTooLarge(FFDError, ValueError):
    pass


class HypothesisViolated(FFDError):
    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class SideConditionViolated(FFDError):
    pass


class NotApplicable(FFDError, ValueError):
    pass


class RelationNotFound(FFDError):
    """No relation exists inside the searched bounds (not a transcendence proof)."""


class AutomatonFormatError(FFDError, ValueError):
    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line
