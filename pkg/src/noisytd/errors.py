"""Exception hierarchy shared by every module."""


class NoisyTDError(Exception):
    """Base class for all package errors."""


class NonNormalized(NoisyTDError, ValueError):
    pass


class DuplicatePoint(NoisyTDError, ValueError):
    pass


class DimMismatch(NoisyTDError, ValueError):
    pass


class ZeroWeight(NoisyTDError, ArithmeticError):
    """Raised when conditional moments are requested on a zero-mass view."""


class OutOfRange(NoisyTDError, ValueError):
    pass


class EmptyHypothesisClass(NoisyTDError, ValueError):
    pass


class InfeasibleParameters(NoisyTDError, ValueError):
    pass


class NotMonotone(NoisyTDError, ValueError):
    pass


class ExplosionGuard(NoisyTDError, RuntimeError):
    """Enumeration would exceed the configured cap."""


class GenerationFailed(NoisyTDError, RuntimeError):
    pass


class ConfigError(NoisyTDError, ValueError):
    pass


class InvariantFailure(NoisyTDError, AssertionError):
    pass


class EmptyReport(NoisyTDError, ValueError):
    pass
