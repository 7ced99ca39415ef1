"""Exception hierarchy shared by all modules."""


class TentsioError(Exception):
    """Base class for every error raised by this package."""


class ConfigurationError(TentsioError, ValueError):
    """Invalid grid or experiment configuration."""


class SamplingError(TentsioError, ValueError):
    """A sampled function produced a non-finite value."""


class ParameterError(TentsioError, ValueError):
    """A numerical parameter lies outside the admissible range."""


class NumericRangeError(TentsioError, ArithmeticError):
    """Overflow or underflow in weights or intermediate sums."""


class DomainError(TentsioError, ValueError):
    """Mismatched grids, empty supports or time ranges that do not line up."""


class UnsupportedOperationError(TentsioError, NotImplementedError):
    """The model cannot perform the requested functional calculus."""


class NearSingularityError(TentsioError, ArithmeticError):
    """A resolvent parameter lies too close to the spectrum."""


class ResourceError(TentsioError, MemoryError):
    """A dense computation would exceed the configured size cap."""


class FitUnderdeterminedError(TentsioError, ValueError):
    """Too few points in the asymptotic regime to fit a decay order."""


class TruncationWarning(UserWarning):
    """An integral was cut at the top of the time grid."""


class ExperimentError(TentsioError):
    """A module error raised inside an experiment case, tagged with the case parameters."""
