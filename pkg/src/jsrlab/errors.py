"""Exception types shared across the package."""


class JsrlabError(Exception):
    """Base class for all jsrlab errors."""


class NonFiniteError(JsrlabError, ValueError):
    """A matrix or vector contains NaN or infinite entries."""


class DimensionError(JsrlabError, ValueError):
    """Shape mismatch or unsupported dimension."""


class IndexOutOfRangeError(JsrlabError, IndexError):
    """A word letter or state index falls outside [1, N]."""


class IllConditionedError(JsrlabError, ArithmeticError):
    """Numerical rank determination is ambiguous at the working tolerance."""


class NotPositiveDefiniteError(JsrlabError, ValueError):
    """A matrix expected to be SPD has a non-positive eigenvalue."""


class NumericalFailureError(JsrlabError, ArithmeticError):
    """A solve or verification exceeded its residual tolerance."""


class BudgetExceededError(JsrlabError, RuntimeError):
    """An enumeration exceeded its configured cap.

    Carries a ``partial`` attribute with the best result produced so far
    when the operation can return one.
    """

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class StateExplosionError(JsrlabError, RuntimeError):
    """The lifted state space N**m exceeds the configured cap."""


class DegenerateDistributionError(JsrlabError, ValueError):
    """A probability vector needed for sampling has (numerically) zero mass."""
