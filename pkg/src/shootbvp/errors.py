"""Exception types raised across the package."""


class ShootingError(Exception):
    """Base class for all errors raised by this package."""


class DimensionMismatchError(ShootingError, ValueError):
    """A vector or matrix argument has the wrong shape."""


class IndexOutOfRangeError(ShootingError, IndexError):
    """A 1-based state index falls outside 1..n."""


class SingularMatrixError(ShootingError):
    """LU factorization met a pivot below the rank-deficiency threshold."""


class IntegrationError(ShootingError):
    """Base class for initial value integration failures.

    Carries ``t``, the time at which integration had to give up.
    """

    def __init__(self, message, t=None):
        super().__init__(message)
        self.t = t


class StepSizeUnderflowError(IntegrationError):
    """Error control pushed the step size below the configured minimum."""


class MaxStepsExceededError(IntegrationError):
    """The step budget was exhausted before reaching the end time."""


class NonFiniteStateError(IntegrationError):
    """The right-hand side returned NaN or infinity."""


class TimeOutOfRangeError(ShootingError, ValueError):
    """Interpolation was requested outside a trajectory's time span."""


class NoReferenceError(ShootingError, LookupError):
    """The named problem has no closed-form reference solution."""


class NotConvergedError(ShootingError):
    """A scalar root search failed to reach its residual target."""
