"""Exception taxonomy for the polyweib package.

Two broad families matter to callers: input problems (bad arguments, bad
files, bad parameter domains) and numerical problems (singular systems,
failed cross-checks, non-monotone models). The CLI maps the first family to
exit code 2 and the second to exit code 3.
"""


class PolyweibError(Exception):
    """Base class for every error raised by this package."""


class DomainError(PolyweibError, ValueError):
    """An argument lies outside its mathematical domain."""


class InputError(PolyweibError, ValueError):
    """Malformed or unusable input data (files, vectors, specs)."""


class InsufficientDataError(InputError):
    """Fewer data points than the requested fit needs."""


class UnsupportedOperationError(PolyweibError, ValueError):
    """The requested operation is not defined for this object."""


class NumericalError(PolyweibError, ArithmeticError):
    """Base class for runtime numerical failures."""


class SingularityError(NumericalError):
    """A linear system is singular to working precision.

    Carries the condition estimate observed at the point of failure
    (may be ``inf``).
    """

    def __init__(self, message: str, condition_estimate: float = float("inf")):
        super().__init__(message)
        self.condition_estimate = condition_estimate


class ConditioningError(NumericalError):
    """A solve completed but could not meet its accuracy contract.

    ``residual`` is the relative residual actually achieved and
    ``condition_estimate`` the estimated condition number of the system.
    """

    def __init__(self, message: str, residual: float = float("nan"),
                 condition_estimate: float = float("nan")):
        super().__init__(message)
        self.residual = residual
        self.condition_estimate = condition_estimate


class IntegrityError(NumericalError):
    """Two independent computations of the same quantity disagree."""

    def __init__(self, message: str, first: float = float("nan"),
                 second: float = float("nan")):
        super().__init__(message)
        self.first = first
        self.second = second


class NonMonotoneError(NumericalError):
    """A model required to be strictly increasing is not.

    ``interval`` is a (u_lo, u_hi) subinterval where the derivative was
    found non-positive.
    """

    def __init__(self, message: str, interval=None):
        super().__init__(message)
        self.interval = interval


class InfiniteDerivativeError(NumericalError):
    """The quantile derivative diverges at the requested point."""


class OutOfRangeWarning(UserWarning):
    """Evaluation outside the model's validated probability range."""
