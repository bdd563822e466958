"""Exception types shared across the package."""


class AremosError(Exception):
    """Base class for all errors raised by this package."""


class EstimationError(AremosError, ValueError):
    """Not enough data to estimate the requested quantity."""


class DegenerateSeriesError(EstimationError):
    """Series has zero variance, so autocorrelation-based fits are undefined."""


class InsufficientHistoryError(AremosError, ValueError):
    """Fewer past values than the model or window requires."""


class ConvergenceError(AremosError, RuntimeError):
    """Optimizer stopped before meeting its tolerance.

    ``last_iterate`` holds the parameter vector it stopped at and
    ``objective`` the objective value there.
    """

    def __init__(self, message, last_iterate=None, objective=None):
        super().__init__(message)
        self.last_iterate = last_iterate
        self.objective = objective


class DegenerateDifferentialError(AremosError, ValueError):
    """Score differential has zero long-run variance."""


class ValidationError(AremosError, ValueError):
    """Input data or configuration violates the dataset contract."""
