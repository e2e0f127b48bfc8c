"""Exception types shared across the package."""


class ResourceLimitError(RuntimeError):
    """A requested computation exceeds a configured size/feasibility bound."""


class ComputationFailedError(RuntimeError):
    """A computation ran but could not certify its result.

    Carries the best available value in ``best_value`` when one exists.
    """

    def __init__(self, message, best_value=None, error_estimate=None):
        super().__init__(message)
        self.best_value = best_value
        self.error_estimate = error_estimate
