"""Exception types shared across the package."""


class NumericalFailure(RuntimeError):
    """A solver or iteration produced unusable numbers.

    Carries the failing step (or iterate) index and, for linear solves,
    the residual that triggered the failure.
    """

    def __init__(self, message, step=None, residual=None):
        super().__init__(message)
        self.step = step
        self.residual = residual


class ConfigError(ValueError):
    """A run configuration failed validation; ``key`` names the entry."""

    def __init__(self, key, message):
        super().__init__(f"config error at '{key}': {message}")
        self.key = key
