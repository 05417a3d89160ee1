"""Exception types shared across the package."""


class ValidationError(ValueError):
    """Input fails a structural or metric requirement of the operation."""

    def __init__(self, message, violations=None):
        super().__init__(message)
        self.violations = list(violations) if violations else []


class SizeError(RuntimeError):
    """Instance exceeds the exact-computation cap for the requested routine.

    The message names the cap and, where one exists, the approximate or
    Monte Carlo fallback.
    """
