"""Shared exception types.

The CLI maps ValidationError to exit code 1 and ResourceRefusal to exit
code 2; a refusal message always names the bound that was exceeded.
"""


class ValidationError(ValueError):
    """Input violates a documented precondition."""


class ResourceRefusal(RuntimeError):
    """Computation refused because a configured size bound was exceeded."""

    def __init__(self, message, *, bound=None, requested=None):
        super().__init__(message)
        self.bound = bound
        self.requested = requested
