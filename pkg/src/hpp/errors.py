"""Shared exception types.

The command line maps these onto distinct exit codes, so library code should
raise the most specific one that applies rather than a bare RuntimeError.
"""


class GuardExceededError(RuntimeError):
    """A resource guard tripped (field too large, enumeration budget, matrix dimension)."""


class InvariantViolationError(RuntimeError):
    """An internal consistency check failed; results cannot be trusted."""


class RecoveryError(RuntimeError):
    """Identification failed after all amplification rounds."""
