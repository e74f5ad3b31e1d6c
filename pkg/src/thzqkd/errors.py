"""Exception hierarchy shared across the package.

Two families matter to callers: configuration/validation problems
(:class:`ConfigError`, also raised as plain ``ValueError`` by low-level
operations) and numerical failures on otherwise valid inputs
(:class:`NumericsError`).  The CLI maps them to exit codes 1 and 2.
"""


class ThzQkdError(Exception):
    """Base class for all package-specific errors."""


class ConfigError(ThzQkdError, ValueError):
    """Invalid configuration or parameter outside its documented domain."""


class NumericsError(ThzQkdError, RuntimeError):
    """Numerical failure: bad bracket, unphysical state, opaque channel."""


class BracketError(NumericsError):
    """Root-finding bracket does not straddle the target value."""

    def __init__(self, message, rate_lo=None, rate_hi=None):
        super().__init__(message)
        self.rate_lo = rate_lo
        self.rate_hi = rate_hi


class UnphysicalChannelError(NumericsError):
    """Channel matrix violates the passive-channel model (T > 1 or all-zero)."""


class UnphysicalStateError(NumericsError):
    """Covariance matrix violates the uncertainty principle."""
