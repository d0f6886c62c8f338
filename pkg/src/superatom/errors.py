"""Exception types shared across the package.

The CLI maps these onto exit codes: ConfigError -> 2, NumericFailure -> 3,
OS/IO errors -> 4.
"""


class SuperatomError(Exception):
    """Base class for all package errors."""


class ConfigError(SuperatomError):
    """Invalid configuration, parameters or preconditions.

    ``key`` optionally names the offending config entry (dotted path).
    """

    def __init__(self, message: str, key: str | None = None):
        super().__init__(message)
        self.key = key


class ModelError(SuperatomError):
    """A physics precondition is violated (undefined angle, zero detuning, ...)."""


class NumericFailure(SuperatomError):
    """Integration diagnostics exceeded tolerance (norm/trace drift, negativity)."""
