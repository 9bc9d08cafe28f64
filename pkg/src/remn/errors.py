"""Exception types shared across the package.

The CLI maps these to exit codes: argument errors exit with 2, state errors with 3.
"""


class ArgumentError(ValueError):
    """An input had the wrong shape, range or type."""


class StateError(RuntimeError):
    """An operation was called on an object in an unusable state."""
