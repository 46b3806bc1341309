"""Exception types shared across the toolkit.

The CLI maps these onto exit codes: ConfigError -> 1, DataError -> 2,
ConvergenceError -> 3. Plain ValueError marks a programming/argument error
and is not translated.
"""


class MemtopicsError(Exception):
    """Base class for toolkit errors."""


class ConfigError(MemtopicsError):
    """Invalid configuration file, flag value, or flag combination."""


class DataError(MemtopicsError):
    """Unreadable, malformed, or degenerate input data."""


class ConvergenceError(MemtopicsError):
    """An iterative numeric routine exhausted its iteration budget."""
