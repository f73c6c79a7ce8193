"""Exception types shared across the package.

The CLI maps these onto exit codes: ConfigError -> 2, ResourceGuardError -> 3.
Verification gates that fail do not raise; they return a report and the CLI
exits 4.
"""


class MingapsError(Exception):
    """Base class for all package errors."""


class ConfigError(MingapsError, ValueError):
    """Invalid parameter, malformed input file, or failed validation."""


class ResourceGuardError(MingapsError, RuntimeError):
    """A size guard tripped; the message names the guard and suggests a remedy."""
