"""Exception taxonomy shared by every module.

The CLI maps the three top-level categories onto exit codes:
ConfigError -> 2, DataError -> 3, NumericalError -> 4.
"""


class AvsfuseError(Exception):
    """Base class for all toolkit errors."""


class ConfigError(AvsfuseError):
    """Invalid configuration or parameter combination."""


class DataError(AvsfuseError):
    """Problem with input data or files."""


class FormatError(DataError):
    """Malformed file content."""


class BadMagicError(FormatError):
    """File does not start with the expected magic bytes."""


class TruncatedFileError(FormatError):
    """File payload is shorter than its header declares."""


class ValidationError(DataError):
    """Numeric content violates a documented invariant."""


class NumericalError(AvsfuseError):
    """Numerical failure during computation, e.g. no valid decoding path
    or a non-finite training loss."""
