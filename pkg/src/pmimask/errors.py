"""Exception hierarchy shared by the library, CLI and service.

Exit-code mapping for the CLI: UsageError and subclasses map to exit
code 2, DataFormatError and subclasses to exit code 3.
"""


class PmimaskError(Exception):
    """Base class for all errors raised by this package."""

    exit_code = 1


class UsageError(PmimaskError, ValueError):
    """Caller violated an operation's contract (bad argument, bad state)."""

    exit_code = 2


class ConfigurationError(UsageError):
    """Inconsistent configuration, e.g. merging stats built with different
    tokenizer flags, or drawing a random replacement from an empty vocabulary."""


class DataFormatError(PmimaskError):
    """Input data could not be parsed."""

    exit_code = 3


class CorpusFormatError(DataFormatError):
    """Malformed corpus record (bad UTF-8, bad JSON, missing TSV field)."""


class StatsFormatError(DataFormatError):
    """Stats file is structurally invalid (bad magic, malformed section)."""


class StatsVersionError(StatsFormatError):
    """Stats file declares an unsupported format version."""


class StatsChecksumError(StatsFormatError):
    """Stats file CRC32 trailer does not match the file contents."""


class StatsTruncatedError(StatsFormatError):
    """Stats file ends before its CRC32 trailer."""
