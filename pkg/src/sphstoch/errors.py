"""Exception types shared across the library and mapped to CLI exit codes."""


class ConfigError(ValueError):
    """Invalid configuration or incompatible options (exit code 2)."""


class ParseError(ValueError):
    """Malformed input file (exit code 3). Carries a location when known."""

    def __init__(self, message, *, offset=None, line=None):
        loc = ""
        if offset is not None:
            loc = f" (byte offset {offset})"
        elif line is not None:
            loc = f" (line {line})"
        super().__init__(message + loc)
        self.offset = offset
        self.line = line


class ResolutionError(ValueError):
    """Grid too small for the requested band limit (exit code 4)."""


class VerificationFailure(RuntimeError):
    """One or more verification criteria failed (exit code 5)."""


class ConventionError(ValueError):
    """Mixed or wrong Euler-angle conventions."""


class ConsistencyError(ValueError):
    """Paired inputs violate a required pointwise relation."""


class SampleSizeError(ValueError):
    """Too few realizations for the requested statistic."""


class GridLookupError(ValueError):
    """Requested point does not coincide with a grid node."""
