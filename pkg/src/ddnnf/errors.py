"""Common exception base so the CLI can map domain errors to exit code 1."""


class ToolkitError(Exception):
    """Base class for all domain errors raised by this package."""


class OracleBoundError(ToolkitError):
    """A brute-force check was asked to enumerate too many variables."""
