"""Shared exception types.

The command-line layer maps these onto exit codes, and the service layer
onto HTTP statuses, so everything below raises one of them rather than a
bare ValueError.
"""


class UrnkitError(Exception):
    """Base class for all package-specific errors."""


class ValidationError(UrnkitError):
    """Inputs failed structural or range validation."""


class EstimationError(UrnkitError):
    """Parameter estimation could not produce a usable result."""


class OracleMismatch(UrnkitError):
    """Two computation routes disagreed beyond the requested tolerance."""
