"""Exception types shared across the package."""


class WeylAuditError(Exception):
    """Base class for all package-specific errors."""


class ValidationError(WeylAuditError, ValueError):
    """Input data violates a documented precondition or invariant."""


class CompletenessError(WeylAuditError):
    """A query reaches beyond the completeness bound of a spectrum."""


class ParseError(WeylAuditError, ValueError):
    """Malformed input file."""

    def __init__(self, message, line_number=None):
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)
        self.line_number = line_number


class ResourceBudgetError(WeylAuditError):
    """An enumeration would exceed its configured point budget."""


class KernelBuildError(WeylAuditError):
    """A kernel invariant failed during construction."""


class OrderError(WeylAuditError, ValueError):
    """Unsupported Riesz order for the requested operation."""
