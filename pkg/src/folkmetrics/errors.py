"""Exception types shared across the package."""


class FolkmetricsError(Exception):
    """Base class for all folkmetrics errors."""


class FormatError(FolkmetricsError):
    """Input data does not match the declared format (e.g. wrong delimiter)."""


class DomainError(FolkmetricsError):
    """Arguments are outside the domain of the requested computation."""


class NotFoundError(FolkmetricsError):
    """A referenced user, item, tag, or annotation does not exist."""


class UndefinedCorrelationError(DomainError):
    """Correlation is undefined (constant input or fewer than two points)."""
