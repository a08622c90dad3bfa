"""Exception hierarchy shared by every module."""


class DssGraphError(Exception):
    """Base class for all library errors."""


class GraphFormatError(DssGraphError, ValueError):
    """Malformed input text. ``lineno`` is 1-based, or None when unknown."""

    def __init__(self, message: str, lineno: int | None = None):
        self.lineno = lineno
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)


class DomainError(DssGraphError, ValueError):
    """An argument is outside the domain of the operation."""


class ContractError(DssGraphError, RuntimeError):
    """An operation was called on a state it does not accept."""
