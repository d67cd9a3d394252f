"""Exception types shared across the package."""


class ParameterError(ValueError):
    """An argument violates a documented precondition."""


class DomainError(ValueError):
    """An input value lies outside the mathematical domain of the operation."""


class AliasingError(ParameterError):
    """Requested angular orders exceed what the angular grid can resolve."""


class FormatError(ValueError):
    """Malformed binary input. Carries the byte offset where parsing failed."""

    def __init__(self, message: str, offset: int | None = None):
        if offset is not None:
            message = f"{message} (byte offset {offset})"
        super().__init__(message)
        self.offset = offset
