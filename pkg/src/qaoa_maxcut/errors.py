"""Exception types shared across the package."""


class ValidationError(ValueError):
    """Raised when arguments violate a documented precondition."""


class CapacityError(ValidationError):
    """Raised when a problem is too large for dense enumeration or simulation."""


class ParseError(ValueError):
    """Raised for malformed graph, circuit or checkpoint files."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
