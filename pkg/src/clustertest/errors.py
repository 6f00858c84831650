class GraphFormatError(ValueError):
    """Raised when an edge-list file cannot be parsed or violates the degree bound."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class GuardExceeded(RuntimeError):
    """An exact (dense or exponential) computation was refused because the input is too large."""
