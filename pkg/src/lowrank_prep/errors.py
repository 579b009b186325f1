"""Exception types shared across the package."""


class InvalidInput(ValueError):
    """Raised when an argument violates an operation's precondition."""


class ParseError(ValueError):
    """Raised for malformed or unsupported QASM text."""

    def __init__(self, lineno: int, message: str):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


class ResourceLimit(RuntimeError):
    """Raised when an exhaustive routine is asked for a problem that is too large."""
