class ExpressionError(Exception):
    """Base class for scalar expression errors."""


class ParseError(ExpressionError):
    """A malformed input text, located at a character offset."""

    def __init__(self, position, message):
        self.position = position
        self.message = message
        super().__init__(f"{message} (at position {position})")


class ExpressionSyntaxError(ParseError):
    """Raised by parse_scalar on malformed input."""


class InvalidPoint(ExpressionError, ValueError):
    """Raised when a Point is built from non-finite coordinates."""
