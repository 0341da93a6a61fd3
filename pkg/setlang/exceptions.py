class SetLanguageError(Exception):
    """Base class for set-language errors."""


class SetSyntaxError(SetLanguageError):
    """A malformed set expression, located at a character offset."""

    def __init__(self, position, message):
        self.position = position
        self.message = message
        super().__init__(f"{message} (at position {position})")


class StackUnderflow(SetSyntaxError):
    def __init__(self, position):
        super().__init__(position, "Operator is missing an operand")


class InvalidSymbol(SetSyntaxError):
    def __init__(self, position, char):
        self.char = char
        super().__init__(position, f"Invalid symbol {char!r}")


class LeftoverOperands(SetSyntaxError):
    """A postfix expression left more than one tree on the stack."""

    def __init__(self, count, position):
        self.count = count
        super().__init__(position, f"{count} operands left on the stack, expected 1")


class UnresolvedName(SetLanguageError, KeyError):
    def __init__(self, name):
        self.name = name
        super().__init__(name)

    def __str__(self):
        return f"Set '{self.name}' has no definition"


class UnsupportedNode(SetLanguageError, TypeError):
    """The exporter cannot write this kind of region."""


class FileFormatError(SetLanguageError):
    """A program file is malformed; ``line`` is 1-based (0 for the whole file)."""

    def __init__(self, line, message):
        self.line = line
        self.message = message
        super().__init__(f"line {line}: {message}")


class TranscriptError(FileFormatError):
    """An appendix transcript is malformed."""
