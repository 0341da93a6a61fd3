"""
Postfix and infix readers for set expressions.

``&`` is intersection, ``|`` union and ``!`` negation; names are single
letters. Whitespace is ignored by both readers.
"""
import logging

from .exceptions import InvalidSymbol, LeftoverOperands, SetSyntaxError, StackUnderflow
from .nodes import PROGRAM_ALPHABET, And, Not, Or, VarRef

logger = logging.getLogger(__name__)

BINARY = {'&': And, '|': Or}


def parse_postfix(text, alphabet=PROGRAM_ALPHABET, trace=None):
    """
    Evaluate a postfix string on a stack of trees.

    The first operand popped by a binary operator becomes its right child.
    ``trace`` is called with ``(position, stack)`` before each symbol.
    """
    stack = []
    for position, char in enumerate(text):
        if char.isspace():
            continue
        if trace is not None:
            trace(position, list(stack))
        if char in alphabet:
            stack.append(VarRef(char))
        elif char == '!':
            if not stack:
                raise StackUnderflow(position)
            stack.append(Not(stack.pop()))
        elif char in BINARY:
            if len(stack) < 2:
                raise StackUnderflow(position)
            right = stack.pop()
            left = stack.pop()
            stack.append(BINARY[char](left, right))
        else:
            raise InvalidSymbol(position, char)
    if not stack:
        raise SetSyntaxError(len(text), "Empty set expression")
    if len(stack) > 1:
        raise LeftoverOperands(len(stack), len(text))
    logger.debug("Parsed postfix set expression %r", text)
    return stack[0]


class InfixParser:
    """
    Recursive descent over::

        union := inter ('|' inter)*
        inter := unary ('&' unary)*
        unary := '!' unary | name | '(' union ')'
    """

    def __init__(self, text, alphabet=PROGRAM_ALPHABET):
        self.text = text
        self.alphabet = alphabet
        self.symbols = [(i, c) for i, c in enumerate(text) if not c.isspace()]
        self.symbols.append((len(text), ''))
        self.index = 0

    @property
    def current(self):
        return self.symbols[self.index]

    def advance(self):
        symbol = self.symbols[self.index]
        self.index += 1
        return symbol

    def parse(self):
        if len(self.symbols) == 1:
            raise SetSyntaxError(0, "Empty set expression")
        expr = self.union()
        position, char = self.current
        if char:
            raise SetSyntaxError(position, f"Unexpected {char!r}")
        return expr

    def union(self):
        node = self.inter()
        while self.current[1] == '|':
            self.advance()
            node = Or(node, self.inter())
        return node

    def inter(self):
        node = self.unary()
        while self.current[1] == '&':
            self.advance()
            node = And(node, self.unary())
        return node

    def unary(self):
        position, char = self.advance()
        if char == '!':
            return Not(self.unary())
        if char == '(':
            inner = self.union()
            closing, found = self.advance()
            if found != ')':
                raise SetSyntaxError(closing, "Expected ')'")
            return inner
        if char and char in self.alphabet:
            return VarRef(char)
        if not char:
            raise SetSyntaxError(position, "Unexpected end of input")
        raise SetSyntaxError(position, f"Unexpected {char!r}")


def parse_infix(text, alphabet=PROGRAM_ALPHABET):
    """Parse infix set notation; ``!`` binds tightest, ``|`` loosest."""
    expr = InfixParser(text, alphabet).parse()
    logger.debug("Parsed infix set expression %r", text)
    return expr
