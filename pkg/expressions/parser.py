"""
Recursive-descent parser for scalar expressions.

Grammar (ASCII, with the LaTeX spellings accepted as synonyms):

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := '-' unary | power
    power  := 'e' '^' unary | atom ('^' unary)?
    atom   := number | 'x' | 'y' | func group | group
            | '\\frac' group group | '\\left|' expr '\\right|'
    group  := '(' expr ')' | '{' expr '}'

``\\left(`` and ``\\right)`` are parentheses, ``\\cdot`` is ``*``. Functions are
exp, ln, sin, cos and abs (``\\exp``, ``\\ln``, ``\\sin``, ``\\cos`` in LaTeX).
"""
import logging
import re
from dataclasses import dataclass

from .exceptions import ExpressionSyntaxError
from .nodes import FUNCTIONS, Abs, Add, Constant, Div, Exp, Mul, Neg, Pow, Sub, Var

logger = logging.getLogger(__name__)

NUMBER_RE = re.compile(r'(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?')
NAME_RE = re.compile(r'[A-Za-z]+')
COMMAND_RE = re.compile(r'\\([A-Za-z]+)')

LATEX_COMMANDS = {
    'cdot': ('op', '*'),
    'times': ('op', '*'),
    'frac': ('frac', 'frac'),
    'exp': ('func', 'exp'),
    'ln': ('func', 'ln'),
    'sin': ('func', 'sin'),
    'cos': ('func', 'cos'),
}

OPENERS = {'(': ')', '{': '}'}


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    position: int


def tokenize(text):
    """Split ``text`` into tokens, recording the offset of each one."""
    tokens = []
    index = 0
    while index < len(text):
        char = text[index]
        if char.isspace():
            index += 1
            continue
        if not char.isascii():
            raise ExpressionSyntaxError(index, f"Non-ASCII character {char!r}")
        if char.isdigit() or (char == '.' and NUMBER_RE.match(text, index)):
            match = NUMBER_RE.match(text, index)
            tokens.append(Token('number', match.group(0), index))
            index = match.end()
            continue
        if char.isalpha():
            match = NAME_RE.match(text, index)
            tokens.append(Token('name', match.group(0), index))
            index = match.end()
            continue
        if char in '+-*/^':
            tokens.append(Token('op', char, index))
            index += 1
            continue
        if char in '(){}':
            tokens.append(Token(char, char, index))
            index += 1
            continue
        if char == '\\':
            index = _tokenize_command(text, index, tokens)
            continue
        raise ExpressionSyntaxError(index, f"Unexpected character {char!r}")
    tokens.append(Token('end', '', len(text)))
    return tokens


def _tokenize_command(text, index, tokens):
    match = COMMAND_RE.match(text, index)
    if not match:
        raise ExpressionSyntaxError(index, "Expected a command name after '\\'")
    name = match.group(1)
    end = match.end()
    if name in ('left', 'right'):
        delimiter = text[end:end + 1]
        if delimiter == '|':
            tokens.append(Token(f'{name}|', f'\\{name}|', index))
        elif name == 'left' and delimiter == '(':
            tokens.append(Token('(', '(', index))
        elif name == 'right' and delimiter == ')':
            tokens.append(Token(')', ')', index))
        else:
            raise ExpressionSyntaxError(end, f"Unsupported delimiter after \\{name}")
        return end + 1
    if name not in LATEX_COMMANDS:
        raise ExpressionSyntaxError(index, f"Unknown command \\{name}")
    kind, value = LATEX_COMMANDS[name]
    tokens.append(Token(kind, value, index))
    return end


class Parser:
    """Parses one token stream into a ScalarExpr."""

    def __init__(self, text):
        self.text = text
        self.tokens = tokenize(text)
        self.index = 0

    @property
    def current(self):
        return self.tokens[self.index]

    def advance(self):
        token = self.tokens[self.index]
        self.index += 1
        return token

    def expect(self, kind, description):
        token = self.current
        if token.kind != kind:
            raise ExpressionSyntaxError(token.position, f"Expected {description}")
        return self.advance()

    def parse(self):
        expr = self.expr()
        if self.current.kind != 'end':
            raise ExpressionSyntaxError(
                self.current.position, f"Unexpected {self.current.text!r}"
            )
        return expr

    def expr(self):
        node = self.term()
        while self.current.kind == 'op' and self.current.text in '+-':
            operator = self.advance().text
            right = self.term()
            node = Add(node, right) if operator == '+' else Sub(node, right)
        return node

    def term(self):
        node = self.unary()
        while self.current.kind == 'op' and self.current.text in '*/':
            operator = self.advance().text
            right = self.unary()
            node = Mul(node, right) if operator == '*' else Div(node, right)
        return node

    def unary(self):
        if self.current.kind == 'op' and self.current.text == '-':
            self.advance()
            return Neg(self.unary())
        return self.power()

    def power(self):
        token = self.current
        if token.kind == 'name' and token.text == 'e':
            self.advance()
            if not (self.current.kind == 'op' and self.current.text == '^'):
                raise ExpressionSyntaxError(self.current.position, "Expected '^' after e")
            self.advance()
            return Exp(self.unary())
        base = self.atom()
        if self.current.kind == 'op' and self.current.text == '^':
            self.advance()
            return Pow(base, self.unary())
        return base

    def atom(self):
        token = self.current
        if token.kind == 'number':
            self.advance()
            return Constant(float(token.text))
        if token.kind == 'name':
            return self.name()
        if token.kind == 'func':
            self.advance()
            return FUNCTIONS[token.text](self.group())
        if token.kind == 'frac':
            self.advance()
            numerator = self.group()
            return Div(numerator, self.group())
        if token.kind == 'left|':
            self.advance()
            inner = self.expr()
            self.expect('right|', "'\\right|'")
            return Abs(inner)
        if token.kind in OPENERS:
            return self.group()
        if token.kind == 'end':
            raise ExpressionSyntaxError(token.position, "Unexpected end of input")
        raise ExpressionSyntaxError(token.position, f"Unexpected {token.text!r}")

    def name(self):
        token = self.advance()
        if token.text in ('x', 'y'):
            return Var(token.text)
        if token.text in FUNCTIONS:
            return FUNCTIONS[token.text](self.group())
        raise ExpressionSyntaxError(token.position, f"Unknown name {token.text!r}")

    def group(self):
        token = self.current
        if token.kind not in OPENERS:
            raise ExpressionSyntaxError(token.position, "Expected '(' or '{'")
        self.advance()
        inner = self.expr()
        self.expect(OPENERS[token.kind], repr(OPENERS[token.kind]))
        return inner


def parse_scalar(text):
    """Parse ASCII (or LaTeX-flavoured) math in x and y into a ScalarExpr."""
    if not text or not text.strip():
        raise ExpressionSyntaxError(0, "Empty expression")
    expr = Parser(text).parse()
    logger.debug("Parsed scalar expression %r", text)
    return expr
