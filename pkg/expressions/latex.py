"""
LaTeX emitter. The output reads back through parse_scalar into the same tree.
"""
from functools import singledispatch

from .nodes import Abs, Add, BinaryOp, Constant, Div, Exp, Function, Mul, Neg, Pow, Sub, Var

# Binding strength, loosest first.
SUM, PRODUCT, UNARY, POWER, ATOM = range(5)

FUNCTION_COMMANDS = {'ln': '\\ln', 'sin': '\\sin', 'cos': '\\cos'}


def format_number(value):
    """Shortest decimal that round-trips, without a trailing ``.0``."""
    value = float(value)
    if value.is_integer() and abs(value) < 1e16:
        return str(int(value))
    return repr(value)


def wrap(text):
    return f'\\left({text}\\right)'


def precedence(expr):
    if isinstance(expr, (Add, Sub)):
        return SUM
    if isinstance(expr, Mul):
        return PRODUCT
    if isinstance(expr, Neg):
        return UNARY
    if isinstance(expr, Constant) and expr.value < 0:
        return UNARY
    if isinstance(expr, (Pow, Exp)):
        return POWER
    return ATOM


def _operand(expr, minimum):
    text = emit_latex(expr)
    return wrap(text) if precedence(expr) < minimum else text


@singledispatch
def emit_latex(expr):
    """Deterministic LaTeX for ``expr`` (no surrounding math delimiters)."""
    raise TypeError(f"Unsupported expression node: {type(expr).__name__}")


@emit_latex.register
def _(expr: Constant):
    return format_number(expr.value)


@emit_latex.register
def _(expr: Var):
    return expr.name


@emit_latex.register
def _(expr: Neg):
    return '-' + _operand(expr.child, UNARY)


@emit_latex.register
def _(expr: BinaryOp):
    if isinstance(expr, Div):
        return f'\\frac{{{emit_latex(expr.left)}}}{{{emit_latex(expr.right)}}}'
    if isinstance(expr, Mul):
        return _operand(expr.left, PRODUCT) + '\\cdot ' + _operand(expr.right, UNARY)
    symbol = '+' if isinstance(expr, Add) else '-'
    return _operand(expr.left, SUM) + symbol + _operand(expr.right, PRODUCT)


@emit_latex.register
def _(expr: Pow):
    # e^{..}^{..} would re-associate, so exponentials are wrapped as bases
    base = emit_latex(expr.base)
    if precedence(expr.base) <= POWER:
        base = wrap(base)
    return f'{base}^{{{emit_latex(expr.exponent)}}}'


@emit_latex.register
def _(expr: Function):
    inner = emit_latex(expr.child)
    if isinstance(expr, Exp):
        return f'e^{{{inner}}}'
    if isinstance(expr, Abs):
        return f'\\left|{inner}\\right|'
    return FUNCTION_COMMANDS[expr.op] + wrap(inner)
