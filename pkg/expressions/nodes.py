"""
Immutable AST for real-valued functions of the two variables x and y.
"""
import math
from dataclasses import dataclass

from .exceptions import InvalidPoint


# ============================================================================
# Points
# ============================================================================

@dataclass(frozen=True)
class Point:
    """A point of the plane."""

    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise InvalidPoint(f"Point coordinates must be finite, got ({self.x}, {self.y})")

    def shifted(self, dx=0.0, dy=0.0):
        return Point(self.x + dx, self.y + dy)


# ============================================================================
# Expression nodes
# ============================================================================

class ScalarExpr:
    """Base class of every expression node."""

    __slots__ = ()


@dataclass(frozen=True)
class Constant(ScalarExpr):
    value: float


@dataclass(frozen=True)
class Var(ScalarExpr):
    name: str

    def __post_init__(self):
        if self.name not in ('x', 'y'):
            raise ValueError(f"Only x and y are variables, got {self.name!r}")


@dataclass(frozen=True)
class Neg(ScalarExpr):
    child: ScalarExpr


@dataclass(frozen=True)
class BinaryOp(ScalarExpr):
    left: ScalarExpr
    right: ScalarExpr

    op = None


@dataclass(frozen=True)
class Add(BinaryOp):
    op = 'add'


@dataclass(frozen=True)
class Sub(BinaryOp):
    op = 'sub'


@dataclass(frozen=True)
class Mul(BinaryOp):
    op = 'mul'


@dataclass(frozen=True)
class Div(BinaryOp):
    op = 'div'


@dataclass(frozen=True)
class Pow(ScalarExpr):
    base: ScalarExpr
    exponent: ScalarExpr


@dataclass(frozen=True)
class Function(ScalarExpr):
    """A named one-argument function."""

    child: ScalarExpr

    op = None


@dataclass(frozen=True)
class Exp(Function):
    op = 'exp'


@dataclass(frozen=True)
class Ln(Function):
    op = 'ln'


@dataclass(frozen=True)
class Sin(Function):
    op = 'sin'


@dataclass(frozen=True)
class Cos(Function):
    op = 'cos'


@dataclass(frozen=True)
class Abs(Function):
    op = 'abs'


FUNCTIONS = {cls.op: cls for cls in (Exp, Ln, Sin, Cos, Abs)}


def children(expr):
    """Return the direct sub-expressions of a node."""
    if isinstance(expr, BinaryOp):
        return (expr.left, expr.right)
    if isinstance(expr, Pow):
        return (expr.base, expr.exponent)
    if isinstance(expr, (Neg, Function)):
        return (expr.child,)
    return ()


def free_variables(expr):
    """Return the set of variable names the expression depends on."""
    if isinstance(expr, Var):
        return {expr.name}
    names = set()
    for child in children(expr):
        names |= free_variables(child)
    return names
