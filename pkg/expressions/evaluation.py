"""
Evaluation of scalar expressions.

One tree walk serves two number systems: plain numpy arrays (values) and
forward-mode dual numbers (values with exact partial derivatives in x and y).
Out-of-domain operations produce NaN instead of raising.
"""
from dataclasses import dataclass
from functools import singledispatch

import numpy as np

from regionkit.conf import region_setting

from .nodes import BinaryOp, Constant, Function, Neg, Pow, Var


# ============================================================================
# Real-valued primitives (NaN policy)
# ============================================================================

def real_power(base, exponent):
    """
    Real power with plotting-tool semantics.

    A negative base is only allowed with an integer exponent (within
    INTEGER_EXPONENT_TOL); zero raised to a negative power is undefined.
    """
    base = np.asarray(base, dtype=float)
    exponent = np.asarray(exponent, dtype=float)
    rounded = np.round(exponent)
    integral = np.abs(exponent - rounded) <= region_setting('INTEGER_EXPONENT_TOL')
    with np.errstate(all='ignore'):
        result = np.power(base, np.where(integral & (base < 0), rounded, exponent))
    undefined = ((base < 0) & ~integral) | ((base == 0) & (exponent < 0))
    return np.where(undefined, np.nan, result)


def safe_divide(numerator, denominator):
    with np.errstate(all='ignore'):
        quotient = np.divide(numerator, denominator)
    return np.where(np.asarray(denominator) == 0, np.nan, quotient)


def safe_log(value):
    value = np.asarray(value, dtype=float)
    with np.errstate(all='ignore'):
        return np.where(value > 0, np.log(value), np.nan)


def _scaled(factor, derivative):
    # a zero derivative stays zero even where the factor blows up
    return np.where(derivative == 0, 0.0, factor * derivative)


# ============================================================================
# Dual numbers
# ============================================================================

@dataclass(frozen=True)
class Dual:
    """A value with its partial derivatives along x and y."""

    value: object
    dx: object
    dy: object

    @classmethod
    def constant(cls, value):
        return cls(np.float64(value), np.float64(0.0), np.float64(0.0))

    def _chain(self, value, factor):
        return Dual(value, factor * self.dx, factor * self.dy)

    def __neg__(self):
        return Dual(-self.value, -self.dx, -self.dy)

    def __add__(self, other):
        return Dual(self.value + other.value, self.dx + other.dx, self.dy + other.dy)

    def __sub__(self, other):
        return Dual(self.value - other.value, self.dx - other.dx, self.dy - other.dy)

    def __mul__(self, other):
        return Dual(
            self.value * other.value,
            self.dx * other.value + self.value * other.dx,
            self.dy * other.value + self.value * other.dy,
        )

    def __truediv__(self, other):
        value = safe_divide(self.value, other.value)
        square = other.value * other.value
        return Dual(
            value,
            safe_divide(self.dx * other.value - self.value * other.dx, square),
            safe_divide(self.dy * other.value - self.value * other.dy, square),
        )

    def __pow__(self, other):
        value = real_power(self.value, other.value)
        # d(u^v) = v u^(v-1) du + u^v ln(u) dv; the second term only where v varies
        slope = other.value * real_power(self.value, other.value - 1.0)
        log_base = safe_log(self.value)
        with np.errstate(all='ignore'):
            dx = _scaled(slope, self.dx) + _scaled(value * log_base, other.dx)
            dy = _scaled(slope, self.dy) + _scaled(value * log_base, other.dy)
        return Dual(value, dx, dy)

    def exp(self):
        value = np.exp(self.value)
        return self._chain(value, value)

    def log(self):
        return self._chain(safe_log(self.value), safe_divide(1.0, self.value))

    def log_abs(self):
        with np.errstate(all='ignore'):
            value = np.log(np.abs(self.value))
        return self._chain(value, safe_divide(1.0, self.value))

    def sin(self):
        return self._chain(np.sin(self.value), np.cos(self.value))

    def cos(self):
        return self._chain(np.cos(self.value), -np.sin(self.value))

    def abs(self):
        return self._chain(np.abs(self.value), np.sign(self.value))


# ============================================================================
# Number systems
# ============================================================================

class ArrayOps:
    """Plain values over numpy arrays."""

    def const(self, value):
        return np.float64(value)

    def neg(self, a):
        return -a

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def mul(self, a, b):
        return a * b

    def div(self, a, b):
        return safe_divide(a, b)

    def pow(self, a, b):
        return real_power(a, b)

    def exp(self, a):
        return np.exp(a)

    def ln(self, a):
        return safe_log(a)

    def log_abs(self, a):
        return np.log(np.abs(a))

    def sin(self, a):
        return np.sin(a)

    def cos(self, a):
        return np.cos(a)

    def abs(self, a):
        return np.abs(a)

    def value(self, a):
        return a


class DualOps(ArrayOps):
    """Forward-mode derivatives through Dual."""

    def const(self, value):
        return Dual.constant(value)

    def div(self, a, b):
        return a / b

    def pow(self, a, b):
        return a ** b

    def exp(self, a):
        return a.exp()

    def ln(self, a):
        return a.log()

    def log_abs(self, a):
        return a.log_abs()

    def sin(self, a):
        return a.sin()

    def cos(self, a):
        return a.cos()

    def abs(self, a):
        return a.abs()

    def value(self, a):
        return a.value


ARRAY_OPS = ArrayOps()
DUAL_OPS = DualOps()


# ============================================================================
# Tree walk
# ============================================================================

@singledispatch
def walk(node, ops, x, y):
    """Evaluate ``node`` with the arithmetic of ``ops`` at ``(x, y)``."""
    raise TypeError(f"Unsupported expression node: {type(node).__name__}")


@walk.register
def _(node: Constant, ops, x, y):
    return ops.const(node.value)


@walk.register
def _(node: Var, ops, x, y):
    return x if node.name == 'x' else y


@walk.register
def _(node: Neg, ops, x, y):
    return ops.neg(walk(node.child, ops, x, y))


@walk.register
def _(node: BinaryOp, ops, x, y):
    return getattr(ops, node.op)(walk(node.left, ops, x, y), walk(node.right, ops, x, y))


@walk.register
def _(node: Pow, ops, x, y):
    return ops.pow(walk(node.base, ops, x, y), walk(node.exponent, ops, x, y))


@walk.register
def _(node: Function, ops, x, y):
    return getattr(ops, node.op)(walk(node.child, ops, x, y))


def evaluate(expr, xs, ys):
    """Evaluate over arrays of coordinates (broadcast together)."""
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    with np.errstate(all='ignore'):
        result = walk(expr, ARRAY_OPS, xs, ys)
    return np.broadcast_to(result, np.broadcast(xs, ys).shape)


def seed_duals(xs, ys):
    """Dual coordinates with unit derivatives along their own axis."""
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    return Dual(xs, np.ones_like(xs), np.zeros_like(xs)), Dual(ys, np.zeros_like(ys), np.ones_like(ys))


def eval_scalar(expr, point):
    """Value of ``expr`` at ``point``; NaN outside the domain."""
    return float(evaluate(expr, point.x, point.y))


def eval_dual(expr, point):
    """Value and exact partial derivatives of ``expr`` at ``point``."""
    x, y = seed_duals(point.x, point.y)
    with np.errstate(all='ignore'):
        result = walk(expr, DUAL_OPS, x, y)
    return Dual(float(result.value), float(result.dx), float(result.dy))
