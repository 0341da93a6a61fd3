"""
Distance of an evaluation point to the nearest domain boundary or kink.

Gradient checks only trust finite differences where every sub-expression is
smooth in a neighbourhood; ``domain_margin`` measures that neighbourhood.
"""
from functools import singledispatch

import numpy as np

from .evaluation import ARRAY_OPS, evaluate, walk
from .nodes import Abs, Div, Ln, Pow, children

INFINITE_MARGIN = np.inf


@singledispatch
def _margin(node, xs, ys):
    return _children_margin(node, xs, ys)


@_margin.register
def _(node: Div, xs, ys):
    own = np.abs(walk(node.right, ARRAY_OPS, xs, ys))
    return np.minimum(own, _children_margin(node, xs, ys))


@_margin.register
def _(node: Ln, xs, ys):
    own = walk(node.child, ARRAY_OPS, xs, ys)
    return np.minimum(own, _children_margin(node, xs, ys))


@_margin.register
def _(node: Abs, xs, ys):
    own = np.abs(walk(node.child, ARRAY_OPS, xs, ys))
    return np.minimum(own, _children_margin(node, xs, ys))


@_margin.register
def _(node: Pow, xs, ys):
    base = walk(node.base, ARRAY_OPS, xs, ys)
    exponent = walk(node.exponent, ARRAY_OPS, xs, ys)
    integral = np.round(exponent) == exponent
    own = np.where(
        integral,
        np.where(exponent < 0, np.abs(base), INFINITE_MARGIN),
        base,
    )
    return np.minimum(own, _children_margin(node, xs, ys))


def _children_margin(node, xs, ys):
    margin = INFINITE_MARGIN
    for child in children(node):
        margin = np.minimum(margin, _margin(child, xs, ys))
    return margin


def domain_margin(expr, xs, ys):
    """
    Smallest margin over all sub-expressions at the given coordinates.

    Divisors, abs arguments and integer-negative power bases count by their
    magnitude; ln arguments and fractional power bases count by their signed
    value, so points outside the domain get a negative margin. NaN means the
    point is not evaluable at all.
    """
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    with np.errstate(all='ignore'):
        margin = _margin(expr, xs, ys)
    values = evaluate(expr, xs, ys)
    return np.where(np.isnan(values), np.nan, np.broadcast_to(margin, values.shape))
