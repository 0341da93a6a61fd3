"""
Log-domain evaluation of region trees.

Intersection is the sum of child fields, computed as a stabilised
log-sum-exp of child log-fields; union is its De Morgan dual
-logsumexp(-L_i). The literal field F = e^L is only materialised on request.
"""
import enum
import math
from functools import singledispatch

import numpy as np
from scipy.special import logsumexp

from expressions.domain import domain_margin
from expressions.evaluation import ARRAY_OPS, DUAL_OPS, Dual, evaluate, seed_duals, walk
from regionkit.conf import region_setting

from .algebra import EvenPowerLeaf, Intersect, Leaf, Negate, RawProductRegion, Union, iter_leaves
from .exceptions import InvalidTolerance

LN2 = math.log(2.0)


class Membership(enum.Enum):
    INSIDE = 'inside'
    OUTSIDE = 'outside'
    BOUNDARY = 'boundary'
    UNDEFINED = 'undefined'


# ============================================================================
# Log-sum-exp over both number systems
# ============================================================================

def _logsumexp(values):
    stacked = np.stack(np.broadcast_arrays(*values))
    return logsumexp(stacked, axis=0)


def _logsumexp_dual(values):
    value = _logsumexp([v.value for v in values])
    # softmax weights e^(L_i - L)
    weights = [np.exp(v.value - value) for v in values]
    dx = sum(w * v.dx for w, v in zip(weights, values))
    dy = sum(w * v.dy for w, v in zip(weights, values))
    return Dual(value, dx, dy)


def _lse(ops, values):
    if ops is DUAL_OPS:
        return _logsumexp_dual(values)
    return _logsumexp(values)


# ============================================================================
# Tree walk
# ============================================================================

@singledispatch
def _log_field(region, ops, x, y):
    raise TypeError(f"Unsupported region node: {type(region).__name__}")


@_log_field.register
def _(region: Leaf, ops, x, y):
    return ops.mul(ops.const(region.a), walk(region.f, ops, x, y))


@_log_field.register
def _(region: EvenPowerLeaf, ops, x, y):
    return ops.mul(ops.const(2.0 * region.a), ops.log_abs(walk(region.f, ops, x, y)))


@_log_field.register
def _(region: Negate, ops, x, y):
    return ops.neg(_log_field(region.child, ops, x, y))


@_log_field.register
def _(region: Intersect, ops, x, y):
    return _lse(ops, [_log_field(child, ops, x, y) for child in region.children])


@_log_field.register
def _(region: Union, ops, x, y):
    negated = [ops.neg(_log_field(child, ops, x, y)) for child in region.children]
    return ops.neg(_lse(ops, negated))


# ============================================================================
# Public evaluation API
# ============================================================================

def log_field_values(region, xs, ys):
    """Vectorised log-field over broadcast coordinate arrays."""
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    with np.errstate(all='ignore'):
        values = _log_field(region, ARRAY_OPS, xs, ys)
    return np.broadcast_to(values, np.broadcast(xs, ys).shape)


def log_field(region, point):
    """L = ln F at ``point``: finite, +-inf or NaN, never overflowing."""
    return float(log_field_values(region, point.x, point.y))


def field(region, point):
    """The literal field F = e^L; may underflow to 0 or overflow to inf."""
    with np.errstate(over='ignore'):
        return float(np.exp(log_field(region, point)))


def grad_log_field(region, point):
    """Exact forward-mode gradient (dL/dx, dL/dy)."""
    x, y = seed_duals(point.x, point.y)
    with np.errstate(all='ignore'):
        result = _log_field(region, DUAL_OPS, x, y)
    return float(result.dx), float(result.dy)


def membership(region, point, boundary_tol=None):
    """Inside if L < -tol, Outside if L > tol, Boundary otherwise, Undefined on NaN."""
    if boundary_tol is None:
        boundary_tol = region_setting('BOUNDARY_TOL')
    if not boundary_tol >= 0:
        raise InvalidTolerance(f"Boundary tolerance must be >= 0, got {boundary_tol}")
    value = log_field(region, point)
    if math.isnan(value):
        return Membership.UNDEFINED
    if value < -boundary_tol:
        return Membership.INSIDE
    if value > boundary_tol:
        return Membership.OUTSIDE
    return Membership.BOUNDARY


def bounded_field_values(region, xs, ys, scaled=False):
    """
    g(F) = 1 - 2^(-F), computed from the log-field.

    g is 0.5 exactly on the boundary and stays below 1; ``scaled`` doubles it
    (range [0, 2), boundary at 1).
    """
    values = log_field_values(region, xs, ys)
    with np.errstate(all='ignore'):
        strength = np.exp(np.minimum(values, region_setting('FIELD_CLAMP')))
        # expm1 keeps precision for small F, exp2 keeps g(1) = 0.5 exact
        bounded = np.where(strength < 0.5, -np.expm1(-LN2 * strength), 1.0 - np.exp2(-strength))
    bounded = np.minimum(bounded, np.nextafter(1.0, 0.0))
    return 2.0 * bounded if scaled else bounded


def bounded_field(region, point, scaled=False):
    return float(bounded_field_values(region, point.x, point.y, scaled=scaled))


def xor_product_values(raw, xs, ys):
    """(f1 - 1)(f2 - 1) over coordinate arrays."""
    with np.errstate(all='ignore'):
        return (evaluate(raw.f1, xs, ys) - 1.0) * (evaluate(raw.f2, xs, ys) - 1.0)


def xor_product_membership(raw, point):
    """Inside iff (f1 - 1)(f2 - 1) <= 0."""
    if not isinstance(raw, RawProductRegion):
        raise TypeError("xor_product_membership expects a RawProductRegion")
    product = float(xor_product_values(raw, point.x, point.y))
    if math.isnan(product):
        return Membership.UNDEFINED
    return Membership.INSIDE if product <= 0 else Membership.OUTSIDE


def regularity_margin(region, point):
    """Smallest domain margin over every leaf (|f| too for even-power leaves)."""
    margin = math.inf
    for leaf in iter_leaves(region):
        leaf_margin = float(domain_margin(leaf.f, point.x, point.y))
        if isinstance(leaf, EvenPowerLeaf):
            leaf_margin = min(leaf_margin, abs(float(evaluate(leaf.f, point.x, point.y))))
        if math.isnan(leaf_margin):
            return math.nan
        margin = min(margin, leaf_margin)
    return margin
