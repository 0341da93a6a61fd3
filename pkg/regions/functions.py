"""
Operations derived from the region algebra: smooth min/max, the softplus
boundary, a membership loss over point sets and boundary root finding.
"""
import logging
import math

import numpy as np
from scipy.optimize import bisect
from scipy.special import logsumexp

from expressions.evaluation import evaluate
from expressions.nodes import Point, free_variables
from regionkit.conf import region_setting

from .algebra import validate_sharpness
from .evaluation import log_field, log_field_values
from .exceptions import EmptyOperandList, InvalidTolerance, NoSignChange, NotUnivariate

logger = logging.getLogger(__name__)


def _stack_univariate(gs, xs):
    gs = list(gs)
    if not gs:
        raise EmptyOperandList("Smooth min/max needs at least one function")
    for g in gs:
        if free_variables(g) - {'x'}:
            raise NotUnivariate("Smooth min/max operands must depend on x only")
    xs = np.asarray(xs, dtype=float)
    return np.stack([np.broadcast_to(evaluate(g, xs, 0.0), xs.shape) for g in gs])


def _as_result(values):
    return float(values) if np.ndim(values) == 0 else values


def smooth_min(gs, a, x):
    """-(1/a) ln sum e^(-a g_i(x)); within ln(n)/a below the exact minimum."""
    a = validate_sharpness(a)
    values = _stack_univariate(gs, x)
    # shifting by the exact minimum keeps the result on the correct side of it
    low = values.min(axis=0)
    result = low - logsumexp(-a * (values - low), axis=0) / a
    return _as_result(result)


def smooth_max(gs, a, x):
    """(1/a) ln sum e^(a g_i(x)); within ln(n)/a above the exact maximum."""
    a = validate_sharpness(a)
    values = _stack_univariate(gs, x)
    high = values.max(axis=0)
    result = high + logsumexp(a * (values - high), axis=0) / a
    return _as_result(result)


def softplus_boundary(a, x):
    """
    ln(1 + e^(a x)) / a, the boundary of the union of y <= 0 and y <= x.

    With a = 1 this is softplus; it tends to max(x, 0) as a grows.
    """
    a = validate_sharpness(a)
    result = np.logaddexp(0.0, a * np.asarray(x, dtype=float)) / a
    return _as_result(result)


def membership_loss(region, points, clip=None):
    """
    max(sum_i min(F(p_i), clip) - N, 0).

    Points where the field is undefined count as fully clipped.
    """
    if clip is None:
        clip = region_setting('LOSS_CLIP')
    if not clip >= 1:
        raise InvalidTolerance(f"Loss clip must be >= 1, got {clip}")
    points = list(points)
    if not points:
        raise EmptyOperandList("Membership loss needs at least one point")
    xs = np.array([p.x for p in points])
    ys = np.array([p.y for p in points])
    values = log_field_values(region, xs, ys)
    values = np.where(np.isnan(values), np.inf, values)
    fields = np.exp(np.minimum(values, math.log(clip)))
    return max(float(np.sum(fields)) - len(points), 0.0)


def boundary_solve_y(region, x, y_lo, y_hi, tol=1e-12):
    """Bisection root in y of the log-field along the vertical line at ``x``."""
    low = log_field(region, Point(x, y_lo))
    high = log_field(region, Point(x, y_hi))
    if low == 0.0:
        return float(y_lo)
    if high == 0.0:
        return float(y_hi)
    if not (low * high < 0):
        raise NoSignChange(x, y_lo, y_hi, low, high)
    root = bisect(lambda y: log_field(region, Point(x, y)), y_lo, y_hi, xtol=tol)
    logger.debug("Boundary at x=%s found at y=%s", x, root)
    return float(root)
