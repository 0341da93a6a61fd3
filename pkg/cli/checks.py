"""
Gradient check: forward-mode gradients against central differences.
"""
import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from expressions.nodes import Point
from regionkit.conf import region_setting
from regions.evaluation import grad_log_field, log_field, regularity_margin

logger = logging.getLogger(__name__)

# give up after this many draws per requested point
ATTEMPTS_PER_POINT = 100


@dataclass(frozen=True)
class GradientReport:
    requested: int
    checked: int
    excluded: int
    max_error: float
    worst: Optional[Point]
    tolerance: float

    @property
    def passed(self):
        return self.checked == self.requested and self.max_error < self.tolerance


def relative_error(exact, approx):
    return abs(exact - approx) / max(abs(exact), abs(approx), 1.0)


def _point_error(region, point, step, margin):
    """Largest relative error of the two partials, or None for an excluded point."""
    if not abs(log_field(region, point)) > margin:
        return None
    if not regularity_margin(region, point) > margin:
        return None
    stencil = [
        log_field(region, point.shifted(dx=step)),
        log_field(region, point.shifted(dx=-step)),
        log_field(region, point.shifted(dy=step)),
        log_field(region, point.shifted(dy=-step)),
    ]
    if not all(math.isfinite(value) for value in stencil):
        return None
    gx, gy = grad_log_field(region, point)
    fd_x = (stencil[0] - stencil[1]) / (2 * step)
    fd_y = (stencil[2] - stencil[3]) / (2 * step)
    return max(relative_error(gx, fd_x), relative_error(gy, fd_y))


def gradient_check(region, window, points, seed, tolerance=None, margin=None, step=None):
    """
    Compare exact gradients with central differences at ``points`` random
    points of ``window``.

    Points within ``margin`` of the boundary, of a leaf's non-differentiable
    set, or with an undefined stencil are skipped and counted as excluded.
    The same seed always draws the same points.
    """
    tolerance = region_setting('GRADCHECK_TOL') if tolerance is None else tolerance
    margin = region_setting('GRADCHECK_MARGIN') if margin is None else margin
    step = region_setting('GRADCHECK_STEP') if step is None else step
    x_min, x_max, y_min, y_max = window
    rng = np.random.default_rng(seed)

    checked = excluded = 0
    max_error = 0.0
    worst = None
    for _ in range(points * ATTEMPTS_PER_POINT):
        if checked == points:
            break
        point = Point(float(rng.uniform(x_min, x_max)), float(rng.uniform(y_min, y_max)))
        error = _point_error(region, point, step, margin)
        if error is None:
            excluded += 1
            logger.debug("Excluded %s from the gradient check", point)
            continue
        checked += 1
        if error >= max_error:
            max_error, worst = error, point

    return GradientReport(points, checked, excluded, max_error, worst, tolerance)
