"""
Marching squares on the log-field.

Corners are sampled on the grid's corner lattice. Each cell edge whose
endpoints straddle L = 0 gets one vertex, placed by linear interpolation;
cells with four crossings (saddles) are resolved by sampling the cell centre.
Cells touching a NaN corner are skipped. Segments sharing an edge vertex are
chained into polylines.
"""
import logging
import math
from collections import defaultdict
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from expressions.nodes import Point
from regions.evaluation import log_field_values

from .grid import Grid

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Polyline:
    points: Tuple[Point, ...]
    closed: bool = False

    def length(self):
        points = self.points + (self.points[:1] if self.closed else ())
        return sum(math.dist((p.x, p.y), (q.x, q.y)) for p, q in zip(points, points[1:]))


@dataclass(frozen=True)
class ContourSet:
    grid: Grid
    polylines: Tuple[Polyline, ...] = ()

    def __len__(self):
        return len(self.polylines)

    def total_length(self):
        return sum(polyline.length() for polyline in self.polylines)

    @property
    def closed_loops(self):
        return sum(1 for polyline in self.polylines if polyline.closed)


def _crossing(l0, l1):
    """Fraction along an edge where the interpolated log-field is zero."""
    if math.isinf(l0) and math.isinf(l1):
        return 0.5
    if math.isinf(l0):
        return 1.0
    if math.isinf(l1):
        return 0.0
    return l0 / (l0 - l1)


class _EdgeVertices:
    """Caches one interpolated vertex per crossed lattice edge."""

    def __init__(self, xs, ys, values):
        self.xs = xs
        self.ys = ys
        self.values = values
        self.points = {}

    def vertex(self, key):
        if key not in self.points:
            kind, j, i = key
            j1, i1 = (j, i + 1) if kind == 'h' else (j + 1, i)
            t = _crossing(self.values[j, i], self.values[j1, i1])
            x = self.xs[i] + t * (self.xs[i1] - self.xs[i])
            y = self.ys[j] + t * (self.ys[j1] - self.ys[j])
            self.points[key] = Point(float(x), float(y))
        return self.points[key]


def _cell_segments(j, i, outside, center_outside):
    """
    Edge-key pairs for cell (j, i).

    Corners run counter-clockwise from the bottom left; edge k joins corner k
    and corner k + 1.
    """
    corners = (outside[j, i], outside[j, i + 1], outside[j + 1, i + 1], outside[j + 1, i])
    edges = (('h', j, i), ('v', j, i + 1), ('h', j + 1, i), ('v', j, i))
    crossed = [k for k in range(4) if corners[k] != corners[(k + 1) % 4]]
    if len(crossed) == 2:
        return [(edges[crossed[0]], edges[crossed[1]])]
    if len(crossed) == 4:
        if center_outside() == corners[0]:
            # corners 0 and 2 connect through the centre
            return [(edges[0], edges[1]), (edges[2], edges[3])]
        return [(edges[3], edges[0]), (edges[1], edges[2])]
    return []


def _chain(segments):
    neighbours = defaultdict(list)
    for a, b in segments:
        neighbours[a].append(b)
        neighbours[b].append(a)
    used = set()

    def walk(start):
        chain = [start]
        current = start
        while True:
            options = [n for n in neighbours[current] if (current, n) not in used]
            if not options:
                return chain, False
            following = options[0]
            used.add((current, following))
            used.add((following, current))
            if following == start:
                return chain, True
            chain.append(following)
            current = following

    chains = []
    # open chains start at edges with one neighbour (window border or NaN cell)
    for key in sorted(k for k, n in neighbours.items() if len(n) == 1):
        if any((key, n) in used for n in neighbours[key]):
            continue
        chains.append(walk(key))
    for key in sorted(neighbours):
        if all((key, n) in used for n in neighbours[key]):
            continue
        chains.append(walk(key))
    return chains


def marching_squares(region, grid):
    """Zero contour of ``log_field(region)`` over ``grid`` as a ContourSet."""
    grid.check_size((grid.nx + 1) * (grid.ny + 1))
    xs = grid.x_corners()
    ys = grid.y_corners()
    values = np.array(log_field_values(region, xs[None, :], ys[:, None]), dtype=float)
    defined = ~np.isnan(values)
    outside = values > 0
    cell_defined = defined[:-1, :-1] & defined[:-1, 1:] & defined[1:, :-1] & defined[1:, 1:]
    mixed = (
        (outside[:-1, :-1] != outside[:-1, 1:])
        | (outside[:-1, :-1] != outside[1:, :-1])
        | (outside[:-1, :-1] != outside[1:, 1:])
    )
    segments = []
    for j, i in np.argwhere(cell_defined & mixed).tolist():
        def center_outside(j=j, i=i):
            cx = 0.5 * (xs[i] + xs[i + 1])
            cy = 0.5 * (ys[j] + ys[j + 1])
            return bool(log_field_values(region, cx, cy) > 0)

        segments.extend(_cell_segments(j, i, outside, center_outside))

    vertices = _EdgeVertices(xs, ys, values)
    polylines = tuple(
        Polyline(tuple(vertices.vertex(key) for key in chain), closed)
        for chain, closed in _chain(segments)
    )
    logger.debug(
        "Extracted %d polylines (%d segments) on a %dx%d grid",
        len(polylines), len(segments), grid.nx, grid.ny,
    )
    return ContourSet(grid, polylines)
