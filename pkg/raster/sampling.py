"""
Sampling regions on grids, the crisp boolean oracle, and bitmap comparison.
"""
import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import singledispatch
from typing import Dict

import numpy as np

from expressions.evaluation import evaluate
from regionkit.conf import region_setting
from regions.algebra import validate_sharpness
from regions.evaluation import log_field_values, xor_product_values
from setlang.compiler import compile_program
from setlang.exceptions import UnresolvedName
from setlang.nodes import And, Not, Or, VarRef

from .exceptions import GridMismatch
from .grid import Bitmap

logger = logging.getLogger(__name__)

ROWS_PER_CHUNK = 64


def _row_chunks(grid):
    starts = range(0, grid.ny, ROWS_PER_CHUNK)
    return [slice(start, min(start + ROWS_PER_CHUNK, grid.ny)) for start in starts]


def sample_values(function, grid, workers=None):
    """
    Evaluate ``function(xs, ys)`` at every cell centre, ``(ny, nx)`` shaped.

    Rows are evaluated in chunks, on a thread pool when ``workers`` > 1; the
    result does not depend on the chunking.
    """
    grid.check_size()
    if workers is None:
        workers = region_setting('SAMPLING_WORKERS')
    xs = grid.x_centers()[None, :]
    ys = grid.y_centers()[:, None]

    def run(rows):
        return np.broadcast_to(function(xs, ys[rows]), (rows.stop - rows.start, grid.nx))

    started = time.perf_counter()
    chunks = _row_chunks(grid)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(run, chunks))
    else:
        parts = [run(rows) for rows in chunks]
    values = np.concatenate(parts, axis=0)
    logger.debug(
        "Sampled %dx%d grid in %.3fs (%d chunks, %d workers)",
        grid.nx, grid.ny, time.perf_counter() - started, len(chunks), workers,
    )
    return values


def sample_membership(region, grid, workers=None, boundary_tol=None):
    """Membership bitmap of ``region`` from its log-field at cell centres."""
    if boundary_tol is None:
        boundary_tol = region_setting('BOUNDARY_TOL')
    values = sample_values(lambda xs, ys: log_field_values(region, xs, ys), grid, workers)
    return Bitmap(grid, values <= boundary_tol, np.isnan(values))


def sample_raw_product(raw, grid, workers=None):
    """Membership bitmap of a multiplicative (XNOR) combination."""
    values = sample_values(lambda xs, ys: xor_product_values(raw, xs, ys), grid, workers)
    return Bitmap(grid, values <= 0, np.isnan(values))


# ============================================================================
# Boolean oracle
# ============================================================================

@singledispatch
def _crisp(expr, member):
    raise TypeError(f"Unsupported set expression: {type(expr).__name__}")


@_crisp.register
def _(expr: VarRef, member):
    return member(expr.name)


@_crisp.register
def _(expr: Not, member):
    return ~_crisp(expr.child, member)


@_crisp.register
def _(expr: And, member):
    return _crisp(expr.left, member) & _crisp(expr.right, member)


@_crisp.register
def _(expr: Or, member):
    return _crisp(expr.left, member) | _crisp(expr.right, member)


def boolean_oracle(program, grid):
    """
    Exact set semantics: a cell belongs to a set when its ``f`` is <= 0 there
    (NaN is not a member); the set expression is then applied as plain logic.
    """
    grid.check_size()
    table = program.table
    xs = grid.x_centers()[None, :]
    ys = grid.y_centers()[:, None]
    shape = (grid.ny, grid.nx)
    masks = {}
    undefined = np.zeros(shape, dtype=bool)

    def member(name):
        nonlocal undefined
        if name not in table:
            raise UnresolvedName(name)
        if name not in masks:
            values = np.broadcast_to(evaluate(table[name].body, xs, ys), shape)
            masks[name] = values <= 0
            undefined = undefined | np.isnan(values)
        return masks[name]

    bits = _crisp(program.expression, member)
    return Bitmap(grid, np.array(bits, dtype=bool), undefined)


# ============================================================================
# Comparison and sweeps
# ============================================================================

@dataclass(frozen=True)
class MismatchReport:
    total_cells: int
    differing_cells: int
    fraction: float
    quadrants: Dict[str, int] = field(default_factory=dict)
    undefined_a: int = 0
    undefined_b: int = 0


def mismatch(a, b):
    """Cellwise XOR of two bitmaps sampled on the same grid."""
    if a.grid != b.grid:
        raise GridMismatch(f"Cannot compare bitmaps on {a.grid} and {b.grid}")
    differing = a.bits ^ b.bits
    count = int(np.count_nonzero(differing))
    quadrants = {
        name: int(np.count_nonzero(differing & mask))
        for name, mask in a.grid.quadrant_masks().items()
    }
    return MismatchReport(
        total_cells=a.grid.cells,
        differing_cells=count,
        fraction=count / a.grid.cells,
        quadrants=quadrants,
        undefined_a=a.undefined_cells,
        undefined_b=b.undefined_cells,
    )


def sweep_frames(program, a_values, grid, workers=None):
    """One bitmap per sharpness, in input order; every leaf takes the swept value."""
    a_values = [validate_sharpness(a) for a in a_values]
    frames = []
    for index, a in enumerate(a_values):
        region = compile_program(program, sharpness_override=a)
        frames.append(sample_membership(region, grid, workers))
        logger.debug("Frame %d/%d at a=%s", index + 1, len(a_values), a)
    return frames
