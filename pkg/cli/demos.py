"""
End-to-end demos over the bundled programs.

Every demo writes its images into the run's output directory, prints a TSV
table to stdout and records failed self-checks on the run.
"""
import logging
import math
import os

import numpy as np

from expressions.evaluation import evaluate
from expressions.nodes import Point
from expressions.parser import parse_scalar
from raster.contours import marching_squares
from raster.export import bitmap_checksum, write_pgm, write_svg
from raster.grid import Grid
from raster.sampling import boolean_oracle, mismatch, sample_membership, sample_raw_product, sweep_frames
from regions.algebra import raw_product
from regions.evaluation import Membership, xor_product_membership
from regions.functions import boundary_solve_y, smooth_max, smooth_min, softplus_boundary
from setlang.compiler import compile_program
from setlang.desmos import emit_desmos
from setlang.loader import load_program, resolve_program

logger = logging.getLogger(__name__)

CONVERGENCE_LADDER = (2, 5, 10, 20, 50)
DISTRIBUTIVE_LADDER = (5, 10, 20, 50)
ANIMATION_FRAMES = (1, 2, 5, 10, 20, 50)
SOFTPLUS_SHARPNESS = (1, 5, 20)

# the curves bounding the bundled min and max programs
MIN_CURVES = ('sin(x)', 'x+5', '-x+5', '-(x/3)^2+10')
MAX_CURVES = ('x-5', '-x-5', 'sin(x)')

DEMOS = {}


def demo(name):
    def register(function):
        DEMOS[name] = function
        return function
    return register


def cell(value):
    if isinstance(value, float):
        return f'{value:.10g}'
    return str(value)


class DemoRun:
    """Output directory, sampling options, stdout and collected failures of one demo."""

    def __init__(self, out_dir, resolution, workers, write):
        self.out_dir = out_dir
        self.resolution = resolution
        self.workers = workers
        self.write = write
        self.failures = []

    def path(self, name):
        return os.path.join(self.out_dir, name)

    def grid(self, program):
        return Grid.from_window(program.window, self.resolution)

    def program(self, name):
        return load_program(resolve_program(name))

    def table(self, header, rows):
        self.write('\t'.join(header))
        for row in rows:
            self.write('\t'.join(cell(value) for value in row))

    def check(self, condition, message):
        if not condition:
            logger.warning("Demo self-check failed: %s", message)
            self.failures.append(message)

    def render(self, name, region, grid, contour=True):
        bitmap = sample_membership(region, grid, self.workers)
        write_pgm(bitmap, self.path(f'{name}.pgm'))
        if contour:
            write_svg(marching_squares(region, grid), self.path(f'{name}.svg'))
        return bitmap


def nonincreasing(values):
    return all(b <= a for a, b in zip(values, values[1:]))


# ============================================================================
# Demos
# ============================================================================

@demo('circles')
def circles(run):
    """Union of two circles and its convergence towards the crisp union."""
    program = run.program('circles')
    region = compile_program(program)
    grid = run.grid(program)
    run.write(emit_desmos(region))
    run.render('circles', region, grid)

    oracle = boolean_oracle(program, grid)
    reports = [mismatch(frame, oracle) for frame in sweep_frames(program, CONVERGENCE_LADDER, grid, run.workers)]
    run.table(
        ('a', 'mismatch', 'differing_cells'),
        [(float(a), r.fraction, r.differing_cells) for a, r in zip(CONVERGENCE_LADDER, reports)],
    )
    run.check(nonincreasing([r.fraction for r in reports]), "circle mismatch grew with sharpness")


@demo('batman')
def batman(run):
    program = run.program('batman')
    region = compile_program(program)
    grid = run.grid(program)
    bitmap = run.render('batman', region, grid)
    oracle = boolean_oracle(program, grid)
    run.table(
        ('cells', 'inside', 'undefined', 'checksum'),
        [(grid.cells, bitmap.inside_cells, bitmap.undefined_cells, bitmap_checksum(bitmap))],
    )
    run.check(not np.any(bitmap.bits & ~oracle.bits), "smooth intersection leaves the crisp one")


@demo('example1')
def example1(run):
    program = run.program('example1')
    region = compile_program(program)
    grid = run.grid(program)
    run.write(emit_desmos(region))
    bitmap = run.render('example1', region, grid)
    report = mismatch(bitmap, boolean_oracle(program, grid))
    run.table(('inside_fraction', 'mismatch'), [(bitmap.inside_fraction, report.fraction)])


@demo('distributive')
def distributive(run):
    """A & (B | C) against (A & B) | (A & C) as the sharpness grows."""
    factored, expanded = run.program('eq12'), run.program('eq13')
    grid = run.grid(factored)
    run.render('eq12', compile_program(factored), grid, contour=False)
    run.render('eq13', compile_program(expanded), grid, contour=False)

    factored_oracle = boolean_oracle(factored, grid)
    expanded_oracle = boolean_oracle(expanded, grid)
    rows = []
    for a in DISTRIBUTIVE_LADDER:
        left = sample_membership(compile_program(factored, sharpness_override=a), grid, run.workers)
        right = sample_membership(compile_program(expanded, sharpness_override=a), grid, run.workers)
        rows.append((
            float(a),
            mismatch(left, right).fraction,
            mismatch(left, factored_oracle).fraction,
            mismatch(right, expanded_oracle).fraction,
        ))
    run.table(('a', 'between', 'eq12_vs_oracle', 'eq13_vs_oracle'), rows)
    run.check(rows[-1][1] < rows[0][1], "the two forms did not get closer")


@demo('softplus')
def softplus(run):
    """The boundary of y <= 0 union y <= x is ln(1 + e^(a x)) / a."""
    program = run.program('softplus')
    run.render('softplus', compile_program(program), run.grid(program))
    rows = []
    for a in SOFTPLUS_SHARPNESS:
        region = compile_program(program, sharpness_override=a)
        for x in np.linspace(-5, 5, 11):
            boundary = boundary_solve_y(region, float(x), -10.0, 10.0)
            expected = softplus_boundary(a, float(x))
            rows.append((float(a), float(x), boundary, expected, abs(boundary - expected)))
    run.table(('a', 'x', 'boundary', 'softplus', 'delta'), rows)
    run.check(max(row[-1] for row in rows) < 1e-9, "bisected boundary differs from softplus")


@demo('minmax')
def minmax(run):
    """Smooth min and max against the exact ones and against the rendered boundaries."""
    xs = np.linspace(-15, 15, 13)
    rows = []
    for kind, curves, program_name in (('min', MIN_CURVES, 'min'), ('max', MAX_CURVES, 'max')):
        gs = [parse_scalar(text) for text in curves]
        program = run.program(program_name)
        region = compile_program(program)
        run.render(program_name, region, run.grid(program))
        a = program.global_a
        bound = math.log(len(gs)) / a
        exact = (np.min if kind == 'min' else np.max)(np.stack([evaluate(g, xs, 0.0) for g in gs]), axis=0)
        smooth = (smooth_min if kind == 'min' else smooth_max)(gs, a, xs)
        for x, e, s in zip(xs, exact, smooth):
            boundary = boundary_solve_y(region, float(x), -100.0, 100.0)
            gap = float(e - s) if kind == 'min' else float(s - e)
            rows.append((kind, float(x), float(s), float(e), boundary))
            run.check(0 <= gap <= bound + 1e-12, f"smooth {kind} at x={x:g} is {gap:g} from the exact one")
            run.check(abs(boundary - s) < 1e-9, f"{kind} boundary at x={x:g} misses the smooth {kind}")
    run.table(('kind', 'x', 'smooth', 'exact', 'boundary'), rows)


@demo('animation')
def animation(run):
    """Frames of a sharpness sweep; the pieces tighten into strokes."""
    program = run.program('animation')
    grid = run.grid(program)
    rows = []
    for index, (a, frame) in enumerate(zip(ANIMATION_FRAMES, sweep_frames(program, ANIMATION_FRAMES, grid, run.workers))):
        write_pgm(frame, run.path(f'animation_{index:02d}.pgm'))
        rows.append((index, float(a), frame.inside_fraction, bitmap_checksum(frame)))
    run.table(('frame', 'a', 'inside_fraction', 'checksum'), rows)


@demo('xnor')
def xnor(run):
    """Multiplicative combination of the two circles."""
    program = run.program('circles')
    table = program.table
    raw = raw_product(table['a'].body, table['b'].body)
    bitmap = sample_raw_product(raw, run.grid(program), run.workers)
    write_pgm(bitmap, run.path('xnor.pgm'))
    run.table(('inside_fraction',), [(bitmap.inside_fraction,)])
    run.check(xor_product_membership(raw, Point(0, 0)) is Membership.INSIDE, "(0, 0) should be inside")
    run.check(xor_product_membership(raw, Point(1.25, 0)) is Membership.OUTSIDE, "(1.25, 0) should be outside")
