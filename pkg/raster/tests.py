import math
import os
import tempfile
from xml.etree import ElementTree

import numpy as np
from django.test import SimpleTestCase, override_settings

from expressions.nodes import Point
from expressions.parser import parse_scalar
from regions.algebra import from_inequality, intersect, negate, raw_product
from regions.evaluation import bounded_field_values, log_field, log_field_values
from regions.exceptions import InvalidSharpness
from setlang.compiler import compile_program
from setlang.loader import load_program, resolve_program
from setlang.nodes import And, Not, Or, SetProgram, VarRef
from setlang.parsers import parse_infix

from .contours import marching_squares
from .exceptions import ExportError, GridMismatch, GridTooLarge, InvalidGrid
from .export import bitmap_checksum, pgm_bytes, render_svg, write_pgm, write_svg
from .grid import Bitmap, Grid
from .sampling import boolean_oracle, mismatch, sample_membership, sample_raw_product, sweep_frames

DISK = parse_scalar('x^2+y^2-4')
SHARPNESS_LADDER = [2, 5, 10, 20, 50]
# bundled batman on its own window: (inside cells, undefined cells, checksum)
BATMAN_GOLDEN = {
    256: (1707, 49247, '7d10907e1a56f7653e73033643bbdc6bdc1699d57509c83f0dfcf53a007ed45a'),
    512: (6838, 196988, 'cc29f192a2be5571140aaf82c20a72d082868309e90bf99291d1fe719371c11a'),
}


def bundled(name):
    return load_program(resolve_program(name))


def fixture_grid(name, resolution):
    return Grid.from_window(bundled(name).window, resolution)


# ============================================================================
# Grid and bitmap
# ============================================================================

class GridTests(SimpleTestCase):
    """Tests for Grid."""

    def test_cell_centres(self):
        grid = Grid(-2, 2, 0, 1, 4, 2)
        np.testing.assert_allclose(grid.x_centers(), [-1.5, -0.5, 0.5, 1.5])
        np.testing.assert_allclose(grid.y_centers(), [0.25, 0.75])
        self.assertEqual(len(grid.x_corners()), 5)
        self.assertEqual(grid.cells, 8)

    def test_invalid_grids(self):
        for bounds in [(1, 0, 0, 1, 2, 2), (0, 1, 0, 0, 2, 2), (0, 1, 0, 1, 0, 2),
                       (0, 1, 0, 1, 2, 1.5), (0, math.inf, 0, 1, 2, 2), (0, 1, 0, 1, True, 2)]:
            with self.subTest(bounds=bounds):
                with self.assertRaises(InvalidGrid):
                    Grid(*bounds)

    @override_settings(REGION_ALGEBRA={'MAX_GRID_CELLS': 100})
    def test_too_large(self):
        grid = Grid(0, 1, 0, 1, 11, 10)
        with self.assertRaises(GridTooLarge):
            sample_membership(from_inequality(DISK, 1), grid)
        with self.assertRaises(GridTooLarge):
            marching_squares(from_inequality(DISK, 1), Grid(0, 1, 0, 1, 10, 10))

    def test_quadrants_cover_the_grid(self):
        grid = Grid(0, 1, 0, 1, 5, 3)
        total = sum(mask.astype(int) for mask in grid.quadrant_masks().values())
        self.assertTrue(np.all(total == 1))

    def test_bitmap_shape_must_match(self):
        grid = Grid(0, 1, 0, 1, 3, 2)
        with self.assertRaises(InvalidGrid):
            Bitmap(grid, np.zeros((3, 2), dtype=bool), np.zeros((3, 2), dtype=bool))


# ============================================================================
# Sampling
# ============================================================================

class SampleMembershipTests(SimpleTestCase):
    """Tests for sample_membership."""

    def test_disk_area(self):
        bitmap = sample_membership(from_inequality(DISK, 50), Grid(-2, 2, -2, 2, 100, 100))
        self.assertAlmostEqual(bitmap.inside_fraction, math.pi / 4, delta=0.02)

    def test_empty_intersection(self):
        leaf = from_inequality(DISK, 50)
        bitmap = sample_membership(intersect([leaf, negate(leaf)]), Grid(-3, 3, -3, 3, 120, 120))
        self.assertLess(bitmap.inside_fraction, 0.01)

    def test_whole_plane(self):
        far = from_inequality(parse_scalar('(x-100)^2+y^2-1'), 50)
        bitmap = sample_membership(negate(far), Grid(-3, 3, -3, 3, 50, 50))
        self.assertGreater(bitmap.inside_fraction, 0.99)

    def test_row_zero_is_the_bottom(self):
        half_plane = from_inequality(parse_scalar('y'), 10)
        bitmap = sample_membership(half_plane, Grid(-1, 1, -1, 1, 2, 2))
        np.testing.assert_array_equal(bitmap.bits, [[True, True], [False, False]])

    def test_deterministic_across_workers(self):
        region = compile_program(bundled('example1'))
        grid = fixture_grid('example1', 300)
        single = sample_membership(region, grid, workers=1)
        threaded = sample_membership(region, grid, workers=4)
        again = sample_membership(region, grid, workers=1)
        np.testing.assert_array_equal(single.bits, threaded.bits)
        np.testing.assert_array_equal(single.bits, again.bits)
        self.assertEqual(bitmap_checksum(single), bitmap_checksum(threaded))

    def test_undefined_cells_count_outside(self):
        region = from_inequality(parse_scalar('ln(x)'), 1)
        bitmap = sample_membership(region, Grid(-1, 1, -1, 1, 4, 4))
        self.assertEqual(bitmap.undefined_cells, 8)
        self.assertFalse(np.any(bitmap.bits & bitmap.undefined))

    def test_raw_product(self):
        raw = raw_product(DISK, parse_scalar('(x-2.5)^2+y^2-4'))
        bitmap = sample_raw_product(raw, Grid(-0.5, 5.5, -0.5, 0.5, 6, 1))
        # (0,0) lies in exactly one factor's shifted disk, (1,0) in both
        self.assertTrue(bitmap.bits[0, 0])
        self.assertFalse(bitmap.bits[0, 1])


class BooleanOracleTests(SimpleTestCase):
    """Tests for boolean_oracle and mismatch."""

    def setUp(self):
        self.program = bundled('circles')
        self.line = Grid(-0.5, 5.5, -0.5, 0.5, 6, 1)

    def test_union_of_circles(self):
        bits = boolean_oracle(self.program, self.line).bits[0]
        self.assertTrue(bits[0])
        self.assertFalse(bits[5])
        np.testing.assert_array_equal(bits, [True, True, True, True, True, False])

    def test_de_morgan_is_exact(self):
        grid = fixture_grid('circles', 80)
        a, b = VarRef('a'), VarRef('b')
        left = boolean_oracle(SetProgram(self.program.definitions, Or(a, b)), grid)
        right = boolean_oracle(
            SetProgram(self.program.definitions, Not(And(Not(a), Not(b)))), grid
        )
        np.testing.assert_array_equal(left.bits, right.bits)

    def test_mismatch_basics(self):
        bitmap = boolean_oracle(self.program, fixture_grid('circles', 64))
        self.assertEqual(mismatch(bitmap, bitmap).fraction, 0.0)
        report = mismatch(bitmap, bitmap.complement())
        self.assertEqual(report.fraction, 1.0)
        self.assertEqual(sum(report.quadrants.values()), report.total_cells)
        with self.assertRaises(GridMismatch):
            mismatch(bitmap, boolean_oracle(self.program, fixture_grid('circles', 32)))

    def test_smooth_union_is_close_to_the_oracle(self):
        grid = fixture_grid('circles', 512)
        report = mismatch(
            sample_membership(compile_program(self.program), grid),
            boolean_oracle(self.program, grid),
        )
        self.assertLess(report.fraction, 0.005)

    def test_mismatch_shrinks_with_sharpness(self):
        for name, resolution in (('circles', 512), ('eq12', 200), ('eq13', 200)):
            program = bundled(name)
            grid = fixture_grid(name, resolution)
            oracle = boolean_oracle(program, grid)
            fractions = [
                mismatch(frame, oracle).fraction
                for frame in sweep_frames(program, SHARPNESS_LADDER, grid)
            ]
            with self.subTest(name=name, fractions=fractions):
                self.assertTrue(all(b <= a for a, b in zip(fractions, fractions[1:])))

    def test_distributive_forms_converge(self):
        grid = fixture_grid('eq12', 200)
        factored, expanded = bundled('eq12'), bundled('eq13')
        fractions = [
            mismatch(
                sample_membership(compile_program(factored, sharpness_override=a), grid),
                sample_membership(compile_program(expanded, sharpness_override=a), grid),
            ).fraction
            for a in (5, 10, 20, 50)
        ]
        self.assertTrue(all(b <= a for a, b in zip(fractions, fractions[1:])))
        self.assertLess(fractions[-1], fractions[0])

    def test_distributive_forms_match_the_oracle(self):
        grid = fixture_grid('eq12', 512)
        oracle = boolean_oracle(bundled('eq12'), grid)
        np.testing.assert_array_equal(oracle.bits, boolean_oracle(bundled('eq13'), grid).bits)
        sampled = {}
        for name in ('eq12', 'eq13'):
            bitmaps = [
                sample_membership(compile_program(bundled(name), sharpness_override=a), grid)
                for a in (5, 50)
            ]
            sampled[name] = bitmaps
            with self.subTest(name=name):
                self.assertLess(mismatch(bitmaps[-1], oracle).fraction, 0.01)
        between = [mismatch(f, e).fraction for f, e in zip(sampled['eq12'], sampled['eq13'])]
        self.assertLess(between[1], between[0])

    def test_containment(self):
        eq12 = bundled('eq12')
        grid = fixture_grid('eq12', 160)
        for text in ('a&b&c', 'a|b|c'):
            program = SetProgram(eq12.definitions, parse_infix(text), 5)
            smooth = sample_membership(compile_program(program), grid).bits
            oracle = boolean_oracle(program, grid).bits
            if '&' in text:
                self.assertFalse(np.any(smooth & ~oracle))
            else:
                self.assertFalse(np.any(oracle & ~smooth))

    def test_batman(self):
        program = bundled('batman')
        grid = fixture_grid('batman', 256)
        smooth = sample_membership(compile_program(program), grid)
        oracle = boolean_oracle(program, grid)
        self.assertGreater(smooth.undefined_cells, 0)
        self.assertGreater(smooth.inside_cells, 0)
        self.assertFalse(np.any(smooth.bits & ~oracle.bits))
        # the cell containing (0, -3) is not inside
        row = int((-3 - grid.y_min) / grid.cell_height)
        column = int((0 - grid.x_min) / grid.cell_width)
        self.assertFalse(smooth.bits[row, column])
        repeat = sample_membership(compile_program(program), grid, workers=3)
        self.assertEqual(bitmap_checksum(smooth), bitmap_checksum(repeat))

    def test_batman_golden_bitmaps(self):
        region = compile_program(bundled('batman'))
        for resolution, (inside, undefined, checksum) in BATMAN_GOLDEN.items():
            with self.subTest(resolution=resolution):
                bitmap = sample_membership(region, fixture_grid('batman', resolution))
                self.assertEqual(bitmap.inside_cells, inside)
                self.assertEqual(bitmap.undefined_cells, undefined)
                self.assertEqual(bitmap_checksum(bitmap), checksum)

    def test_bounded_transform_agrees_with_the_log_field(self):
        region = compile_program(bundled('eq12'), sharpness_override=50)
        grid = Grid.from_window(bundled('eq12').window, 256)
        xs = grid.x_centers()[None, :]
        ys = grid.y_centers()[:, None]
        by_bound = bounded_field_values(region, xs, ys) <= 0.5
        by_log = log_field_values(region, xs, ys) <= 0
        np.testing.assert_array_equal(by_bound, by_log)


class SweepFramesTests(SimpleTestCase):
    """Tests for sweep_frames."""

    def test_animation_sharpens(self):
        program = bundled('animation')
        grid = fixture_grid('animation', 128)
        frames = sweep_frames(program, [5, 50], grid)
        self.assertEqual(len(frames), 2)
        self.assertNotEqual(frames[0].inside_cells, frames[1].inside_cells)

    def test_single_frame_matches_sampling(self):
        program = bundled('circles')
        grid = fixture_grid('circles', 64)
        (frame,) = sweep_frames(program, [7], grid)
        direct = sample_membership(compile_program(program, sharpness_override=7), grid)
        np.testing.assert_array_equal(frame.bits, direct.bits)

    def test_invalid_sharpness(self):
        with self.assertRaises(InvalidSharpness):
            sweep_frames(bundled('circles'), [5, 0], fixture_grid('circles', 8))


# ============================================================================
# Contours
# ============================================================================

class MarchingSquaresTests(SimpleTestCase):
    """Tests for marching_squares."""

    def test_circle_perimeter(self):
        contours = marching_squares(from_inequality(DISK, 1), Grid(-3, 3, -3, 3, 200, 200))
        self.assertEqual(len(contours), 1)
        self.assertEqual(contours.closed_loops, 1)
        self.assertAlmostEqual(contours.total_length(), 4 * math.pi, delta=0.01 * 4 * math.pi)

    def test_no_boundary(self):
        far = from_inequality(parse_scalar('(x-100)^2+y^2-1'), 1)
        self.assertEqual(len(marching_squares(far, Grid(-3, 3, -3, 3, 40, 40))), 0)

    def test_union_of_circles_is_one_loop(self):
        contours = marching_squares(compile_program(bundled('circles')), fixture_grid('circles', 256))
        self.assertEqual(len(contours), 1)
        self.assertTrue(contours.polylines[0].closed)

    def test_open_contour_at_the_window_edge(self):
        half_plane = from_inequality(parse_scalar('x-0.3'), 1)
        contours = marching_squares(half_plane, Grid(-1, 1, -1, 1, 10, 10))
        self.assertEqual(len(contours), 1)
        self.assertFalse(contours.polylines[0].closed)
        self.assertAlmostEqual(contours.total_length(), 2.0, places=9)
        for point in contours.polylines[0].points:
            self.assertAlmostEqual(point.x, 0.3, places=12)

    def test_vertices_sit_on_the_interpolated_zero(self):
        region = compile_program(bundled('eq12'))
        grid = fixture_grid('eq12', 90)
        xs, ys = grid.x_corners(), grid.y_corners()
        for polyline in marching_squares(region, grid).polylines:
            for point in polyline.points:
                i = min(int((point.x - grid.x_min) / grid.cell_width), grid.nx - 1)
                j = min(int((point.y - grid.y_min) / grid.cell_height), grid.ny - 1)
                corners = [
                    log_field(region, Point(xs[i + di], ys[j + dj]))
                    for di in (0, 1) for dj in (0, 1)
                ]
                self.assertLess(abs(log_field(region, point)), max(corners) - min(corners))

    def test_undefined_cells_are_skipped(self):
        region = from_inequality(parse_scalar('ln(x)'), 1)
        contours = marching_squares(region, Grid(-2, 2, -2, 2, 41, 41))
        self.assertEqual(len(contours), 1)
        for point in contours.polylines[0].points:
            self.assertAlmostEqual(point.x, 1.0, delta=0.1)


# ============================================================================
# Export
# ============================================================================

class ExportTests(SimpleTestCase):
    """Tests for PGM and SVG output."""

    def setUp(self):
        self.directory = tempfile.TemporaryDirectory()
        self.addCleanup(self.directory.cleanup)

    def path(self, name):
        return os.path.join(self.directory.name, name)

    def test_all_inside_pgm(self):
        grid = Grid(0, 1, 0, 1, 2, 2)
        bitmap = Bitmap(grid, np.ones((2, 2), dtype=bool), np.zeros((2, 2), dtype=bool))
        write_pgm(bitmap, self.path('full.pgm'))
        with open(self.path('full.pgm'), 'rb') as stream:
            data = stream.read()
        self.assertEqual(data, b'P5\n2 2\n255\n' + b'\xff' * 4)
        self.assertEqual(data, pgm_bytes(bitmap))

    def test_pgm_top_row_is_y_max(self):
        half_plane = sample_membership(from_inequality(parse_scalar('y'), 10), Grid(-1, 1, -1, 1, 2, 2))
        self.assertTrue(pgm_bytes(half_plane).endswith(b'\x00\x00\xff\xff'))

    def test_single_cell(self):
        bitmap = sample_membership(from_inequality(DISK, 50), Grid(-1, 1, -1, 1, 1, 1))
        self.assertTrue(pgm_bytes(bitmap).endswith(b'\n255\n\xff'))

    def test_checksum(self):
        bitmap = sample_membership(from_inequality(DISK, 50), Grid(-3, 3, -3, 3, 20, 20))
        self.assertEqual(bitmap_checksum(bitmap), bitmap_checksum(bitmap.complement().complement()))
        self.assertNotEqual(bitmap_checksum(bitmap), bitmap_checksum(bitmap.complement()))

    def test_empty_svg(self):
        contours = marching_squares(
            from_inequality(parse_scalar('(x-100)^2+y^2-1'), 1), Grid(-3, 3, -3, 3, 10, 10)
        )
        write_svg(contours, self.path('empty.svg'))
        root = ElementTree.parse(self.path('empty.svg')).getroot()
        self.assertEqual(root.get('viewBox'), '-3 -3 6 6')
        self.assertEqual(root.findall('.//{http://www.w3.org/2000/svg}path'), [])

    def test_svg_paths_flip_y(self):
        half_plane = from_inequality(parse_scalar('y-0.5'), 1)
        document = render_svg(marching_squares(half_plane, Grid(-1, 1, -1, 1, 4, 4)))
        paths = ElementTree.fromstring(document).findall('.//{http://www.w3.org/2000/svg}path')
        self.assertEqual(len(paths), 1)
        self.assertIn('-0.500000', paths[0].get('d'))

    def test_closed_loops_end_with_z(self):
        contours = marching_squares(from_inequality(DISK, 1), Grid(-3, 3, -3, 3, 30, 30))
        document = render_svg(contours)
        self.assertTrue(document.rstrip().endswith('</svg>'))
        self.assertIn(' Z', document)

    def test_unwritable_path(self):
        bitmap = sample_membership(from_inequality(DISK, 50), Grid(-1, 1, -1, 1, 2, 2))
        with self.assertRaises(ExportError):
            write_pgm(bitmap, self.path('missing/dir/out.pgm'))
        with self.assertRaises(ExportError):
            write_svg(marching_squares(from_inequality(DISK, 1), Grid(-3, 3, -3, 3, 8, 8)),
                      self.path('missing/dir/out.svg'))
