import io
import os
import tempfile

from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase, override_settings

from setlang.compiler import compile_program
from setlang.loader import load_program, resolve_program

from .checks import gradient_check
from .demos import DEMOS

CIRCLES_DESMOS = (
    r'((e^{50*(\left(x-2.5\right)^{2}+y^{2}-4)})^{ -1}'
    r'+(e^{50*(x^{2}+y^{2}-4)})^{ -1} )^{ -1}\le1'
)
APPENDIX_RESULT = (
    r'e^{50*(x-2)}+e^{50*(\left(x-2\right)^2+\left(y-3.3\right)^2)}'
    r'+e^{50*(\left(x-2\right)^2+\left(y-3.3\right)^2)}\le1'
)
BATMAN_512_CHECKSUM = 'cc29f192a2be5571140aaf82c20a72d082868309e90bf99291d1fe719371c11a'


def run(*args):
    """Call a management command, returning its stdout lines."""
    out = io.StringIO()
    call_command(*args, stdout=out, stderr=io.StringIO())
    return out.getvalue().splitlines()


def table(lines):
    header, *rows = lines
    keys = header.split('\t')
    return [dict(zip(keys, row.split('\t'))) for row in rows]


class TemporaryDirectoryMixin:
    def setUp(self):
        super().setUp()
        self.directory = tempfile.TemporaryDirectory()
        self.addCleanup(self.directory.cleanup)

    def path(self, name):
        return os.path.join(self.directory.name, name)

    def write(self, name, text):
        with open(self.path(name), 'w', encoding='utf-8') as stream:
            stream.write(text)
        return self.path(name)


# ============================================================================
# compile
# ============================================================================

class CompileCommandTests(TemporaryDirectoryMixin, SimpleTestCase):
    """Tests for the compile command."""

    def test_circles(self):
        self.assertEqual(run('compile', 'circles'), [CIRCLES_DESMOS])

    def test_sharpness_override(self):
        (line,) = run('compile', 'circles', '--sharpness', '5')
        self.assertEqual(line.count('e^{5*('), 2)

    def test_latex_matches_desmos_for_program_files(self):
        self.assertEqual(run('compile', 'circles', '--emit', 'latex'), [CIRCLES_DESMOS])

    def test_appendix_replay(self):
        self.assertEqual(run('compile', '--appendix'), [APPENDIX_RESULT])

    def test_appendix_trace(self):
        lines = run('compile', '--appendix', '--trace')
        self.assertEqual(len(lines), 6)
        self.assertEqual(lines[0], '0 []')
        self.assertEqual(lines[-1], APPENDIX_RESULT)

    def test_appendix_latex_normalises_bodies(self):
        (line,) = run('compile', '--appendix', '--emit', 'latex')
        self.assertIn(r'\left(x-2\right)^{2}', line)
        self.assertTrue(line.endswith(r'\le1'))

    def test_file_path(self):
        path = self.write('half.set', 'def a : x\nexpr postfix a!\n')
        self.assertEqual(run('compile', path), ['e^{-50*(x)}\\le1'])

    def test_missing_file(self):
        with self.assertRaises(CommandError) as context:
            run('compile', 'no/such/program.set')
        self.assertEqual(context.exception.returncode, 1)
        self.assertIn('no/such/program.set', str(context.exception))

    def test_malformed_file(self):
        path = self.write('bad.set', 'def a : x\nexpr postfix ab&\n')
        with self.assertRaises(CommandError) as context:
            run('compile', path)
        self.assertIn('line 2', str(context.exception))

    def test_conflicting_flags(self):
        for args in (('compile', 'circles', '--trace'), ('compile', '--appendix', '--sharpness', '5'), ('compile',)):
            with self.subTest(args=args):
                with self.assertRaises(CommandError):
                    run(*args)

    def test_invalid_sharpness(self):
        with self.assertRaises(CommandError) as context:
            run('compile', 'circles', '--sharpness', '-1')
        self.assertIn('sharpness', str(context.exception))


# ============================================================================
# render
# ============================================================================

class RenderCommandTests(TemporaryDirectoryMixin, SimpleTestCase):
    """Tests for the render command."""

    def test_single_cell(self):
        lines = run('render', 'circles', '--grid', '-1', '1', '-1', '1', '--resolution', '1', '--out', self.path('one.pgm'))
        (row,) = table(lines)
        self.assertEqual(row['cells'], '1')
        self.assertEqual(row['inside'], '1')
        with open(self.path('one.pgm'), 'rb') as stream:
            self.assertEqual(stream.read(), b'P5\n1 1\n255\n\xff')

    def test_example1_with_contour(self):
        (row,) = table(run(
            'render', 'example1', '--resolution', '96',
            '--out', self.path('example1.pgm'), '--contour', self.path('example1.svg'),
        ))
        self.assertGreater(float(row['inside_fraction']), 0)
        self.assertTrue(os.path.getsize(self.path('example1.svg')) > 0)

    def test_rectangular_resolution(self):
        (row,) = table(run('render', 'circles', '--resolution', '20', '10'))
        self.assertEqual(row['cells'], '200')

    def test_batman_is_deterministic(self):
        single = table(run('render', 'batman', '--resolution', '128', '--workers', '1'))
        threaded = table(run('render', 'batman', '--resolution', '128', '--workers', '4'))
        self.assertEqual(single, threaded)
        self.assertNotEqual(single[0]['undefined'], '0')

    def test_batman_matches_the_golden_bitmap(self):
        (row,) = table(run('render', 'batman', '--resolution', '512'))
        self.assertEqual(row['cells'], '262144')
        self.assertEqual(row['inside'], '6838')
        self.assertEqual(row['undefined'], '196988')
        self.assertEqual(row['checksum'], BATMAN_512_CHECKSUM)

    def test_invalid_options(self):
        for args in (
            ('--grid', '1', '0', '0', '1'),
            ('--grid', '0', 'inf', '0', '1'),
            ('--resolution', '0'),
            ('--resolution', '4', '4', '4'),
            ('--workers', '0'),
            ('--boundary-tol', '-1'),
        ):
            with self.subTest(args=args):
                with self.assertRaises(CommandError) as context:
                    run('render', 'circles', *args)
                self.assertEqual(context.exception.returncode, 1)

    @override_settings(REGION_ALGEBRA={'MAX_GRID_CELLS': 100})
    def test_grid_too_large(self):
        with self.assertRaises(CommandError) as context:
            run('render', 'circles', '--resolution', '11')
        self.assertIn('limit of 100', str(context.exception))

    def test_unwritable_output(self):
        with self.assertRaises(CommandError):
            run('render', 'circles', '--resolution', '4', '--out', self.path('missing/out.pgm'))


# ============================================================================
# error_map
# ============================================================================

class ErrorMapCommandTests(SimpleTestCase):
    """Tests for the error_map command."""

    def test_circles_converge(self):
        rows = table(run('error_map', 'circles', '--a-list', '2,5,10,20,50', '--resolution', '128', '--check'))
        self.assertEqual([row['a'] for row in rows], ['2', '5', '10', '20', '50'])
        fractions = [float(row['mismatch']) for row in rows]
        self.assertLess(fractions[-1], fractions[0])
        for row in rows:
            quadrants = sum(int(row[name]) for name in ('lower_left', 'lower_right', 'upper_left', 'upper_right'))
            self.assertEqual(quadrants, int(row['differing_cells']))

    def test_single_value(self):
        self.assertEqual(len(table(run('error_map', 'circles', '--a-list', '7', '--resolution', '32'))), 1)

    def test_compare_distributive_forms(self):
        rows = table(run('error_map', 'eq12', '--compare', 'eq13', '--a-list', '5,50', '--resolution', '128'))
        self.assertLess(float(rows[1]['mismatch']), float(rows[0]['mismatch']))

    def test_check_fails_when_mismatch_grows(self):
        with self.assertRaises(CommandError) as context:
            run('error_map', 'circles', '--a-list', '50,2', '--resolution', '64', '--check')
        self.assertEqual(context.exception.returncode, 2)

    def test_bad_a_list(self):
        for value, message in (('5,-1', 'positive and finite'), ('5,x', 'Not a number'), ('', 'blank')):
            with self.subTest(value=value):
                with self.assertRaises(CommandError) as context:
                    run('error_map', 'circles', '--a-list', value)
                self.assertEqual(context.exception.returncode, 1)
                self.assertIn(message, str(context.exception))


# ============================================================================
# gradcheck
# ============================================================================

class GradcheckCommandTests(TemporaryDirectoryMixin, SimpleTestCase):
    """Tests for the gradcheck command and gradient_check."""

    def test_circles_pass(self):
        (row,) = table(run('gradcheck', 'circles', '--points', '100', '--seed', '3'))
        self.assertEqual(row['checked'], '100')
        self.assertEqual(row['result'], 'pass')

    def test_seed_reproducible(self):
        first = run('gradcheck', 'eq12', '--points', '50', '--seed', '11')
        second = run('gradcheck', 'eq12', '--points', '50', '--seed', '11')
        self.assertEqual(first, second)

    def test_kinks_are_excluded(self):
        path = self.write('diamond.set', 'sharpness 5\nwindow -2 2 -2 2\ndef a : abs(x)+abs(y)-1\nexpr postfix a\n')
        (row,) = table(run('gradcheck', path, '--points', '200', '--seed', '1', '--margin', '0.05'))
        self.assertEqual(row['result'], 'pass')
        self.assertGreater(int(row['excluded']), 0)

    def test_failure_exit_code(self):
        with self.assertRaises(CommandError) as context:
            run('gradcheck', 'circles', '--points', '20', '--tolerance', '1e-30')
        self.assertEqual(context.exception.returncode, 2)

    def test_bad_points(self):
        with self.assertRaises(CommandError) as context:
            run('gradcheck', 'circles', '--points', '0')
        self.assertEqual(context.exception.returncode, 1)

    def test_report(self):
        region = compile_program(load_program(resolve_program('circles')))
        report = gradient_check(region, (-3, 5, -4, 4), 25, seed=5)
        self.assertTrue(report.passed)
        self.assertEqual(report.checked, 25)
        self.assertEqual(report, gradient_check(region, (-3, 5, -4, 4), 25, seed=5))


# ============================================================================
# demo
# ============================================================================

class DemoCommandTests(TemporaryDirectoryMixin, SimpleTestCase):
    """Tests for the demo command."""

    def demo(self, name, resolution='48'):
        return run('demo', name, '--out-dir', self.directory.name, '--resolution', resolution)

    def test_every_demo_runs(self):
        expected_files = {
            'circles': ['circles.pgm', 'circles.svg'],
            'batman': ['batman.pgm', 'batman.svg'],
            'example1': ['example1.pgm', 'example1.svg'],
            'distributive': ['eq12.pgm', 'eq13.pgm'],
            'softplus': ['softplus.pgm', 'softplus.svg'],
            'minmax': ['min.pgm', 'max.pgm'],
            'animation': ['animation_00.pgm', 'animation_05.pgm'],
            'xnor': ['xnor.pgm'],
        }
        self.assertEqual(set(DEMOS), set(expected_files))
        for name, files in expected_files.items():
            with self.subTest(name=name):
                self.assertTrue(self.demo(name))
                for file in files:
                    self.assertTrue(os.path.isfile(self.path(file)), file)

    def test_softplus_table(self):
        lines = self.demo('softplus', '16')
        rows = table(lines[lines.index('a\tx\tboundary\tsoftplus\tdelta'):])
        self.assertEqual(len(rows), 33)
        self.assertTrue(all(float(row['delta']) < 1e-9 for row in rows))

    def test_circles_prints_the_inequality(self):
        lines = self.demo('circles', '32')
        self.assertEqual(lines[0], CIRCLES_DESMOS)

    def test_unknown_demo(self):
        with self.assertRaises(CommandError):
            self.demo('teapot')
