import math

import numpy as np
from django.test import SimpleTestCase
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.django import SimpleTestCase as HypothesisTestCase

from .domain import domain_margin
from .evaluation import eval_dual, eval_scalar, evaluate
from .exceptions import ExpressionSyntaxError, InvalidPoint
from .latex import emit_latex, format_number
from .nodes import Add, Constant, Neg, Point, Pow, Sub, Var, free_variables
from .parser import parse_scalar

FIXTURE_EXPRESSIONS = [
    'x^2+y^2-4',
    '(x-2.5)^2+y^2-4',
    '(3*(x-0.45))^1.4-y',
    '3*(y-0.1)-258.18*((1.9*x+0.1)*(1.9*x-0.1))^1.6',
    '-((0.5*(y+1.6))^0.8+(x+2))',
    'sin(x)-y',
    '-(x/3)^2+10-y',
    'exp(x*y)-ln(abs(x)+1)+cos(y)',
    '1/(x^2+1)-y',
    'x^-1+2^y',
    '--x',
]

# Expressions that stay smooth away from a few measure-zero sets.
SMOOTH_EXPRESSIONS = [
    'x^2+y^2-4',
    '(x-2.5)^2+y^2-4',
    'sin(x)*cos(y)-x/3',
    'exp(x/4)-ln(y^2+1)',
    '(x^2+1)^1.5-y',
    '1/(x^2+y^2+1)',
    '(3*(x-0.45))^1.4-y',
    'abs(x-y)^3',
]

coordinates = st.floats(min_value=-3.0, max_value=3.0, allow_nan=False)


# ============================================================================
# Parsing
# ============================================================================

class ParseScalarTests(SimpleTestCase):
    """Tests for parse_scalar."""

    def test_circle_evaluates_to_minus_four_at_origin(self):
        expr = parse_scalar('x^2+y^2-4')
        self.assertIsInstance(expr, Sub)
        self.assertEqual(eval_scalar(expr, Point(0, 0)), -4.0)

    def test_batman_component(self):
        expr = parse_scalar('(3*(x-0.45))^1.4-y')
        expected = Sub(
            Pow(
                parse_scalar('3*(x-0.45)'),
                Constant(1.4),
            ),
            Var('y'),
        )
        self.assertEqual(expr, expected)

    def test_truncated_input_reports_position(self):
        with self.assertRaises(ExpressionSyntaxError) as ctx:
            parse_scalar('x^')
        self.assertEqual(ctx.exception.position, 2)

    def test_power_is_right_associative(self):
        self.assertEqual(
            parse_scalar('x^y^2'),
            Pow(Var('x'), Pow(Var('y'), Constant(2.0))),
        )

    def test_unary_minus_binds_looser_than_power(self):
        self.assertEqual(parse_scalar('-x^2'), Neg(Pow(Var('x'), Constant(2.0))))
        self.assertEqual(eval_scalar(parse_scalar('-x^2'), Point(3, 0)), -9.0)

    def test_signed_exponent(self):
        self.assertEqual(eval_scalar(parse_scalar('x^-1'), Point(4, 0)), 0.25)

    def test_juxtaposition_is_rejected(self):
        with self.assertRaises(ExpressionSyntaxError):
            parse_scalar('1.9x')

    def test_unknown_name_is_rejected(self):
        with self.assertRaises(ExpressionSyntaxError) as ctx:
            parse_scalar('x+z')
        self.assertEqual(ctx.exception.position, 2)

    def test_unbalanced_parenthesis(self):
        with self.assertRaises(ExpressionSyntaxError):
            parse_scalar('(x+1')
        with self.assertRaises(ExpressionSyntaxError):
            parse_scalar('x+1)')

    def test_empty_text(self):
        with self.assertRaises(ExpressionSyntaxError):
            parse_scalar('   ')

    def test_non_ascii_is_rejected(self):
        with self.assertRaises(ExpressionSyntaxError) as ctx:
            parse_scalar('x−y')
        self.assertEqual(ctx.exception.position, 1)

    def test_latex_spellings(self):
        expr = parse_scalar('\\left(x-2\\right)^2+\\left(y-3.3\\right)^2')
        self.assertEqual(expr, parse_scalar('(x-2)^2+(y-3.3)^2'))
        self.assertEqual(parse_scalar('\\frac{x}{2}'), parse_scalar('x/2'))
        self.assertEqual(parse_scalar('\\left|x\\right|'), parse_scalar('abs(x)'))
        self.assertEqual(parse_scalar('e^{x\\cdot y}'), parse_scalar('exp(x*y)'))
        self.assertEqual(parse_scalar('\\ln\\left(x\\right)'), parse_scalar('ln(x)'))

    def test_parsing_is_deterministic(self):
        for text in FIXTURE_EXPRESSIONS:
            self.assertEqual(parse_scalar(text), parse_scalar(text))

    def test_free_variables(self):
        self.assertEqual(free_variables(parse_scalar('sin(x)+1')), {'x'})
        self.assertEqual(free_variables(parse_scalar('x*y')), {'x', 'y'})
        self.assertEqual(free_variables(parse_scalar('2')), set())


# ============================================================================
# Evaluation
# ============================================================================

class EvalScalarTests(SimpleTestCase):
    """Tests for eval_scalar and the NaN policy."""

    def test_circle_boundary(self):
        self.assertEqual(eval_scalar(parse_scalar('x^2+y^2-4'), Point(2, 0)), 0.0)

    def test_log_of_negative_is_nan(self):
        self.assertTrue(math.isnan(eval_scalar(parse_scalar('ln(x)'), Point(-1, 0))))
        self.assertTrue(math.isnan(eval_scalar(parse_scalar('ln(x)'), Point(0, 0))))

    def test_division_by_zero_is_nan(self):
        self.assertTrue(math.isnan(eval_scalar(parse_scalar('1/x'), Point(0, 0))))

    def test_zero_to_negative_power_is_nan(self):
        self.assertTrue(math.isnan(eval_scalar(parse_scalar('x^-2'), Point(0, 0))))

    def test_negative_base_with_fractional_exponent_is_nan(self):
        self.assertTrue(math.isnan(eval_scalar(parse_scalar('x^1.4'), Point(-1, 0))))

    def test_negative_base_with_integer_exponent(self):
        self.assertEqual(eval_scalar(parse_scalar('x^3'), Point(-2, 0)), -8.0)
        self.assertEqual(eval_scalar(parse_scalar('x^(1+1)'), Point(-2, 0)), 4.0)

    def test_nearly_integer_exponent_counts_as_integer(self):
        expr = Pow(Var('x'), Constant(2.0 + 1e-12))
        self.assertAlmostEqual(eval_scalar(expr, Point(-2, 0)), 4.0)

    def test_vectorised_matches_pointwise(self):
        expr = parse_scalar('(3*(x-0.45))^1.4-y')
        xs = np.linspace(-1, 2, 7)
        ys = np.linspace(-1, 1, 7)
        values = evaluate(expr, xs, ys)
        for x, y, value in zip(xs, ys, values):
            expected = eval_scalar(expr, Point(x, y))
            if math.isnan(expected):
                self.assertTrue(math.isnan(value))
            else:
                self.assertEqual(value, expected)

    def test_point_must_be_finite(self):
        with self.assertRaises(InvalidPoint):
            Point(math.inf, 0)


class EvalDualTests(SimpleTestCase):
    """Tests for forward-mode derivatives."""

    def test_polynomial(self):
        dual = eval_dual(parse_scalar('x^2+y^2-4'), Point(1, 2))
        self.assertEqual((dual.value, dual.dx, dual.dy), (1.0, 2.0, 4.0))

    def test_sine(self):
        dual = eval_dual(parse_scalar('sin(x)'), Point(0, 0))
        self.assertEqual((dual.value, dual.dx, dual.dy), (0.0, 1.0, 0.0))

    def test_variable_exponent(self):
        dual = eval_dual(parse_scalar('2^x'), Point(1, 0))
        self.assertAlmostEqual(dual.value, 2.0)
        self.assertAlmostEqual(dual.dx, 2.0 * math.log(2.0))

    def test_nan_propagates(self):
        dual = eval_dual(parse_scalar('ln(x)+y'), Point(-1, 0))
        self.assertTrue(math.isnan(dual.value))

    def test_flat_direction_stays_zero_at_power_singularity(self):
        dual = eval_dual(parse_scalar('x^0.5'), Point(0, 1))
        self.assertEqual(dual.dy, 0.0)

    def test_matches_central_differences_at_random_points(self):
        rng = np.random.default_rng(20240517)
        step = 1e-5
        for text in SMOOTH_EXPRESSIONS:
            expr = parse_scalar(text)
            checked = 0
            while checked < 100:
                point = Point(*rng.uniform(-3, 3, size=2))
                margin = domain_margin(expr, point.x, point.y)
                if not margin > 1e-3:
                    continue
                dual = eval_dual(expr, point)
                fd_x = (
                    eval_scalar(expr, point.shifted(dx=step))
                    - eval_scalar(expr, point.shifted(dx=-step))
                ) / (2 * step)
                fd_y = (
                    eval_scalar(expr, point.shifted(dy=step))
                    - eval_scalar(expr, point.shifted(dy=-step))
                ) / (2 * step)
                for exact, approx in ((dual.dx, fd_x), (dual.dy, fd_y)):
                    scale = max(abs(exact), abs(approx), 1.0)
                    self.assertLess(abs(exact - approx) / scale, 1e-5, msg=f'{text} at {point}')
                checked += 1


class DomainMarginTests(SimpleTestCase):
    """Tests for domain_margin."""

    def test_smooth_polynomial_has_no_limit(self):
        self.assertEqual(float(domain_margin(parse_scalar('x^2+y'), 0.3, 0.1)), math.inf)

    def test_abs_kink(self):
        self.assertAlmostEqual(float(domain_margin(parse_scalar('abs(x-1)'), 1.25, 0)), 0.25)

    def test_fractional_power_base(self):
        margin = float(domain_margin(parse_scalar('(3*(x-0.45))^1.4'), 0.5, 0))
        self.assertAlmostEqual(margin, 0.15)

    def test_undefined_point_is_nan(self):
        self.assertTrue(math.isnan(float(domain_margin(parse_scalar('ln(x)'), -1, 0))))


# ============================================================================
# LaTeX emission
# ============================================================================

class EmitLatexTests(SimpleTestCase):
    """Tests for emit_latex."""

    def test_constant(self):
        self.assertEqual(emit_latex(Constant(2.5)), '2.5')
        self.assertEqual(format_number(50.0), '50')
        self.assertEqual(format_number(0.1), '0.1')

    def test_braced_exponent(self):
        self.assertEqual(emit_latex(parse_scalar('(x-2)^2')), '\\left(x-2\\right)^{2}')

    def test_functions(self):
        self.assertEqual(emit_latex(parse_scalar('exp(x)')), 'e^{x}')
        self.assertEqual(emit_latex(parse_scalar('ln(x)')), '\\ln\\left(x\\right)')
        self.assertEqual(emit_latex(parse_scalar('abs(x)')), '\\left|x\\right|')
        self.assertEqual(emit_latex(parse_scalar('x/2')), '\\frac{x}{2}')

    def test_grouping_is_preserved(self):
        self.assertEqual(emit_latex(parse_scalar('x-(y-1)')), 'x-\\left(y-1\\right)')
        self.assertEqual(emit_latex(parse_scalar('-(2*x)')), '-\\left(2\\cdot x\\right)')
        self.assertEqual(emit_latex(Add(Var('x'), Neg(Var('y')))), 'x+-y')

    def test_emit_parse_emit_is_a_fixed_point(self):
        for text in FIXTURE_EXPRESSIONS:
            once = emit_latex(parse_scalar(text))
            self.assertEqual(emit_latex(parse_scalar(once)), once)

    def test_parse_of_emit_is_the_same_tree(self):
        for text in FIXTURE_EXPRESSIONS:
            expr = parse_scalar(text)
            self.assertEqual(parse_scalar(emit_latex(expr)), expr)


class RoundTripPropertyTests(HypothesisTestCase):
    """Round-trip through LaTeX evaluates identically."""

    @settings(max_examples=100, deadline=None)
    @given(
        text=st.sampled_from(FIXTURE_EXPRESSIONS),
        x=coordinates,
        y=coordinates,
    )
    def test_round_trip_evaluates_identically(self, text, x, y):
        expr = parse_scalar(text)
        again = parse_scalar(emit_latex(expr))
        point = Point(x, y)
        before = eval_scalar(expr, point)
        after = eval_scalar(again, point)
        if math.isnan(before):
            self.assertTrue(math.isnan(after))
        else:
            self.assertLessEqual(abs(before - after), 1e-12 * max(1.0, abs(before)))

    @settings(max_examples=100, deadline=None)
    @given(x=coordinates, y=coordinates)
    def test_dual_value_matches_plain_value(self, x, y):
        point = Point(x, y)
        for text in FIXTURE_EXPRESSIONS:
            expr = parse_scalar(text)
            plain = eval_scalar(expr, point)
            dual = eval_dual(expr, point).value
            if math.isnan(plain):
                self.assertTrue(math.isnan(dual))
            else:
                self.assertEqual(plain, dual)
