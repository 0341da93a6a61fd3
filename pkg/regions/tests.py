import itertools
import math

import numpy as np
from django.test import SimpleTestCase
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.django import SimpleTestCase as HypothesisTestCase

from expressions.evaluation import eval_scalar, evaluate
from expressions.nodes import Neg, Point
from expressions.parser import parse_scalar

from .algebra import (
    from_even_power,
    from_inequality,
    intersect,
    iter_leaves,
    negate,
    raw_product,
    union,
)
from .evaluation import (
    Membership,
    bounded_field,
    field,
    grad_log_field,
    log_field,
    membership,
    regularity_margin,
    xor_product_membership,
)
from .exceptions import EmptyOperandList, InvalidSharpness, InvalidTolerance, NoSignChange, NotUnivariate
from .functions import (
    boundary_solve_y,
    membership_loss,
    smooth_max,
    smooth_min,
    softplus_boundary,
)

CIRCLE_A = parse_scalar('x^2+y^2-4')
CIRCLE_B = parse_scalar('(x-2.5)^2+y^2-4')
DISTRIBUTIVE_A = parse_scalar('x^2+y^2-4')
DISTRIBUTIVE_B = parse_scalar('(x-1.5)^2+y^2-4')
DISTRIBUTIVE_C = parse_scalar('(x-0.7)^2+(y-1.5)^2-4')

MIN_SET = [parse_scalar(t) for t in ('sin(x)', 'x+5', '-x+5', '-(x/3)^2+10')]
MAX_SET = [parse_scalar(t) for t in ('x-5', '-x-5', 'sin(x)')]


def circle_union(a=50):
    return union([from_inequality(CIRCLE_A, a), from_inequality(CIRCLE_B, a)])


def distributive_pair(a=50):
    A, B, C = (from_inequality(f, a) for f in (DISTRIBUTIVE_A, DISTRIBUTIVE_B, DISTRIBUTIVE_C))
    factored = intersect([A, union([B, C])])
    expanded = union([intersect([A, B]), intersect([A, C])])
    return factored, expanded


def fixture_regions(a=50):
    leaf_a = from_inequality(CIRCLE_A, a)
    leaf_b = from_inequality(CIRCLE_B, a)
    factored, expanded = distributive_pair(a)
    return [
        leaf_a,
        circle_union(a),
        intersect([leaf_a, leaf_b]),
        negate(leaf_b),
        factored,
        expanded,
        union([negate(leaf_a), intersect([leaf_b, negate(factored)])]),
    ]


coordinates = st.floats(min_value=-3.0, max_value=3.0, allow_nan=False)
sharpness = st.floats(min_value=1.0, max_value=50.0, allow_nan=False)


# ============================================================================
# Constructors and leaves
# ============================================================================

class ConstructorTests(SimpleTestCase):
    """Tests for region constructors."""

    def test_leaf_log_field(self):
        leaf = from_inequality(CIRCLE_A, 50)
        self.assertEqual(log_field(leaf, Point(0, 0)), -200.0)
        self.assertEqual(membership(leaf, Point(0, 0), 1e-9), Membership.INSIDE)
        self.assertEqual(log_field(leaf, Point(2, 0)), 0.0)
        self.assertEqual(membership(leaf, Point(2, 0), 1e-9), Membership.BOUNDARY)
        self.assertEqual(log_field(leaf, Point(3, 0)), 250.0)
        self.assertEqual(membership(leaf, Point(3, 0), 1e-9), Membership.OUTSIDE)

    def test_invalid_sharpness(self):
        for bad in (0, -1.0, math.inf, math.nan, True, '50'):
            with self.assertRaises(InvalidSharpness):
                from_inequality(CIRCLE_A, bad)

    def test_even_power_leaf(self):
        leaf = from_even_power(parse_scalar('x'), 1)
        self.assertAlmostEqual(log_field(leaf, Point(0.5, 0)), 2 * math.log(0.5))
        self.assertEqual(membership(leaf, Point(0.5, 0)), Membership.INSIDE)
        # the encoding also admits negative values of f
        self.assertEqual(membership(leaf, Point(-0.5, 0)), Membership.INSIDE)
        self.assertEqual(membership(leaf, Point(2, 0)), Membership.OUTSIDE)
        self.assertEqual(log_field(leaf, Point(0, 0)), -math.inf)
        self.assertEqual(membership(leaf, Point(0, 0)), Membership.INSIDE)

    def test_even_power_sharpness_must_be_positive_integer(self):
        for bad in (0, 1.5, -2, True):
            with self.assertRaises(InvalidSharpness):
                from_even_power(parse_scalar('x'), bad)

    def test_even_power_composes(self):
        band = intersect([from_even_power(parse_scalar('x'), 2), from_inequality(parse_scalar('y'), 10)])
        self.assertEqual(membership(band, Point(0.5, -1)), Membership.INSIDE)
        self.assertEqual(membership(band, Point(0.5, 1)), Membership.OUTSIDE)

    def test_empty_operands(self):
        with self.assertRaises(EmptyOperandList):
            intersect([])
        with self.assertRaises(EmptyOperandList):
            union([])

    def test_iter_leaves(self):
        factored, _ = distributive_pair()
        self.assertEqual(len(list(iter_leaves(factored))), 3)


# ============================================================================
# Set operations
# ============================================================================

class SetOperationTests(SimpleTestCase):
    """Tests for negate, intersect and union."""

    def test_negate_flips_the_log_field(self):
        leaf = from_inequality(CIRCLE_A, 50)
        self.assertEqual(log_field(negate(leaf), Point(0, 0)), 200.0)
        self.assertEqual(membership(negate(leaf), Point(0, 0)), Membership.OUTSIDE)
        point = Point(0.7, -1.3)
        self.assertEqual(log_field(negate(negate(leaf)), point), log_field(leaf, point))

    def test_intersection_of_circles_at_origin(self):
        region = intersect([from_inequality(CIRCLE_A, 50), from_inequality(CIRCLE_B, 50)])
        value = log_field(region, Point(0, 0))
        self.assertAlmostEqual(value, 112.5, places=9)
        self.assertEqual(membership(region, Point(0, 0)), Membership.OUTSIDE)

    def test_single_child_is_transparent(self):
        leaf = from_inequality(CIRCLE_A, 50)
        point = Point(0.3, 0.4)
        self.assertEqual(log_field(intersect([leaf]), point), log_field(leaf, point))
        self.assertEqual(log_field(union([leaf]), point), log_field(leaf, point))

    def test_identical_children_shift_by_log_n(self):
        leaf = from_inequality(CIRCLE_A, 5)
        point = Point(0.3, 0.4)
        base = log_field(leaf, point)
        self.assertAlmostEqual(log_field(intersect([leaf] * 3), point), base + math.log(3), places=12)
        self.assertAlmostEqual(log_field(union([leaf, leaf]), point), base - math.log(2), places=12)

    def test_union_of_circles(self):
        region = circle_union()
        self.assertAlmostEqual(log_field(region, Point(0, 0)), -200.0, places=9)
        self.assertEqual(membership(region, Point(0, 0)), Membership.INSIDE)
        self.assertAlmostEqual(log_field(region, Point(5, 0)), 112.5, places=9)
        self.assertEqual(membership(region, Point(5, 0)), Membership.OUTSIDE)
        # (4, 0) lies inside the right circle
        self.assertEqual(membership(region, Point(4, 0)), Membership.INSIDE)

    def test_nan_propagates_to_undefined(self):
        region = intersect([from_inequality(parse_scalar('ln(x)'), 1), from_inequality(CIRCLE_A, 50)])
        self.assertTrue(math.isnan(log_field(region, Point(-1, 0))))
        self.assertEqual(membership(region, Point(-1, 0)), Membership.UNDEFINED)

    def test_field_under_and_overflow(self):
        leaf = from_inequality(CIRCLE_A, 50)
        self.assertEqual(field(leaf, Point(2, 0)), 1.0)
        self.assertEqual(field(leaf, Point(0, 0)), float(np.exp(-200.0)))
        far = from_inequality(parse_scalar('x'), 100)
        self.assertEqual(field(far, Point(8, 0)), math.inf)
        self.assertEqual(membership(far, Point(8, 0)), Membership.OUTSIDE)

    def test_deep_inside_eq12_intersection(self):
        factored, _ = distributive_pair()
        self.assertLess(log_field(factored, Point(0.5, 0)), -50)

    def test_negative_tolerance_is_rejected(self):
        with self.assertRaises(InvalidTolerance):
            membership(from_inequality(CIRCLE_A, 50), Point(0, 0), -1.0)


class AlgebraicIdentityTests(HypothesisTestCase):
    """Exact identities of the log-domain algebra."""

    @settings(max_examples=250, deadline=None)
    @given(x=coordinates, y=coordinates, a=sharpness)
    def test_de_morgan(self, x, y, a):
        point = Point(x, y)
        for region in fixture_regions(a):
            for children in ([region, from_inequality(CIRCLE_B, a)], [region]):
                left = log_field(union(children), point)
                right = log_field(negate(intersect([negate(c) for c in children])), point)
                self.assertEqual(left, right)

    @settings(max_examples=250, deadline=None)
    @given(x=coordinates, y=coordinates, a=sharpness)
    def test_commutativity(self, x, y, a):
        point = Point(x, y)
        regions = fixture_regions(a)[:3]
        for operation in (intersect, union):
            reference = log_field(operation(regions), point)
            for order in itertools.permutations(regions):
                self.assertLessEqual(abs(log_field(operation(order), point) - reference), 1e-12 * max(1.0, abs(reference)) + 1e-12)

    @settings(max_examples=250, deadline=None)
    @given(x=coordinates, y=coordinates, a=sharpness)
    def test_associativity(self, x, y, a):
        point = Point(x, y)
        first, second, third = fixture_regions(a)[:3]
        for operation in (intersect, union):
            flat = log_field(operation([first, second, third]), point)
            left = log_field(operation([operation([first, second]), third]), point)
            right = log_field(operation([first, operation([second, third])]), point)
            tolerance = 1e-12 * max(1.0, abs(flat))
            self.assertLessEqual(abs(left - flat), tolerance)
            self.assertLessEqual(abs(right - flat), tolerance)

    @settings(max_examples=250, deadline=None)
    @given(x=coordinates, y=coordinates, a=sharpness)
    def test_double_negation_and_self_union(self, x, y, a):
        point = Point(x, y)
        for region in fixture_regions(a):
            value = log_field(region, point)
            self.assertEqual(log_field(negate(negate(region)), point), value)
            shifted = log_field(union([region, region]), point)
            self.assertLessEqual(abs(shifted - (value - math.log(2))), 1e-12 * max(1.0, abs(value)))

    @settings(max_examples=250, deadline=None)
    @given(x=coordinates, y=coordinates, a=sharpness)
    def test_intersection_is_conservative_and_union_generous(self, x, y, a):
        point = Point(x, y)
        leaves = [from_inequality(f, a) for f in (DISTRIBUTIVE_A, DISTRIBUTIVE_B, DISTRIBUTIVE_C)]
        signs = [eval_scalar(leaf.f, point) for leaf in leaves]
        if log_field(intersect(leaves), point) <= 0:
            self.assertTrue(all(value <= 0 for value in signs))
        if any(value <= 0 for value in signs):
            self.assertLessEqual(log_field(union(leaves), point), 0)

    @settings(max_examples=100, deadline=None)
    @given(x=coordinates, y=coordinates, a=sharpness)
    def test_composability_needs_no_re_encoding(self, x, y, a):
        point = Point(x, y)
        inner = circle_union(a)
        outer = intersect([inner, from_inequality(DISTRIBUTIVE_C, a)])
        expected = np.logaddexp(log_field(inner, point), log_field(from_inequality(DISTRIBUTIVE_C, a), point))
        self.assertAlmostEqual(log_field(outer, point), expected, delta=1e-9 * max(1.0, abs(expected)))


# ============================================================================
# Gradients
# ============================================================================

class GradientTests(SimpleTestCase):
    """Tests for grad_log_field."""

    def test_leaf_gradient(self):
        self.assertEqual(grad_log_field(from_inequality(CIRCLE_A, 50), Point(1, 1)), (100.0, 100.0))

    def test_self_union_keeps_the_gradient(self):
        leaf = from_inequality(CIRCLE_A, 50)
        point = Point(1.2, -0.4)
        gx, gy = grad_log_field(union([leaf, leaf]), point)
        ex, ey = grad_log_field(leaf, point)
        self.assertAlmostEqual(gx, ex, places=9)
        self.assertAlmostEqual(gy, ey, places=9)

    def test_matches_central_differences(self):
        rng = np.random.default_rng(7)
        step = 1e-5
        for a in (5, 50):
            for region in fixture_regions(a):
                checked = 0
                while checked < 100:
                    point = Point(*rng.uniform(-3, 4, size=2))
                    value = log_field(region, point)
                    if not abs(value) > 1e-3 or not regularity_margin(region, point) > 1e-3:
                        continue
                    stencil = [
                        log_field(region, point.shifted(dx=step)),
                        log_field(region, point.shifted(dx=-step)),
                        log_field(region, point.shifted(dy=step)),
                        log_field(region, point.shifted(dy=-step)),
                    ]
                    if any(math.isnan(v) for v in stencil):
                        continue
                    fd_x = (stencil[0] - stencil[1]) / (2 * step)
                    fd_y = (stencil[2] - stencil[3]) / (2 * step)
                    gx, gy = grad_log_field(region, point)
                    for exact, approx in ((gx, fd_x), (gy, fd_y)):
                        scale = max(abs(exact), abs(approx), 1.0)
                        self.assertLess(abs(exact - approx) / scale, 1e-5)
                    checked += 1


# ============================================================================
# Bounded transform and XNOR product
# ============================================================================

class BoundedFieldTests(SimpleTestCase):
    """Tests for bounded_field."""

    def test_reference_values(self):
        leaf = from_inequality(parse_scalar('x'), 1)
        self.assertEqual(bounded_field(leaf, Point(0, 0)), 0.5)
        self.assertAlmostEqual(bounded_field(leaf, Point(math.log(2), 0)), 0.75, places=15)
        self.assertEqual(bounded_field(from_even_power(parse_scalar('x'), 1), Point(0, 0)), 0.0)

    def test_scaled_variant(self):
        leaf = from_inequality(parse_scalar('x'), 1)
        self.assertEqual(bounded_field(leaf, Point(0, 0), scaled=True), 1.0)

    def test_monotone_and_bounded(self):
        leaf = from_inequality(parse_scalar('x'), 1)
        values = [bounded_field(leaf, Point(x, 0)) for x in np.linspace(-20, 3.5, 400)]
        self.assertTrue(all(b > a for a, b in zip(values, values[1:])))
        for x in (-1e3, -5, 0, 5, 1e3):
            value = bounded_field(leaf, Point(x, 0))
            self.assertGreaterEqual(value, 0.0)
            self.assertLess(value, 1.0)


class XorProductTests(SimpleTestCase):
    """Tests for the multiplicative combination."""

    def setUp(self):
        self.raw = raw_product(CIRCLE_A, CIRCLE_B)

    def test_reference_points(self):
        self.assertEqual(xor_product_membership(self.raw, Point(0, 0)), Membership.INSIDE)
        self.assertEqual(xor_product_membership(self.raw, Point(1.25, 0)), Membership.OUTSIDE)
        self.assertEqual(xor_product_membership(self.raw, Point(10, 10)), Membership.OUTSIDE)

    def test_undefined(self):
        raw = raw_product(parse_scalar('ln(x)'), CIRCLE_B)
        self.assertEqual(xor_product_membership(raw, Point(-1, 0)), Membership.UNDEFINED)


# ============================================================================
# Smooth min/max, softplus, loss, boundary search
# ============================================================================

class SmoothMinMaxTests(SimpleTestCase):
    """Tests for smooth_min and smooth_max."""

    def test_single_function_is_identity(self):
        g = [parse_scalar('sin(x)')]
        self.assertAlmostEqual(smooth_min(g, 10, 0.3), math.sin(0.3), places=15)
        self.assertAlmostEqual(smooth_max(g, 10, 0.3), math.sin(0.3), places=15)

    def test_equal_terms(self):
        zeros = [parse_scalar('0'), parse_scalar('0')]
        self.assertAlmostEqual(smooth_min(zeros, 10, 0.0), -math.log(2) / 10, places=15)

    def test_reference_sets_at_zero(self):
        self.assertAlmostEqual(smooth_min(MIN_SET, 10, 0.0), 0.0, places=15)
        self.assertAlmostEqual(smooth_max(MAX_SET, 10, 0.0), 0.0, places=15)

    def test_duality(self):
        negated = [Neg(g) for g in MIN_SET]
        for x in np.linspace(-8, 8, 33):
            self.assertAlmostEqual(smooth_max(MIN_SET, 10, x), -smooth_min(negated, 10, x), delta=1e-12)

    def test_brackets_on_dense_samples(self):
        xs = np.linspace(-15, 15, 1000)
        a = 10
        for gs, operation, exact in ((MIN_SET, smooth_min, np.min), (MAX_SET, smooth_max, np.max)):
            values = np.stack([evaluate(g, xs, 0.0) for g in gs])
            gap = np.abs(operation(gs, a, xs) - exact(values, axis=0))
            signed = exact(values, axis=0) - operation(gs, a, xs)
            if operation is smooth_max:
                signed = -signed
            self.assertTrue(np.all(signed >= 0))
            self.assertTrue(np.all(gap <= math.log(len(gs)) / a + 1e-12))

    def test_rejects_empty_and_bivariate(self):
        with self.assertRaises(EmptyOperandList):
            smooth_min([], 10, 0.0)
        with self.assertRaises(NotUnivariate):
            smooth_max([parse_scalar('x+y')], 10, 0.0)


class SoftplusTests(SimpleTestCase):
    """Tests for softplus_boundary and the union it bounds."""

    def softplus_region(self, a):
        return union([from_inequality(parse_scalar('y'), a), from_inequality(parse_scalar('y-x'), a)])

    def test_reference_value(self):
        self.assertAlmostEqual(softplus_boundary(1, 0.0), math.log(2), places=15)

    def test_relu_limit(self):
        for a in (1, 5, 20, 200):
            gaps = [softplus_boundary(a, x) - max(x, 0.0) for x in np.linspace(-5, 5, 101)]
            self.assertLessEqual(max(gaps), math.log(2) / a + 1e-15)
        self.assertAlmostEqual(softplus_boundary(1000, 1.0), 1.0, places=12)

    def test_equals_smooth_max_of_zero_and_x(self):
        gs = [parse_scalar('0'), parse_scalar('x')]
        for a in (1, 5, 20):
            for x in np.linspace(-5, 5, 21):
                self.assertAlmostEqual(softplus_boundary(a, x), smooth_max(gs, a, x), delta=1e-12)

    def test_boundary_of_union_is_softplus(self):
        for a in (1, 5, 20):
            region = self.softplus_region(a)
            for x in np.linspace(-5, 5, 50):
                root = boundary_solve_y(region, x, -10.0, 10.0)
                self.assertLess(abs(root - softplus_boundary(a, x)), 1e-9)
        self.assertAlmostEqual(boundary_solve_y(self.softplus_region(1), 0.0, -10.0, 10.0), math.log(2), delta=1e-9)


class BoundarySolveTests(SimpleTestCase):
    """Tests for boundary_solve_y."""

    def test_circle_radius(self):
        leaf = from_inequality(CIRCLE_A, 50)
        self.assertAlmostEqual(boundary_solve_y(leaf, 0.0, 0.0, 3.0), 2.0, delta=1e-9)

    def test_no_sign_change(self):
        leaf = from_inequality(CIRCLE_A, 50)
        with self.assertRaises(NoSignChange):
            boundary_solve_y(leaf, 0.0, -1.0, 1.0)


class MembershipLossTests(SimpleTestCase):
    """Tests for membership_loss."""

    def test_points_inside_cost_nothing(self):
        leaf = from_inequality(CIRCLE_A, 50)
        points = [Point(0, 0), Point(0.5, 0.5), Point(-1, 0.2)]
        self.assertEqual(membership_loss(leaf, points), 0.0)

    def test_points_on_boundary_cost_nothing(self):
        leaf = from_inequality(CIRCLE_A, 50)
        self.assertEqual(membership_loss(leaf, [Point(2, 0), Point(0, -2)]), 0.0)

    def test_clipped_point(self):
        leaf = from_inequality(CIRCLE_A, 50)
        self.assertAlmostEqual(membership_loss(leaf, [Point(10, 0)], clip=1e6), 1e6 - 1, delta=1e-6)

    def test_undefined_point_counts_as_clipped(self):
        leaf = from_inequality(parse_scalar('ln(x)'), 1)
        self.assertAlmostEqual(membership_loss(leaf, [Point(-1, 0)], clip=10), 9.0, places=12)

    def test_validation(self):
        leaf = from_inequality(CIRCLE_A, 50)
        with self.assertRaises(EmptyOperandList):
            membership_loss(leaf, [])
        with self.assertRaises(InvalidTolerance):
            membership_loss(leaf, [Point(0, 0)], clip=0.5)
