import io
import math

import numpy as np
from django.test import SimpleTestCase

from expressions.evaluation import eval_scalar
from expressions.nodes import Point
from expressions.parser import parse_scalar
from regions.algebra import (
    Leaf,
    from_even_power,
    from_inequality,
    intersect,
    negate,
    raw_product,
    union,
)
from regions.evaluation import field, log_field

from .appendix import replay_appendix
from .compiler import compile_program
from .desmos import SUFFIX, emit_desmos
from .exceptions import (
    FileFormatError,
    InvalidSymbol,
    LeftoverOperands,
    SetSyntaxError,
    StackUnderflow,
    TranscriptError,
    UnresolvedName,
    UnsupportedNode,
)
from .loader import bundled_programs, load_program, parse_program, programs_dir, resolve_program
from .nodes import APPENDIX_ALPHABET, And, Definition, Not, Or, SetProgram, VarRef
from .parsers import parse_infix, parse_postfix

APPENDIX_RESULT = (
    r'e^{50*(x-2)}+e^{50*(\left(x-2\right)^2+\left(y-3.3\right)^2)}'
    r'+e^{50*(\left(x-2\right)^2+\left(y-3.3\right)^2)}\le1'
)

# The same set expressions written both ways.
EQUIVALENT_FORMS = [
    ('ab|', 'a|b'),
    ('abc|&', 'a&(b|c)'),
    ('ab&ac&|', '(a&b)|(a&c)'),
    ('h!ab&c&d&e|f!|g|&', '!h&((((a&b&c&d)|e)|!f)|g)'),
    ('abcdefghi&&&&&&&&', 'a&(b&(c&(d&(e&(f&(g&(h&i)))))))'),
]


def random_points(count, low=-3.0, high=3.0, seed=11):
    rng = np.random.default_rng(seed)
    return [Point(*rng.uniform(low, high, size=2)) for _ in range(count)]


def bundled(name):
    return load_program(resolve_program(name))


# ============================================================================
# Readers
# ============================================================================

class ParsePostfixTests(SimpleTestCase):
    """Tests for parse_postfix."""

    def test_first_pop_is_the_right_operand(self):
        self.assertEqual(
            parse_postfix('abc&&'), And(VarRef('a'), And(VarRef('b'), VarRef('c')))
        )

    def test_union_and_negation(self):
        self.assertEqual(parse_postfix('ab|'), Or(VarRef('a'), VarRef('b')))
        self.assertEqual(parse_postfix('a!b&'), And(Not(VarRef('a')), VarRef('b')))

    def test_whitespace_is_ignored(self):
        self.assertEqual(parse_postfix(' a b | '), parse_postfix('ab|'))

    def test_stack_underflow(self):
        with self.assertRaises(StackUnderflow) as context:
            parse_postfix('a&')
        self.assertEqual(context.exception.position, 1)
        with self.assertRaises(StackUnderflow):
            parse_postfix('!')

    def test_invalid_symbol(self):
        with self.assertRaises(InvalidSymbol) as context:
            parse_postfix('ab+')
        self.assertEqual(context.exception.position, 2)
        self.assertEqual(context.exception.char, '+')

    def test_coordinates_are_not_set_names(self):
        with self.assertRaises(InvalidSymbol):
            parse_postfix('ax|')
        self.assertEqual(
            parse_postfix('xy|', APPENDIX_ALPHABET), Or(VarRef('x'), VarRef('y'))
        )
        with self.assertRaises(InvalidSymbol):
            parse_postfix('az|', APPENDIX_ALPHABET)

    def test_leftover_operands(self):
        with self.assertRaises(LeftoverOperands) as context:
            parse_postfix('abc&')
        self.assertEqual(context.exception.count, 2)

    def test_empty(self):
        with self.assertRaises(SetSyntaxError):
            parse_postfix('   ')

    def test_trace_sees_the_stack_before_each_symbol(self):
        seen = []
        parse_postfix('ab|', trace=lambda position, stack: seen.append((position, len(stack))))
        self.assertEqual(seen, [(0, 0), (1, 1), (2, 2)])


class ParseInfixTests(SimpleTestCase):
    """Tests for parse_infix."""

    def test_parentheses(self):
        self.assertEqual(
            parse_infix('(a&b)|c'), Or(And(VarRef('a'), VarRef('b')), VarRef('c'))
        )

    def test_precedence(self):
        self.assertEqual(
            parse_infix('a&b|c'), Or(And(VarRef('a'), VarRef('b')), VarRef('c'))
        )
        self.assertEqual(parse_infix('!a&b'), And(Not(VarRef('a')), VarRef('b')))
        self.assertEqual(
            parse_infix('a|b&c'), Or(VarRef('a'), And(VarRef('b'), VarRef('c')))
        )

    def test_left_associative(self):
        self.assertEqual(
            parse_infix('a&b&c'), And(And(VarRef('a'), VarRef('b')), VarRef('c'))
        )

    def test_double_negation(self):
        self.assertEqual(parse_infix('!!a'), Not(Not(VarRef('a'))))

    def test_conjunctive_normal_form(self):
        expr = parse_infix('(a|!b)&(c|d)&!e')
        self.assertIsInstance(expr, And)

    def test_errors(self):
        for text, position in [('a&', 2), ('(a|b', 4), ('a b', 2), ('a&x', 2), ('', 0), ('a)', 1)]:
            with self.subTest(text=text):
                with self.assertRaises(SetSyntaxError) as context:
                    parse_infix(text)
                self.assertEqual(context.exception.position, position)

    def test_agrees_with_postfix(self):
        for postfix, infix in EQUIVALENT_FORMS:
            with self.subTest(infix=infix):
                self.assertEqual(parse_postfix(postfix), parse_infix(infix))


# ============================================================================
# Compilation
# ============================================================================

class CompileProgramTests(SimpleTestCase):
    """Tests for compile_program."""

    def setUp(self):
        self.circle_a = parse_scalar('x^2+y^2-4')
        self.circle_b = parse_scalar('(x-2.5)^2+y^2-4')
        self.definitions = (Definition('a', self.circle_a), Definition('b', self.circle_b))

    def test_union_of_circles(self):
        program = SetProgram(self.definitions, parse_postfix('a b |'), global_a=50)
        region = compile_program(program)
        for point in random_points(50):
            f_a = eval_scalar(self.circle_a, point)
            f_b = eval_scalar(self.circle_b, point)
            expected = -np.logaddexp(-50 * f_a, -50 * f_b)
            self.assertAlmostEqual(log_field(region, point), expected, delta=1e-9 * max(1.0, abs(expected)))

    def test_single_name_is_a_bare_leaf(self):
        program = SetProgram(self.definitions, VarRef('a'), global_a=7)
        self.assertEqual(compile_program(program), Leaf(self.circle_a, 7.0))

    def test_sharpness_precedence(self):
        definitions = (Definition('a', self.circle_a, a=3.0), Definition('b', self.circle_b))
        program = SetProgram(definitions, parse_infix('a|b'), global_a=20)
        region = compile_program(program)
        self.assertEqual([leaf.a for leaf in region.children], [3.0, 20.0])
        overridden = compile_program(program, sharpness_override=9)
        self.assertEqual([leaf.a for leaf in overridden.children], [9.0, 9.0])

    def test_default_sharpness(self):
        program = SetProgram(self.definitions, VarRef('b'))
        self.assertEqual(compile_program(program).a, 50.0)

    def test_negation_compiles_to_negate(self):
        program = SetProgram(self.definitions, parse_infix('!a'))
        self.assertEqual(compile_program(program), negate(Leaf(self.circle_a, 50.0)))

    def test_unresolved_name(self):
        program = SetProgram(self.definitions, parse_infix('a&c'))
        with self.assertRaises(UnresolvedName) as context:
            compile_program(program)
        self.assertEqual(context.exception.name, 'c')

    def test_is_deterministic(self):
        program = bundled('example1')
        self.assertEqual(compile_program(program), compile_program(program))

    def test_example1_matches_the_expanded_inequality(self):
        program = bundled('example1')
        a = program.global_a
        leaves = {d.name: from_inequality(d.body, a) for d in program.definitions}
        flat = intersect([
            negate(leaves['h']),
            union([
                leaves['g'],
                negate(leaves['f']),
                leaves['e'],
                intersect([leaves['a'], leaves['b'], leaves['c'], leaves['d']]),
            ]),
        ])
        region = compile_program(program)
        for point in random_points(100, -4, 4):
            expected = log_field(flat, point)
            self.assertAlmostEqual(log_field(region, point), expected, delta=1e-9 * max(1.0, abs(expected)))

    def test_postfix_and_infix_compile_alike(self):
        definitions = tuple(
            Definition(name, parse_scalar(f'(x-{i / 4})^2+(y+{i / 5})^2-{1 + i / 3}'))
            for i, name in enumerate('abcdefghi')
        )
        points = random_points(100)
        for postfix, infix in EQUIVALENT_FORMS:
            left = compile_program(SetProgram(definitions, parse_postfix(postfix), 10))
            right = compile_program(SetProgram(definitions, parse_infix(infix), 10))
            for point in points:
                self.assertLessEqual(abs(log_field(left, point) - log_field(right, point)), 1e-12)


# ============================================================================
# Desmos export
# ============================================================================

class EmitDesmosTests(SimpleTestCase):
    """Tests for emit_desmos."""

    def leaf(self, text, a=50):
        return from_inequality(parse_scalar(text), a, label=text)

    def test_single_leaf(self):
        self.assertEqual(emit_desmos(self.leaf('x-2')), 'e^{50*(x-2)}\\le1')

    def test_intersection_writes_last_child_first(self):
        region = intersect([self.leaf('x'), self.leaf('y')])
        self.assertEqual(emit_desmos(region), 'e^{50*(y)}+e^{50*(x)}\\le1')

    def test_union_bracket_pattern(self):
        region = union([self.leaf('x'), self.leaf('y')])
        self.assertEqual(
            emit_desmos(region), '((e^{50*(y)})^{ -1}+(e^{50*(x)})^{ -1} )^{ -1}\\le1'
        )

    def test_negated_leaf_flips_the_sharpness_sign(self):
        self.assertEqual(emit_desmos(negate(self.leaf('x-2', 2.5))), 'e^{-2.5*(x-2)}\\le1')

    def test_negated_subtree_is_inverted(self):
        region = negate(intersect([self.leaf('x'), self.leaf('y')]))
        self.assertEqual(emit_desmos(region), '(e^{50*(y)}+e^{50*(x)})^{ -1}\\le1')

    def test_unlabelled_leaves_use_latex(self):
        region = from_inequality(parse_scalar('x^2+y/2'), 3)
        self.assertEqual(emit_desmos(region), 'e^{3*(x^{2}+\\frac{y}{2})}\\le1')

    def test_normalized_ignores_labels(self):
        region = self.leaf('x*2')
        self.assertEqual(emit_desmos(region), 'e^{50*(x*2)}\\le1')
        self.assertEqual(emit_desmos(region, normalized=True), 'e^{50*(x\\cdot 2)}\\le1')

    def test_unsupported_nodes(self):
        f = parse_scalar('x')
        for region in (from_even_power(f, 2), negate(from_even_power(f, 2)), raw_product(f, f)):
            with self.assertRaises(UnsupportedNode):
                emit_desmos(region)
        with self.assertRaises(UnsupportedNode):
            emit_desmos(intersect([self.leaf('x'), from_even_power(f, 1)]))

    def test_reparsed_output_evaluates_to_the_field(self):
        points = random_points(100)
        for name in ('circles', 'eq12', 'eq13', 'example1', 'animation'):
            region = compile_program(bundled(name), sharpness_override=2)
            text = emit_desmos(region)
            self.assertTrue(text.endswith(SUFFIX))
            reparsed = parse_scalar(text[:-len(SUFFIX)])
            for point in points:
                expected = field(region, point)
                if not (math.isfinite(expected) and expected > 1e-250):
                    continue
                actual = eval_scalar(reparsed, point)
                self.assertLessEqual(abs(actual - expected), 1e-9 * expected, msg=f"{name} at {point}")


# ============================================================================
# Program files
# ============================================================================

class LoadProgramTests(SimpleTestCase):
    """Tests for load_program and the bundled programs."""

    def test_circles(self):
        program = bundled('circles')
        self.assertEqual(program.global_a, 50.0)
        self.assertEqual(program.window, (-3.0, 5.0, -4.0, 4.0))
        self.assertEqual(program.expression, Or(VarRef('a'), VarRef('b')))
        region = compile_program(program)
        self.assertAlmostEqual(log_field(region, Point(5, 0)), 112.5, places=9)

    def test_every_bundled_program_loads_and_compiles(self):
        names = bundled_programs()
        for expected in ('animation', 'batman', 'circles', 'eq12', 'eq13', 'example1', 'max', 'min', 'softplus'):
            self.assertIn(expected, names)
        for name in names:
            with self.subTest(name=name):
                compile_program(bundled(name))

    def test_stream_and_per_definition_sharpness(self):
        program = load_program(io.StringIO('# two sets\ndef a a=2.5 : x\ndef b: y\n\nexpr infix a & !b\n'))
        self.assertEqual(program.table['a'].a, 2.5)
        self.assertIsNone(program.table['b'].a)
        self.assertIsNone(program.window)

    def test_errors_carry_the_line(self):
        cases = [
            ('def a : x\nexpr postfix\n', 2, 'Empty set expression'),
            ('def a : x\ndef a : y\nexpr postfix a\n', 2, "'a'"),
            ('def x : y\nexpr postfix a\n', 1, 'name'),
            ('def a : x^\nexpr postfix a\n', 1, 'body'),
            ('def a a=-1 : x\nexpr postfix a\n', 1, 'a'),
            ('sharpness 0\n', 1, 'sharpness'),
            ('window 1 0 0 1\n', 1, 'Window'),
            ('def a : x\nexpr postfix ab|\n', 2, "'b'"),
            ('def a : x\nexpr prefix a\n', 2, 'expr'),
            ('def a : x\nexpr postfix a\nexpr infix a\n', 3, 'Second'),
            ('def a : x\nexpr postfix a&\n', 2, 'operand'),
            ('union a b\n', 1, 'union'),
            ('def a : x\n', 1, 'Missing expr'),
        ]
        for text, line, fragment in cases:
            with self.subTest(text=text):
                with self.assertRaises(FileFormatError) as context:
                    parse_program(text)
                self.assertEqual(context.exception.line, line)
                self.assertIn(fragment, str(context.exception))

    def test_unknown_program(self):
        with self.assertRaises(FileFormatError):
            resolve_program('no-such-program')


# ============================================================================
# Transcript replay
# ============================================================================

class ReplayAppendixTests(SimpleTestCase):
    """Tests for replay_appendix."""

    def replay_bundled(self):
        with open(programs_dir() / 'appendix_transcript.txt', encoding='utf-8') as stream:
            return replay_appendix(stream)

    def test_final_line_is_byte_exact(self):
        self.assertEqual(self.replay_bundled().result, APPENDIX_RESULT)

    def test_trace(self):
        replay = self.replay_bundled()
        self.assertEqual(replay.trace[:4], ('0 []', "1 ['a']", "2 ['a', 'b']", "3 ['a', 'b', 'c']"))
        self.assertEqual(
            replay.trace[4],
            r"4 ['a', 'e^{50*(x-2)}+e^{50*(\\left(x-2\\right)^2+\\left(y-3.3\\right)^2)}']",
        )
        self.assertEqual(replay.lines[-1], APPENDIX_RESULT)
        self.assertEqual(len(replay.lines), 6)

    def test_prompts_are_optional(self):
        transcript = io.StringIO('50\nc x-2\n\nc\n')
        self.assertEqual(replay_appendix(transcript).result, 'e^{50*(x-2)}\\le1')

    def test_coordinates_are_valid_names_in_transcripts(self):
        transcript = io.StringIO('2\nx y-1\ny x\n\nxy|\n')
        self.assertEqual(
            replay_appendix(transcript).result, '((e^{2*(x)})^{ -1}+(e^{2*(y-1)})^{ -1} )^{ -1}\\le1'
        )

    def test_normalized_export_keeps_the_value(self):
        program = self.replay_bundled().program
        region = compile_program(program)
        normalized = emit_desmos(region, normalized=True)
        self.assertNotEqual(normalized, APPENDIX_RESULT)
        point = Point(1.9, 3.2)
        for text in (APPENDIX_RESULT, normalized):
            value = eval_scalar(parse_scalar(text[:-len(SUFFIX)]), point)
            self.assertAlmostEqual(value, field(region, point), delta=1e-9 * field(region, point))

    def test_errors(self):
        for text in ('', 'fifty\n', '50\nab x\n\nab&\n', '50\na x^\n\na\n', '50\na x\n\n', '50\na x\n\nab&\n'):
            with self.subTest(text=text):
                with self.assertRaises(TranscriptError):
                    replay_appendix(io.StringIO(text))
