import logging
from functools import singledispatch

from regionkit.conf import region_setting
from regions.algebra import from_inequality, intersect, negate, union, validate_sharpness

from .exceptions import UnresolvedName
from .nodes import And, Not, Or, VarRef

logger = logging.getLogger(__name__)


@singledispatch
def _compile(expr, leaf):
    raise TypeError(f"Unsupported set expression: {type(expr).__name__}")


@_compile.register
def _(expr: VarRef, leaf):
    return leaf(expr.name)


@_compile.register
def _(expr: Not, leaf):
    return negate(_compile(expr.child, leaf))


@_compile.register
def _(expr: And, leaf):
    return intersect([_compile(expr.left, leaf), _compile(expr.right, leaf)])


@_compile.register
def _(expr: Or, leaf):
    return union([_compile(expr.left, leaf), _compile(expr.right, leaf)])


def compile_expression(expr, table, global_a=None, sharpness_override=None):
    """
    Compile a set expression against a table of definitions.

    Sharpness precedence: ``sharpness_override``, the definition's own ``a``,
    ``global_a``, then the DEFAULT_SHARPNESS setting.
    """
    if global_a is None:
        global_a = region_setting('DEFAULT_SHARPNESS')
    if sharpness_override is not None:
        sharpness_override = validate_sharpness(sharpness_override)

    def leaf(name):
        if name not in table:
            raise UnresolvedName(name)
        definition = table[name]
        a = sharpness_override
        if a is None:
            a = definition.a if definition.a is not None else global_a
        return from_inequality(definition.body, a, label=definition.text)

    return _compile(expr, leaf)


def compile_program(program, sharpness_override=None):
    """Region for ``program``: VarRef -> leaf, Not -> negate, And -> intersect, Or -> union."""
    region = compile_expression(
        program.expression, program.table, program.global_a, sharpness_override
    )
    logger.debug(
        "Compiled program with %d definitions (override=%s)",
        len(program.definitions), sharpness_override,
    )
    return region
