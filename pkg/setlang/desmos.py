"""
Export of region trees as inequalities for the Desmos graphing calculator.

Strings are built with the same rules as the interactive script that
introduced the format, so its transcripts reproduce byte for byte:

- a leaf is ``e^{A*(BODY)}``
- an intersection joins its children with ``+``
- a union wraps each child as ``(child)^{ -1}``, joins them with ``+`` and
  wraps the whole as ``(...)^{ -1}`` with a space before the closing bracket
- operands appear in stack-pop order, last child first
"""
from functools import singledispatch

from expressions.latex import emit_latex, format_number
from regions.algebra import Intersect, Leaf, Negate, Union

from .exceptions import UnsupportedNode

SUFFIX = '\\le1'


def _leaf_body(leaf, normalized):
    if leaf.label is not None and not normalized:
        return leaf.label
    return emit_latex(leaf.f)


@singledispatch
def _desmos(region, normalized):
    raise UnsupportedNode(f"Cannot export {type(region).__name__} to Desmos")


@_desmos.register
def _(region: Leaf, normalized):
    return f'e^{{{format_number(region.a)}*({_leaf_body(region, normalized)})}}'


@_desmos.register
def _(region: Negate, normalized):
    child = region.child
    if isinstance(child, Leaf):
        return f'e^{{-{format_number(child.a)}*({_leaf_body(child, normalized)})}}'
    return f'({_desmos(child, normalized)})^{{ -1}}'


@_desmos.register
def _(region: Intersect, normalized):
    return '+'.join(_desmos(child, normalized) for child in reversed(region.children))


@_desmos.register
def _(region: Union, normalized):
    terms = '+'.join(
        '(' + _desmos(child, normalized) + ')^{ -1}' for child in reversed(region.children)
    )
    return '(' + terms + ' )^{ -1}'


def desmos_body(region, normalized=False):
    """The left-hand side F of ``F <= 1``."""
    return _desmos(region, normalized)


def emit_desmos(region, normalized=False):
    """
    Desmos inequality for ``region``.

    Leaves keep their verbatim body text when they have one unless
    ``normalized`` is set, in which case every body is re-emitted as LaTeX.
    """
    return desmos_body(region, normalized) + SUFFIX
