"""
Set expressions over named inequalities, and the programs that bind them.
"""
from dataclasses import dataclass
from typing import Optional, Tuple

from expressions.nodes import ScalarExpr

# x and y are left out so set names never shadow the coordinates.
PROGRAM_ALPHABET = 'abcdefghijklmnopqrstuvw'
# Alphabet of the interactive Desmos script, kept for transcript replay.
APPENDIX_ALPHABET = 'abcdefghijklmnopqrstuvwxy'


@dataclass(frozen=True)
class Definition:
    """The inequality ``body <= 0`` under a one-letter name."""

    name: str
    body: ScalarExpr
    a: Optional[float] = None
    text: Optional[str] = None  # verbatim body, only kept for transcripts


class SetExpr:
    __slots__ = ()


@dataclass(frozen=True)
class VarRef(SetExpr):
    name: str


@dataclass(frozen=True)
class Not(SetExpr):
    child: SetExpr


@dataclass(frozen=True)
class And(SetExpr):
    left: SetExpr
    right: SetExpr


@dataclass(frozen=True)
class Or(SetExpr):
    left: SetExpr
    right: SetExpr


@dataclass(frozen=True)
class SetProgram:
    definitions: Tuple[Definition, ...]
    expression: SetExpr
    global_a: Optional[float] = None
    window: Optional[Tuple[float, float, float, float]] = None

    @property
    def table(self):
        return {definition.name: definition for definition in self.definitions}


def referenced_names(expr):
    """Names used by ``expr``, in order of first appearance."""
    if isinstance(expr, VarRef):
        return [expr.name]
    if isinstance(expr, Not):
        return referenced_names(expr.child)
    seen = referenced_names(expr.left)
    return seen + [name for name in referenced_names(expr.right) if name not in seen]
