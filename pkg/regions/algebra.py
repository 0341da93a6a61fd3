"""
Region trees and their constructors.

A region is the set {(x, y) : F(x, y) <= 1}. Every node is evaluated in the
log domain, L = ln F, so membership is L <= 0 at every level of the tree and
results compose without re-encoding.
"""
import math
import numbers
from dataclasses import dataclass
from typing import Optional, Tuple

from expressions.nodes import ScalarExpr

from .exceptions import EmptyOperandList, InvalidSharpness


# ============================================================================
# Region nodes
# ============================================================================

class Region:
    """Base class of every region node."""

    __slots__ = ()


@dataclass(frozen=True)
class Leaf(Region):
    """f(x, y) <= 0 encoded as e^(a f) <= 1; log-field a f."""

    f: ScalarExpr
    a: float
    label: Optional[str] = None  # verbatim body text kept for export


@dataclass(frozen=True)
class EvenPowerLeaf(Region):
    """f(x, y) <= 0 encoded as f^(2a) <= 1; log-field 2a ln|f|."""

    f: ScalarExpr
    a: int


@dataclass(frozen=True)
class Negate(Region):
    child: Region


@dataclass(frozen=True)
class Intersect(Region):
    children: Tuple[Region, ...]


@dataclass(frozen=True)
class Union(Region):
    children: Tuple[Region, ...]


@dataclass(frozen=True)
class RawProductRegion:
    """
    Multiplicative combination (f1 - 1)(f2 - 1) <= 0.

    Decided by the sign of the product only; it has no log-field and does not
    compose with Region trees.
    """

    f1: ScalarExpr
    f2: ScalarExpr


# ============================================================================
# Constructors
# ============================================================================

def validate_sharpness(a):
    """Return ``a`` as a float, or raise InvalidSharpness."""
    if isinstance(a, bool) or not isinstance(a, numbers.Real):
        raise InvalidSharpness(f"Sharpness must be a real number, got {a!r}")
    a = float(a)
    if not math.isfinite(a) or a <= 0:
        raise InvalidSharpness(f"Sharpness must be positive and finite, got {a}")
    return a


def from_inequality(f, a, label=None):
    """Leaf region for f <= 0 with sharpness ``a``."""
    return Leaf(f, validate_sharpness(a), label)


def from_even_power(f, a):
    """Even-power leaf for f <= 0; ``a`` is a positive integer."""
    if isinstance(a, bool) or not isinstance(a, numbers.Integral) or a < 1:
        raise InvalidSharpness(f"Even-power sharpness must be a positive integer, got {a!r}")
    return EvenPowerLeaf(f, int(a))


def negate(region):
    return Negate(region)


def intersect(children):
    children = tuple(children)
    if not children:
        raise EmptyOperandList("Intersection needs at least one region")
    return Intersect(children)


def union(children):
    children = tuple(children)
    if not children:
        raise EmptyOperandList("Union needs at least one region")
    return Union(children)


def raw_product(f1, f2):
    return RawProductRegion(f1, f2)


def iter_leaves(region):
    """Yield every leaf of the tree, left to right."""
    if isinstance(region, (Leaf, EvenPowerLeaf)):
        yield region
    elif isinstance(region, Negate):
        yield from iter_leaves(region.child)
    else:
        for child in region.children:
            yield from iter_leaves(child)
