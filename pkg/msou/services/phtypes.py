"""
Logical types (phenotypes) of MSO+U formulas.

A type mirrors the shape of its formula: Bool for label and subset atoms,
Child4 for child atoms, Pair for conjunctions, the body's type for negations
and Quant for both quantifiers. Every value carries a sort key; sets inside
Quant are stored as tuples sorted by that key, so equal types are identical
tuples and hash the same however they were built.

Order: Bool < Child4 < Pair < Quant, then componentwise; atomic values
compare by name (empty < ff < root < tt), sets as sorted sequences.
"""

from typing import Iterable, Tuple

from msou.errors import ShapeError
from msou.services.formula import (
    And,
    Child,
    Exists,
    Formula,
    LabelAtom,
    Not,
    Subset,
    Unbound,
)

CHILD_VALUES = ("tt", "empty", "root", "ff")


class PhType:
    __slots__ = ()

    key: tuple

    def __hash__(self) -> int:
        return self._hash

    def __eq__(self, other) -> bool:
        return isinstance(other, PhType) and (self is other or self.key == other.key)

    def __lt__(self, other: "PhType") -> bool:
        return self.key < other.key

    def __repr__(self) -> str:
        return f"PhType({format_type(self)})"

    def __str__(self) -> str:
        return format_type(self)

    def _set_key(self, key: tuple) -> None:
        self.key = key
        self._hash = hash(key)


class Bool(PhType):
    __slots__ = ("value", "key", "_hash")

    def __init__(self, value: bool):
        self.value = bool(value)
        self._set_key((0, "tt" if self.value else "ff"))


class Child4(PhType):
    __slots__ = ("value", "key", "_hash")

    def __init__(self, value: str):
        if value not in CHILD_VALUES:
            raise ShapeError(f"Invalid child-atom type value: {value!r}")
        self.value = value
        self._set_key((1, value))


class Pair(PhType):
    __slots__ = ("lhs", "rhs", "key", "_hash")

    def __init__(self, lhs: PhType, rhs: PhType):
        self.lhs = lhs
        self.rhs = rhs
        self._set_key((2, lhs.key, rhs.key))


class Quant(PhType):
    """Body types realised by some set, and by arbitrarily large finite sets."""

    __slots__ = ("exists", "unbounded", "key", "_hash")

    def __init__(self, exists: Iterable[PhType] = (), unbounded: Iterable[PhType] = ()):
        self.exists: Tuple[PhType, ...] = canonical(exists)
        self.unbounded: Tuple[PhType, ...] = canonical(unbounded)
        self._set_key(
            (3, tuple(t.key for t in self.exists), tuple(t.key for t in self.unbounded))
        )


def canonical(types: Iterable[PhType]) -> Tuple[PhType, ...]:
    """Deduplicate and sort by the canonical order."""
    return tuple(sorted(set(types), key=lambda t: t.key))


TT = Bool(True)
FF = Bool(False)
C_TT = Child4("tt")
C_EMPTY = Child4("empty")
C_ROOT = Child4("root")
C_FF = Child4("ff")


def format_type(t: PhType) -> str:
    """Canonical text: tt | ff | empty | root | pair(t1,t2) | q({..},{..})."""
    if isinstance(t, Bool):
        return "tt" if t.value else "ff"
    if isinstance(t, Child4):
        return t.value
    if isinstance(t, Pair):
        return f"pair({format_type(t.lhs)},{format_type(t.rhs)})"
    if isinstance(t, Quant):
        exists = ",".join(format_type(s) for s in t.exists)
        unbounded = ",".join(format_type(s) for s in t.unbounded)
        return f"q({{{exists}}},{{{unbounded}}})"
    raise ShapeError(f"Not a type: {t!r}")


def fits(formula: Formula, t: PhType) -> bool:
    """True iff t has the shape of formula's types."""
    while isinstance(formula, Not):
        formula = formula.inner
    if isinstance(formula, (LabelAtom, Subset)):
        return isinstance(t, Bool)
    if isinstance(formula, Child):
        return isinstance(t, Child4)
    if isinstance(formula, And):
        return isinstance(t, Pair) and fits(formula.lhs, t.lhs) and fits(formula.rhs, t.rhs)
    if isinstance(formula, (Exists, Unbound)):
        return isinstance(t, Quant) and all(
            fits(formula.body, s) for s in t.exists + t.unbounded
        )
    return False


def check_shape(formula: Formula, t: PhType) -> None:
    if not fits(formula, t):
        raise ShapeError(f"Type {format_type(t)} does not fit formula {formula}")
