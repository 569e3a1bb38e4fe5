"""
MSO+U formulas over set variables.

The syntax has no first-order variables: atoms are a(X), X sub Y and
childi(X,Y), combined with &, !, ex and U. Everything else (or, implies,
forall, empty, sing, big, ...) is sugar that expands into these seven
constructors.
"""

from dataclasses import dataclass
from typing import FrozenSet, Iterable, Iterator, List, Sequence, Tuple

from msou.errors import ConfigError


class Formula:
    """
    Base class of the formula AST.

    Nodes are immutable. Free variables, expanded size, quantifier depth and
    the hash are computed once at construction, so formulas can be used as
    dictionary keys even when they are large.
    """

    fv: FrozenSet[str]
    fv_order: Tuple[str, ...]
    size: int
    qdepth: int
    has_unbound: bool

    def __post_init__(self):
        subs = self.children()
        fv = self._free_vars()
        object.__setattr__(self, "fv", fv)
        object.__setattr__(self, "fv_order", tuple(sorted(fv)))
        object.__setattr__(self, "size", 1 + sum(sub.size for sub in subs))
        depth = max((sub.qdepth for sub in subs), default=0)
        if isinstance(self, (Exists, Unbound)):
            depth += 1
        object.__setattr__(self, "qdepth", depth)
        object.__setattr__(
            self,
            "has_unbound",
            isinstance(self, Unbound) or any(sub.has_unbound for sub in subs),
        )
        object.__setattr__(self, "_hash", hash((type(self).__name__,) + self._fields()))

    def _fields(self) -> tuple:
        raise NotImplementedError

    def _free_vars(self) -> FrozenSet[str]:
        raise NotImplementedError

    def children(self) -> Tuple["Formula", ...]:
        return ()

    def __hash__(self) -> int:
        return self._hash

    def __eq__(self, other) -> bool:
        if self is other:
            return True
        if type(self) is not type(other) or self._hash != other._hash:
            return False
        return self._fields() == other._fields()

    def __str__(self) -> str:
        from msou.services.syntax import print_formula

        return print_formula(self)


@dataclass(frozen=True, eq=False)
class LabelAtom(Formula):
    label: str
    var: str

    def _fields(self):
        return (self.label, self.var)

    def _free_vars(self):
        return frozenset((self.var,))


@dataclass(frozen=True, eq=False)
class Subset(Formula):
    x: str
    y: str

    def _fields(self):
        return (self.x, self.y)

    def _free_vars(self):
        return frozenset((self.x, self.y))


@dataclass(frozen=True, eq=False)
class Child(Formula):
    """X child_i Y: both sets are singletons and Y's node is the i-th child of X's."""

    index: int
    x: str
    y: str

    def __post_init__(self):
        if self.index < 1:
            raise ValueError(f"Child index must be >= 1, got {self.index}")
        super().__post_init__()

    def _fields(self):
        return (self.index, self.x, self.y)

    def _free_vars(self):
        return frozenset((self.x, self.y))


@dataclass(frozen=True, eq=False)
class And(Formula):
    lhs: Formula
    rhs: Formula

    def _fields(self):
        return (self.lhs, self.rhs)

    def _free_vars(self):
        return self.lhs.fv | self.rhs.fv

    def children(self):
        return (self.lhs, self.rhs)


@dataclass(frozen=True, eq=False)
class Not(Formula):
    inner: Formula

    def _fields(self):
        return (self.inner,)

    def _free_vars(self):
        return self.inner.fv

    def children(self):
        return (self.inner,)


@dataclass(frozen=True, eq=False)
class Exists(Formula):
    var: str
    body: Formula

    def _fields(self):
        return (self.var, self.body)

    def _free_vars(self):
        return self.body.fv - {self.var}

    def children(self):
        return (self.body,)


@dataclass(frozen=True, eq=False)
class Unbound(Formula):
    """U X.body: body holds for finite sets X of arbitrarily large size."""

    var: str
    body: Formula

    def _fields(self):
        return (self.var, self.body)

    def _free_vars(self):
        return self.body.fv - {self.var}

    def children(self):
        return (self.body,)


Quantifier = (Exists, Unbound)


def free_vars(formula: Formula) -> FrozenSet[str]:
    """Return FV(formula); ex and U bind their variable in the body."""
    return formula.fv


def is_mso(formula: Formula) -> bool:
    """True iff the formula contains no U quantifier."""
    return not formula.has_unbound


def walk(formula: Formula) -> Iterator[Formula]:
    """Yield every subformula occurrence, pre-order."""
    stack = [formula]
    while stack:
        node = stack.pop()
        yield node
        stack.extend(reversed(node.children()))


def fresh_var(avoid: Iterable[str], base: str = "Y") -> str:
    """First name of the form base, base1, base2, ... not in avoid."""
    taken = set(avoid)
    if base not in taken:
        return base
    n = 1
    while f"{base}{n}" in taken:
        n += 1
    return f"{base}{n}"


def conjuncts(formula: Formula) -> List[Formula]:
    """Flatten nested conjunctions, looking through double negations."""
    result = []
    stack = [formula]
    while stack:
        node = stack.pop()
        while isinstance(node, Not) and isinstance(node.inner, Not):
            node = node.inner.inner
        if isinstance(node, And):
            stack.append(node.rhs)
            stack.append(node.lhs)
        else:
            result.append(node)
    return result


# Sugar


def big_and(parts: Sequence[Formula]) -> Formula:
    """Balanced conjunction; the empty conjunction is verum."""
    parts = list(parts)
    if not parts:
        return verum()
    if len(parts) == 1:
        return parts[0]
    mid = len(parts) // 2
    return And(big_and(parts[:mid]), big_and(parts[mid:]))


def big_or(parts: Sequence[Formula]) -> Formula:
    """Balanced disjunction; the empty disjunction is falsum."""
    parts = list(parts)
    if not parts:
        return falsum()
    if len(parts) == 1:
        return parts[0]
    mid = len(parts) // 2
    return or_(big_or(parts[:mid]), big_or(parts[mid:]))


def or_(lhs: Formula, rhs: Formula) -> Formula:
    return Not(And(Not(lhs), Not(rhs)))


def implies(lhs: Formula, rhs: Formula) -> Formula:
    return Not(And(lhs, Not(rhs)))


def forall(var: str, body: Formula) -> Formula:
    return Not(Exists(var, Not(body)))


def empty(var: str) -> Formula:
    """X is the empty set: all Y. X sub Y."""
    y = fresh_var({var})
    return forall(y, Subset(var, y))


def big(var: str) -> Formula:
    """X has at least two elements."""
    y = fresh_var({var})
    return Exists(y, big_and([Subset(y, var), Not(Subset(var, y)), Not(empty(y))]))


def sing(var: str) -> Formula:
    """X is a singleton."""
    return And(Not(empty(var)), Not(big(var)))


def disjoint(x: str, y: str) -> Formula:
    """No node lies in both X and Y."""
    n = fresh_var({x, y}, "N")
    return Not(Exists(n, big_and([sing(n), Subset(n, x), Subset(n, y)])))


def child_any(x: str, y: str, r_max: int) -> Formula:
    """Y's node is some child of X's node, for trees of arity at most r_max."""
    if r_max < 1:
        raise ConfigError(f"child_any needs r_max >= 1, got {r_max}")
    return big_or([Child(i, x, y) for i in range(1, r_max + 1)])


def label_in(var: str, labels: Sequence[str]) -> Formula:
    """Every node of X carries one of the given labels."""
    y = fresh_var({var})
    return forall(
        y,
        implies(And(sing(y), Subset(y, var)), big_or([LabelAtom(a, y) for a in labels])),
    )


def verum() -> Formula:
    return forall("Y", Subset("Y", "Y"))


def falsum() -> Formula:
    return Not(verum())


def is_root(var: str, r_max: int) -> Formula:
    """No node is a parent of X's node (only meaningful together with sing(X))."""
    if r_max < 1:
        return verum()
    z = fresh_var({var}, "Z")
    return Not(Exists(z, child_any(z, var, r_max)))


SUGAR_KINDS = (
    "or",
    "implies",
    "forall",
    "empty",
    "sing",
    "big",
    "disjoint",
    "child_any",
    "label_in",
    "verum",
    "falsum",
)


def sugar(kind: str, *args) -> Formula:
    """
    Build a sugar formula by name.

    Args:
        kind: one of SUGAR_KINDS
        args: the operands, e.g. sugar("child_any", "X", "Y", 2)

    Returns:
        The desugared formula
    """
    builders = {
        "or": or_,
        "implies": implies,
        "forall": forall,
        "empty": empty,
        "sing": sing,
        "big": big,
        "disjoint": disjoint,
        "child_any": child_any,
        "label_in": label_in,
        "verum": verum,
        "falsum": falsum,
    }
    if kind not in builders:
        raise ValueError(f"Unknown sugar kind: {kind}")
    return builders[kind](*args)
