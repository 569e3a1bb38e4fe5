"""
Type spaces of a formula and formulas that define types.

The potential space Pht(phi) grows as a tower of exponentials, so everything
downstream works with the reachable space instead: leaf types closed under
comp. Every subtree of a finite tree has a reachable type.
"""

import logging
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations, product
from typing import Dict, FrozenSet, List, Optional, Tuple

from msou import config as settings
from msou.config import Config
from msou.errors import ResourceLimitError, ShapeError
from msou.services.compose import default_composer
from msou.services.formula import (
    And,
    Child,
    Exists,
    Formula,
    LabelAtom,
    Not,
    Subset,
    Unbound,
    big_and,
    big_or,
    empty,
    is_root,
    sing,
)
from msou.services.phtypes import PhType, canonical, check_shape

logger = logging.getLogger(__name__)

# Exact potential sizes are computed up to this many bits
MAX_POTENTIAL_BITS = 1 << 20


def potential_size(formula: Formula, cap: Optional[int] = None) -> int:
    """
    |Pht(phi)|: 2 for label and subset atoms, 4 for child atoms, product for
    &, unchanged for !, and (2^|Pht(body)|)^2 for ex and U.

    Args:
        formula: the formula phi
        cap: when given, the result saturates at cap instead of failing

    Raises:
        ResourceLimitError: without cap, when the exact value would need more
            than MAX_POTENTIAL_BITS bits
    """
    if isinstance(formula, (LabelAtom, Subset)):
        size = 2
    elif isinstance(formula, Child):
        size = 4
    elif isinstance(formula, Not):
        return potential_size(formula.inner, cap)
    elif isinstance(formula, And):
        size = potential_size(formula.lhs, cap) * potential_size(formula.rhs, cap)
    elif isinstance(formula, (Exists, Unbound)):
        body = potential_size(formula.body, cap)
        if 2 * body > MAX_POTENTIAL_BITS:
            if cap is None:
                raise ResourceLimitError(
                    f"Potential type space of {formula} has more than 2^{MAX_POTENTIAL_BITS} elements"
                )
            return cap
        size = 1 << (2 * body)
    else:
        raise TypeError(f"Not a formula: {formula!r}")
    return size if cap is None else min(size, cap)


def tv(formula: Formula, t: PhType) -> bool:
    """Truth value of phi on any (tree, valuation) of type t."""
    check_shape(formula, t)
    return _tv(formula, t)


def _tv(formula: Formula, t: PhType) -> bool:
    if isinstance(formula, Not):
        return not _tv(formula.inner, t)
    if isinstance(formula, (LabelAtom, Subset)):
        return t.value
    if isinstance(formula, Child):
        return t.value == "tt"
    if isinstance(formula, And):
        return _tv(formula.lhs, t.lhs) and _tv(formula.rhs, t.rhs)
    if isinstance(formula, Exists):
        return any(_tv(formula.body, s) for s in t.exists)
    if isinstance(formula, Unbound):
        return any(_tv(formula.body, s) for s in t.unbounded)
    raise TypeError(f"Not a formula: {formula!r}")


def leaf_type(formula: Formula, a: str, R=frozenset()) -> PhType:
    """Type of the single-node tree labelled a whose root is in exactly the sets R."""
    return default_composer.comp(formula, a, 0, R, ())


def root_memberships(formula: Formula) -> List[FrozenSet[str]]:
    """All subsets of FV(phi), smallest first."""
    fv = formula.fv_order
    return [frozenset(c) for n in range(len(fv) + 1) for c in combinations(fv, n)]


@dataclass(frozen=True)
class TypeSpace:
    """Reachable phi-types in canonical order, and the ones on which phi holds."""

    formula: Formula
    config: Config
    reachable: Tuple[PhType, ...]
    truthy: Tuple[PhType, ...]

    def __len__(self) -> int:
        return len(self.reachable)

    def __contains__(self, t: PhType) -> bool:
        return t in self._positions

    @property
    def _positions(self) -> Dict[PhType, int]:
        positions = self.__dict__.get("_positions_cache")
        if positions is None:
            positions = {t: i for i, t in enumerate(self.reachable)}
            object.__setattr__(self, "_positions_cache", positions)
        return positions

    def index(self, t: PhType) -> int:
        """Position of t in the canonical order."""
        try:
            return self._positions[t]
        except KeyError:
            raise ShapeError(f"Type {t} is not reachable") from None


def reachable_types(
    formula: Formula, config: Config, max_states: Optional[int] = None
) -> TypeSpace:
    """
    Least set of phi-types containing every leaf type and closed under comp.

    Raises:
        ResourceLimitError: more than max_states types (MSOU_MAX_STATES by default)
    """
    cap = settings.MAX_STATES if max_states is None else max_states
    return _reachable(formula, config, cap)


@lru_cache(maxsize=256)
def _reachable(formula: Formula, config: Config, cap: int) -> TypeSpace:
    memberships = root_memberships(formula)
    composer = default_composer

    def check_cap(count: int) -> None:
        if count > cap:
            raise ResourceLimitError(f"Type space exceeds {cap} states")

    reach = set()
    for a in config.alphabet:
        for R in memberships:
            reach.add(composer._comp(formula, a, 0, R, ()))
    check_cap(len(reach))

    # Semi-naive closure: each round only combines tuples with a new type.
    new = set(reach)
    rounds = 0
    while new:
        rounds += 1
        old = reach - new
        everything = list(reach)
        found = set()
        for r in range(1, config.r_max + 1):
            for j in range(r):
                pools = [list(old)] * j + [list(new)] + [everything] * (r - j - 1)
                for args in product(*pools):
                    for a in config.alphabet:
                        for R in memberships:
                            t = composer._comp(formula, a, r, R, args)
                            if t not in reach:
                                found.add(t)
            check_cap(len(reach) + len(found))
        reach |= found
        new = found

    ordered = canonical(reach)
    truthy = tuple(t for t in ordered if _tv(formula, t))
    logger.info(
        f"Built type space with {len(ordered)} types ({len(truthy)} truthy) "
        f"for a formula of size {formula.size} in {rounds} rounds"
    )
    return TypeSpace(formula, config, ordered, truthy)


@lru_cache(maxsize=4096)
def synth_psi(formula: Formula, t: PhType, config: Config) -> Formula:
    """
    A formula with free variables within FV(phi) that holds exactly on the
    (tree, valuation) pairs of phi-type t.

    The quantifier case lists the positive and negative facts about every
    reachable body type, so the reachable space of the body is computed.
    """
    check_shape(formula, t)
    return _synth(formula, t, config)


def _synth(formula: Formula, t: PhType, config: Config) -> Formula:
    while isinstance(formula, Not):
        formula = formula.inner
    if isinstance(formula, (LabelAtom, Subset)):
        return formula if t.value else Not(formula)
    if isinstance(formula, Child):
        return _synth_child(formula, t.value, config)
    if isinstance(formula, And):
        return And(synth_psi(formula.lhs, t.lhs, config), synth_psi(formula.rhs, t.rhs, config))

    body, var = formula.body, formula.var
    space = reachable_types(body, config).reachable
    parts = []
    for s in t.exists:
        parts.append(Exists(var, synth_psi(body, s, config)))
    for s in space:
        if s not in t.exists:
            parts.append(Not(Exists(var, synth_psi(body, s, config))))
    for s in t.unbounded:
        parts.append(Unbound(var, synth_psi(body, s, config)))
    for s in space:
        if s not in t.unbounded:
            parts.append(Not(Unbound(var, synth_psi(body, s, config))))
    return big_and(parts)


def _synth_child(formula: Child, value: str, config: Config) -> Formula:
    x, y = formula.x, formula.y
    psi_empty = And(empty(x), empty(y))
    psi_root = big_and([empty(x), sing(y), is_root(y, config.r_max)])
    if value == "tt":
        return formula
    if value == "empty":
        return psi_empty
    if value == "root":
        return psi_root
    return Not(big_or([formula, psi_empty, psi_root]))


def synth_psi_empty(formula: Formula, t: PhType, config: Config) -> Formula:
    """
    A sentence that holds in a tree T iff phi has type t on T under the
    empty valuation.
    """
    psi = synth_psi(formula, t, config)
    result = big_and([psi] + [empty(var) for var in formula.fv_order])
    for var in reversed(formula.fv_order):
        result = Exists(var, result)
    return result
