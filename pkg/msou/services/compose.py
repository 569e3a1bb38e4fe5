"""
Composition of phi-types.

comp(phi, a, r, R, taus) is the type of a tree whose root is labelled a, has r
children of types taus, and belongs exactly to the free variables in R.
Folding it bottom-up over a tree gives the same type as the oracle.
"""

import logging
from functools import lru_cache
from itertools import product
from typing import Dict, FrozenSet, Iterable, Mapping, Optional, Sequence, Tuple

from msou import config as settings
from msou.config import Config
from msou.errors import ConfigError, ContextError, ShapeError
from msou.services.formula import And, Child, Exists, Formula, LabelAtom, Not, Subset, Unbound
from msou.services.phtypes import (
    C_EMPTY,
    C_FF,
    C_ROOT,
    C_TT,
    FF,
    TT,
    Child4,
    Pair,
    PhType,
    Quant,
    check_shape,
)
from msou.services.tree import (
    EMPTY_VALUATION,
    Hole,
    Node,
    NodeAddr,
    Tree,
    Valuation,
    check_valuation,
    holes,
    iter_nodes,
    validate_tree,
)

logger = logging.getLogger(__name__)


class Composer:
    """comp with a bounded memo shared across calls."""

    def __init__(self, max_size: Optional[int] = None):
        self.max_size = settings.MEMO_SIZE if max_size is None else max_size
        self._compound = lru_cache(maxsize=self.max_size)(self._comp_compound)

    def clear(self) -> None:
        self._compound.cache_clear()

    @property
    def cached(self) -> int:
        """Number of memoised compound results."""
        return self._compound.cache_info().currsize

    def comp(
        self,
        formula: Formula,
        a: str,
        r: int,
        R: Iterable[str],
        args: Sequence[PhType],
        config: Optional[Config] = None,
    ) -> PhType:
        """
        Type of a tree from its root letter, root memberships and child types.

        Args:
            formula: the formula phi
            a: root label
            r: number of children
            R: free variables of phi whose set contains the root
            args: phi-types of the r children, in order
            config: when given, r is checked against r_max

        Raises:
            ShapeError: len(args) != r, R not within FV(phi), or an argument
                that does not fit phi
            ConfigError: r > r_max
        """
        R = frozenset(R)
        args = tuple(args)
        if len(args) != r:
            raise ShapeError(f"comp with r={r} needs {r} argument types, got {len(args)}")
        if r < 0:
            raise ShapeError(f"Arity must be >= 0, got {r}")
        if config is not None and r > config.r_max:
            raise ConfigError(f"Arity {r} exceeds r_max {config.r_max}")
        if not R <= formula.fv:
            raise ShapeError(
                f"Root memberships {sorted(R)} are not free variables of the formula"
            )
        for t in args:
            check_shape(formula, t)
        return self._comp(formula, a, r, R, args)

    def _comp(
        self, formula: Formula, a: str, r: int, R: FrozenSet[str], args: Tuple[PhType, ...]
    ) -> PhType:
        while isinstance(formula, Not):
            formula = formula.inner

        if isinstance(formula, LabelAtom):
            ok = all(t == TT for t in args) and (a == formula.label or formula.var not in R)
            return TT if ok else FF
        if isinstance(formula, Subset):
            ok = all(t == TT for t in args) and (formula.x not in R or formula.y in R)
            return TT if ok else FF
        if isinstance(formula, Child):
            return _comp_child(formula, R, args)
        return self._compound(formula, a, r, R, args)

    def _comp_compound(
        self, formula: Formula, a: str, r: int, R: FrozenSet[str], args: Tuple[PhType, ...]
    ) -> PhType:
        if isinstance(formula, And):
            return Pair(
                self._comp(formula.lhs, a, r, R & formula.lhs.fv, tuple(t.lhs for t in args)),
                self._comp(formula.rhs, a, r, R & formula.rhs.fv, tuple(t.rhs for t in args)),
            )
        if isinstance(formula, (Exists, Unbound)):
            return self._comp_quant(formula, a, r, R, args)
        raise TypeError(f"Not a formula: {formula!r}")

    def _comp_quant(self, formula, a, r, R, args) -> Quant:
        body = formula.body
        r_in = (R | {formula.var}) & body.fv
        r_out = (R - {formula.var}) & body.fv
        exists_sets = [t.exists for t in args]

        def images(rows) -> set:
            found = set()
            for sigmas in rows:
                found.add(self._comp(body, a, r, r_in, sigmas))
                found.add(self._comp(body, a, r, r_out, sigmas))
            return found

        # A: every child picks from its exists set
        s_exists = images(product(*exists_sets))
        # B: one child j picks from its unbounded set, the others from exists sets
        s_unbounded = set()
        for j, t in enumerate(args):
            if t.unbounded:
                pools = exists_sets[:j] + [t.unbounded] + exists_sets[j + 1:]
                s_unbounded |= images(product(*pools))
        return Quant(s_exists, s_unbounded)


def _comp_child(formula: Child, R: FrozenSet[str], args: Tuple[PhType, ...]) -> Child4:
    x_in = formula.x in R
    y_in = formula.y in R
    r = len(args)
    empties = [t == C_EMPTY for t in args]
    all_empty = all(empties)

    def only_other_empty(j: int) -> bool:
        return all(empties[i] for i in range(r) if i != j)

    if not x_in and not y_in:
        if any(args[j] == C_TT and only_other_empty(j) for j in range(r)):
            return C_TT
    k = formula.index - 1
    if x_in and not y_in and k < r and args[k] == C_ROOT and only_other_empty(k):
        return C_TT
    if all_empty and not x_in and not y_in:
        return C_EMPTY
    if all_empty and not x_in and y_in:
        return C_ROOT
    return C_FF


default_composer = Composer()


def comp(
    formula: Formula,
    a: str,
    r: int,
    R: Iterable[str],
    args: Sequence[PhType] = (),
    config: Optional[Config] = None,
) -> PhType:
    return default_composer.comp(formula, a, r, R, args, config)


def _fold(
    formula: Formula,
    tree: Node,
    valuation: Valuation,
    assumptions: Mapping[int, PhType],
    composer: Composer,
) -> PhType:
    nodes = sorted(iter_nodes(tree), key=lambda item: len(item[0]), reverse=True)
    types: Dict[NodeAddr, PhType] = {}
    for address, node in nodes:
        if isinstance(node, Hole):
            types[address] = assumptions[node.hole_id]
            continue
        R = frozenset(var for var in formula.fv_order if address in valuation[var])
        args = tuple(types.pop(address + (i,)) for i in range(1, node.arity + 1))
        types[address] = composer._comp(formula, node.label, node.arity, R, args)
    return types[()]


def bottom_up_type(
    formula: Formula,
    tree: Tree,
    valuation: Valuation = EMPTY_VALUATION,
    config: Optional[Config] = None,
    composer: Optional[Composer] = None,
) -> PhType:
    """
    phi-type of (tree, valuation) by folding comp from the leaves up.

    Raises:
        ContextError: the tree has holes
        AddressError: the valuation uses nodes outside the tree
        ConfigError: the tree does not conform to config
    """
    if holes(tree) or isinstance(tree, Hole):
        raise ContextError("bottom_up_type needs a tree without holes")
    if config is not None:
        validate_tree(tree, config)
    check_valuation(tree, valuation)
    return _fold(formula, tree, valuation, {}, composer or default_composer)


def context_type(
    formula: Formula,
    context: Node,
    valuation: Valuation = EMPTY_VALUATION,
    assumptions: Optional[Mapping[int, PhType]] = None,
    config: Optional[Config] = None,
    composer: Optional[Composer] = None,
) -> PhType:
    """
    phi-type of a context where each hole stands for a subtree of the assumed type.

    Args:
        formula: the formula phi
        context: tree with holes
        valuation: sets of labelled nodes; nothing at or below a hole
        assumptions: hole id -> assumed phi-type; must cover every hole

    Raises:
        ContextError: an uncovered or unknown hole, or valuation at a hole
        ShapeError: an assumption that does not fit phi
    """
    assumptions = dict(assumptions or {})
    present = holes(context)
    missing = set(present) - set(assumptions)
    if missing:
        raise ContextError(f"No assumed type for hole(s): {', '.join(f'_{h}' for h in sorted(missing))}")
    unknown = set(assumptions) - set(present)
    if unknown:
        raise ContextError(f"Assumptions for unknown hole(s): {', '.join(f'_{h}' for h in sorted(unknown))}")
    for t in assumptions.values():
        check_shape(formula, t)
    for var, nodes in valuation.items():
        for address in nodes:
            for hole_id, hole_addr in present.items():
                if address[: len(hole_addr)] == hole_addr:
                    raise ContextError(f"Valuation of {var} assigns nodes inside hole _{hole_id}")
    if config is not None:
        validate_tree(context, config, allow_holes=True)
    check_valuation(context, valuation)
    return _fold(formula, context, valuation, assumptions, composer or default_composer)
