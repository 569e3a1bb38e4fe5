"""
Brute-force reference semantics on finite trees.

Node sets are bitmasks over the tree's addresses sorted by (length, components),
so bit 0 is the root. Subsets are enumerated in counting order of these masks:
the empty set first, then {eps}, {1}, {eps,1}, ...
"""

import logging
from functools import lru_cache
from typing import Dict, FrozenSet, List, NamedTuple, Optional, Tuple

from msou import config
from msou.errors import ContextError, ResourceLimitError
from msou.services.formula import (
    And,
    Child,
    Exists,
    Formula,
    LabelAtom,
    Not,
    Subset,
    Unbound,
    conjuncts,
    disjoint,
    sing,
)
from msou.services.phtypes import C_EMPTY, C_FF, C_ROOT, C_TT, Bool, Pair, PhType, Quant
from msou.services.tree import (
    EMPTY_VALUATION,
    NodeAddr,
    Tree,
    Valuation,
    addresses,
    check_valuation,
    is_closed,
    subtree,
)

logger = logging.getLogger(__name__)

Env = Dict[str, int]


ANY, AT_MOST_ONE, SINGLE = "any", "at_most_one", "single"


@lru_cache(maxsize=None)
def _size_markers(var: str) -> Tuple[Formula, Formula]:
    """The conjuncts sing(var) flattens into: !big(var) and !empty(var), double negation removed."""
    not_empty, not_big = conjuncts(sing(var))
    return not_big, not_empty


@lru_cache(maxsize=None)
def _disjoint_forms(x: str, y: str) -> Tuple[Formula, Formula]:
    return disjoint(x, y), disjoint(y, x)


class BlockPlan(NamedTuple):
    """How to search one block of nested existential quantifiers."""

    block: Tuple[str, ...]
    free: Tuple[Formula, ...]
    checks: Tuple[Tuple[Formula, ...], ...]
    sizes: Tuple[str, ...]
    partners: Tuple[Tuple[str, ...], ...]


@lru_cache(maxsize=4096)
def plan_block(formula: Exists) -> BlockPlan:
    block: List[str] = []
    body: Formula = formula
    while isinstance(body, Exists) and body.var not in block:
        block.append(body.var)
        body = body.body

    parts = conjuncts(body)
    level_of = {var: i for i, var in enumerate(block)}
    free = []
    checks: List[List[Formula]] = [[] for _ in block]
    for part in parts:
        levels = [level_of[var] for var in part.fv if var in level_of]
        if levels:
            checks[max(levels)].append(part)
        else:
            free.append(part)

    sizes = []
    partners = []
    for level, var in enumerate(block):
        not_big, not_empty = _size_markers(var)
        in_child = any(isinstance(p, Child) and var in (p.x, p.y) for p in parts)
        if in_child or (not_big in parts and not_empty in parts):
            sizes.append(SINGLE)
        elif not_big in parts:
            sizes.append(AT_MOST_ONE)
        else:
            sizes.append(ANY)
        later = set(block[level:])
        found = []
        for part in parts:
            if len(part.fv) != 2 or var not in part.fv:
                continue
            (other,) = part.fv - {var}
            if other not in later and part in _disjoint_forms(var, other):
                found.append(other)
        partners.append(tuple(found))

    return BlockPlan(
        tuple(block), tuple(free), tuple(tuple(c) for c in checks), tuple(sizes), tuple(partners)
    )


class Oracle:
    """
    Evaluator bound to one finite tree.

    Results are memoised per (subformula, masks of its free variables), so an
    instance can be reused for many formulas and valuations over the same tree.

    Raises:
        ContextError: the tree still has holes
        ResourceLimitError: more nodes than the node cap, or the evaluation
            budget is used up
    """

    def __init__(self, tree: Tree, node_cap: Optional[int] = None, budget: Optional[int] = None):
        if not is_closed(tree):
            raise ContextError("The oracle evaluates closed trees only")
        self.tree = tree
        self.addrs: List[NodeAddr] = addresses(tree)
        self.size = len(self.addrs)
        cap = config.NODE_CAP if node_cap is None else node_cap
        if self.size > cap:
            raise ResourceLimitError(
                f"Tree has {self.size} nodes, the subset-enumeration cap is {cap}"
            )
        self.budget = config.EVAL_BUDGET if budget is None else budget
        self.steps = 0
        self.index = {address: i for i, address in enumerate(self.addrs)}

        self.label_masks: Dict[str, int] = {}
        self.children: List[Tuple[int, ...]] = []
        for address in self.addrs:
            node = subtree(tree, address)
            bit = 1 << self.index[address]
            self.label_masks[node.label] = self.label_masks.get(node.label, 0) | bit
            self.children.append(
                tuple(self.index[address + (i,)] for i in range(1, node.arity + 1))
            )
        self.full = (1 << self.size) - 1
        self._truth: Dict[tuple, bool] = {}
        self._types: Dict[tuple, PhType] = {}

    # Masks and valuations

    def mask_of(self, nodes) -> int:
        mask = 0
        for address in nodes:
            mask |= 1 << self.index[address]
        return mask

    def nodes_of(self, mask: int) -> FrozenSet[NodeAddr]:
        return frozenset(self.addrs[i] for i in range(self.size) if mask >> i & 1)

    def env_of(self, valuation: Valuation) -> Env:
        check_valuation(self.tree, valuation)
        return {var: self.mask_of(nodes) for var, nodes in valuation.items()}

    def _tick(self, n: int = 1) -> None:
        self.steps += n
        if self.steps > self.budget:
            raise ResourceLimitError(
                f"Evaluation budget of {self.budget} candidate sets exceeded"
            )

    def _singletons(self) -> List[int]:
        return [1 << i for i in range(self.size)]

    # Truth

    def holds(self, formula: Formula, valuation: Valuation = EMPTY_VALUATION) -> bool:
        return self._eval(formula, self.env_of(valuation))

    def _eval(self, formula: Formula, env: Env) -> bool:
        if isinstance(formula, LabelAtom):
            return env.get(formula.var, 0) & ~self.label_masks.get(formula.label, 0) == 0
        if isinstance(formula, Subset):
            return env.get(formula.x, 0) & ~env.get(formula.y, 0) == 0
        if isinstance(formula, Child):
            return self._child(formula, env.get(formula.x, 0), env.get(formula.y, 0))
        if isinstance(formula, Not):
            return not self._eval(formula.inner, env)
        if isinstance(formula, Unbound):
            # |X| <= N for every X over an N-node tree, so the
            # "for every n" clause fails at n = N + 1.
            return False

        key = (formula, tuple(env.get(var, 0) for var in formula.fv_order))
        cached = self._truth.get(key)
        if cached is not None:
            return cached
        if isinstance(formula, And):
            result = self._eval(formula.lhs, env) and self._eval(formula.rhs, env)
        elif isinstance(formula, Exists):
            result = self._exists(formula, env)
        else:
            raise TypeError(f"Not a formula: {formula!r}")
        self._truth[key] = result
        return result

    def _child(self, formula: Child, x: int, y: int) -> bool:
        if x == 0 or y == 0 or x & (x - 1) or y & (y - 1):
            return False
        kids = self.children[x.bit_length() - 1]
        return formula.index <= len(kids) and kids[formula.index - 1] == y.bit_length() - 1

    def _exists(self, formula: Exists, env: Env) -> bool:
        """
        Evaluate a block ex X1. ex X2. ... body by backtracking.

        Each conjunct of the body is checked as soon as the last block
        variable it mentions is bound.
        """
        plan = plan_block(formula)
        if not all(self._eval(part, env) for part in plan.free):
            return False
        scope = dict(env)

        def search(level: int) -> bool:
            if level == len(plan.block):
                return True
            var = plan.block[level]
            for mask in self._choices(plan.sizes[level], plan.partners[level], scope):
                self._tick()
                scope[var] = mask
                if all(self._eval(part, scope) for part in plan.checks[level]) and search(level + 1):
                    return True
            return False

        return search(0)

    def _choices(self, size: str, partners: Tuple[str, ...], scope: Env):
        """Candidate masks for one block variable, ascending."""
        if size == SINGLE:
            masks = self._singletons()
        elif size == AT_MOST_ONE:
            masks = [0] + self._singletons()
        else:
            masks = None
        forbidden = 0
        for other in partners:
            forbidden |= scope.get(other, 0)
        if masks is not None:
            return [mask for mask in masks if not mask & forbidden]
        if not forbidden:
            return range(self.full + 1)
        allowed = self.full & ~forbidden
        subs = []
        sub = allowed
        while True:
            subs.append(sub)
            if sub == 0:
                break
            sub = (sub - 1) & allowed
        subs.reverse()
        return subs

    # Types

    def type_of(self, formula: Formula, valuation: Valuation = EMPTY_VALUATION) -> PhType:
        return self._type(formula, self.env_of(valuation))

    def _type(self, formula: Formula, env: Env) -> PhType:
        if isinstance(formula, (LabelAtom, Subset)):
            return Bool(self._eval(formula, env))
        if isinstance(formula, Child):
            x, y = env.get(formula.x, 0), env.get(formula.y, 0)
            if self._child(formula, x, y):
                return C_TT
            if x == 0 and y == 0:
                return C_EMPTY
            if x == 0 and y == 1:
                return C_ROOT
            return C_FF
        if isinstance(formula, Not):
            return self._type(formula.inner, env)

        key = (formula, tuple(env.get(var, 0) for var in formula.fv_order))
        cached = self._types.get(key)
        if cached is not None:
            return cached
        if isinstance(formula, And):
            result = Pair(self._type(formula.lhs, env), self._type(formula.rhs, env))
        elif isinstance(formula, (Exists, Unbound)):
            scope = dict(env)
            found = set()
            for mask in range(self.full + 1):
                self._tick()
                scope[formula.var] = mask
                found.add(self._type(formula.body, scope))
            # No finite tree has witnesses of every size: S_U is empty.
            result = Quant(found, ())
        else:
            raise TypeError(f"Not a formula: {formula!r}")
        self._types[key] = result
        return result

    # Witnesses

    def witness(
        self, formula: Formula, valuation: Valuation = EMPTY_VALUATION
    ) -> Optional[FrozenSet[NodeAddr]]:
        """First set, in enumeration order, that makes the body of an ex-formula hold."""
        if not isinstance(formula, Exists):
            return None
        scope = self.env_of(valuation)
        for mask in range(self.full + 1):
            self._tick()
            scope[formula.var] = mask
            if self._eval(formula.body, scope):
                return self.nodes_of(mask)
        return None


def evaluate(
    formula: Formula,
    tree: Tree,
    valuation: Valuation = EMPTY_VALUATION,
    node_cap: Optional[int] = None,
) -> bool:
    """
    T, nu |= phi by direct evaluation.

    Raises:
        AddressError: the valuation uses nodes outside the tree
        ResourceLimitError: node cap or evaluation budget exceeded
    """
    return Oracle(tree, node_cap=node_cap).holds(formula, valuation)


def direct_type(
    formula: Formula,
    tree: Tree,
    valuation: Valuation = EMPTY_VALUATION,
    node_cap: Optional[int] = None,
) -> PhType:
    """The phi-type of (tree, valuation), computed by full subset enumeration."""
    return Oracle(tree, node_cap=node_cap).type_of(formula, valuation)


def find_witness(
    formula: Formula,
    tree: Tree,
    valuation: Valuation = EMPTY_VALUATION,
    node_cap: Optional[int] = None,
) -> Optional[FrozenSet[NodeAddr]]:
    return Oracle(tree, node_cap=node_cap).witness(formula, valuation)
