"""
Decomposition of a formula over the root and the subtrees of a tree.

build_omega lists, for every way the root and its children can combine into
a type on which phi holds, a root formula eta(a,R) and one type-defining
formula per child. build_relabeling marks every node with its letter and the
type of its subtree under the empty valuation; build_phi_mso then checks phi
on the marked tree without the U quantifier.

Relabeled letters are written a#t<i>, where i is the position of the type in
the canonical order of the reachable type space.
"""

import logging
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import product
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

from pydantic import BaseModel

from msou import config as settings
from msou.config import Config
from msou.errors import NotUniqueError, ResourceLimitError, ShapeError
from msou.services.compose import default_composer
from msou.services.formula import (
    And,
    Child,
    Exists,
    Formula,
    LabelAtom,
    Not,
    Subset,
    big_and,
    big_or,
    child_any,
    disjoint,
    forall,
    fresh_var,
    implies,
    is_mso,
    is_root,
    sing,
)
from msou.services.oracle import Oracle
from msou.services.phtypes import PhType
from msou.services.tree import (
    EMPTY_VALUATION,
    ROOT,
    Tree,
    Valuation,
    addresses,
    check_valuation,
    restrict_valuation,
    root_tree,
    root_valuation,
    subtree,
    validate_tree,
)
from msou.services.syntax import print_formula, print_tree
from msou.services.typespace import reachable_types, root_memberships, synth_psi, synth_psi_empty

logger = logging.getLogger(__name__)

# Root and child decomposition


def eta(a: str, R, fv) -> Formula:
    """
    Holds on a single-node tree iff its label is a and its root lies in
    exactly the sets of R among fv.
    """
    R = frozenset(R)
    fv = sorted(fv)
    y = fresh_var(fv)
    parts = [forall(y, LabelAtom(a, y))]
    parts += [forall(y, Subset(y, x)) for x in fv if x in R]
    parts += [Not(forall(y, Subset(y, x))) for x in fv if x not in R]
    return big_and(parts)


@dataclass(frozen=True)
class OmegaEntry:
    """One tuple of the decomposition, with the case it was built from."""

    letter: str
    memberships: FrozenSet[str]
    child_types: Tuple[PhType, ...]
    root_formula: Formula
    child_formulas: Tuple[Formula, ...]

    @property
    def arity(self) -> int:
        return len(self.child_formulas)

    @property
    def formulas(self) -> Tuple[Formula, ...]:
        return (self.root_formula,) + self.child_formulas


@dataclass(frozen=True)
class OmegaSet:
    formula: Formula
    config: Config
    entries: Tuple[OmegaEntry, ...]

    def __len__(self) -> int:
        return len(self.entries)

    def tuples(self) -> List[Tuple[Formula, ...]]:
        return [entry.formulas for entry in self.entries]


def build_omega(formula: Formula, config: Config) -> OmegaSet:
    """
    The finite set of tuples (eta(a,R), psi_t1, ..., psi_tr) such that comp
    maps (a, r, R, t1..tr) to a type on which phi holds.

    Raises:
        ResourceLimitError: the type space or the number of tuples exceeds
            MSOU_MAX_STATES
    """
    space = reachable_types(formula, config)
    truthy = set(space.truthy)
    memberships = root_memberships(formula)
    entries = []
    for a in config.alphabet:
        for r in range(config.r_max + 1):
            for taus in product(space.reachable, repeat=r):
                for R in memberships:
                    if default_composer._comp(formula, a, r, R, taus) not in truthy:
                        continue
                    entries.append(
                        OmegaEntry(
                            letter=a,
                            memberships=R,
                            child_types=taus,
                            root_formula=eta(a, R, formula.fv),
                            child_formulas=tuple(synth_psi(formula, t, config) for t in taus),
                        )
                    )
                    if len(entries) > settings.MAX_STATES:
                        raise ResourceLimitError(
                            f"Decomposition has more than {settings.MAX_STATES} tuples"
                        )
    logger.info(f"Built decomposition with {len(entries)} tuples")
    return OmegaSet(formula, config, tuple(entries))


class Thm1Report(BaseModel):
    lhs: bool
    rhs: bool
    witness: Optional[List[str]] = None
    witness_index: Optional[int] = None


def omega_holds(entry: OmegaEntry, tree: Tree, valuation: Valuation, oracles: Optional[Dict] = None) -> bool:
    """Whether the root formula holds at the root and each child formula in its subtree."""
    if entry.arity != tree.arity:
        return False
    oracles = {} if oracles is None else oracles

    def oracle_at(address):
        if address not in oracles:
            oracles[address] = Oracle(root_tree(tree) if address is None else subtree(tree, address))
        return oracles[address]

    if not oracle_at(None).holds(entry.root_formula, root_valuation(valuation)):
        return False
    return all(
        oracle_at((i,)).holds(psi, restrict_valuation(valuation, (i,)))
        for i, psi in enumerate(entry.child_formulas, start=1)
    )


def check_thm1(formula: Formula, tree: Tree, valuation: Valuation, omega: OmegaSet) -> Thm1Report:
    """
    Compare T, nu |= phi with the existence of a tuple of omega that holds
    at the root and in the subtrees of the root's children.

    Raises:
        ConfigError: the tree does not conform to the alphabet and r_max of omega
        AddressError: the valuation uses nodes outside the tree
    """
    validate_tree(tree, omega.config)
    check_valuation(tree, valuation)
    lhs = Oracle(tree).holds(formula, valuation)
    oracles: Dict = {}
    for index, entry in enumerate(omega.entries):
        if omega_holds(entry, tree, valuation, oracles):
            return Thm1Report(
                lhs=lhs,
                rhs=True,
                witness=[print_formula(f) for f in entry.formulas],
                witness_index=index,
            )
    return Thm1Report(lhs=lhs, rhs=False)


# Relabeling and the U-free formula


def relabel_letter(a: str, index: int) -> str:
    return f"{a}#t{index}"


def root_label(a: str, r_max: int) -> Formula:
    """Sentence: the root is labelled a."""
    return Exists("Y", big_and([sing("Y"), is_root("Y", r_max), LabelAtom(a, "Y")]))


@dataclass(frozen=True)
class Relabeling:
    """
    Sentences indexed by output letters. A node is relabelled with the unique
    letter whose sentence holds in its subtree.
    """

    sentences: Dict[str, Formula]
    legend: Dict[str, str] = field(default_factory=dict)

    def __post_init__(self):
        for letter, sentence in self.sentences.items():
            if sentence.fv:
                raise ShapeError(
                    f"Relabeling formula for {letter} has free variables {sorted(sentence.fv)}"
                )

    @property
    def alphabet(self) -> Tuple[str, ...]:
        return tuple(self.sentences)


@lru_cache(maxsize=64)
def build_relabeling(formula: Formula, config: Config) -> Relabeling:
    """
    One sentence per (letter a, reachable type t): the root is labelled a and
    phi has type t under the empty valuation.
    """
    space = reachable_types(formula, config)
    sentences = {}
    for a in config.alphabet:
        eta_a = root_label(a, config.r_max)
        for i, t in enumerate(space.reachable):
            sentences[relabel_letter(a, i)] = And(eta_a, synth_psi_empty(formula, t, config))
    legend = {str(i): str(t) for i, t in enumerate(space.reachable)}
    logger.info(f"Built relabeling with {len(sentences)} letters")
    return Relabeling(sentences, legend)


def apply_relabeling(relabeling: Relabeling, tree: Tree) -> Tree:
    """
    Relabel every node by the letter whose sentence holds in its subtree.

    Raises:
        NotUniqueError: no sentence or several sentences hold at some node
    """
    labels = {}
    for address in addresses(tree):
        oracle = Oracle(subtree(tree, address))
        holding = [b for b, sentence in relabeling.sentences.items() if oracle.holds(sentence)]
        if len(holding) != 1:
            raise NotUniqueError(address, tuple(holding))
        labels[address] = holding[0]

    def rebuild(node: Tree, address) -> Tree:
        return Tree(
            labels[address],
            tuple(rebuild(child, address + (i,)) for i, child in enumerate(node.children, start=1)),
        )

    return rebuild(tree, ROOT)


class _SizeGuard:
    def __init__(self, budget: int):
        self.budget = budget
        self.used = 0

    def add(self, formula: Formula) -> Formula:
        self.used += formula.size
        if self.used > self.budget:
            raise ResourceLimitError(
                f"Formula exceeds the budget of {self.budget} nodes"
            )
        return formula


def _arity_is(node: str, r: int, r_max: int, c: str) -> Formula:
    """node has exactly r children."""
    parts = []
    if r >= 1:
        parts.append(Exists(c, Child(r, node, c)))
    if r < r_max:
        parts.append(Not(Exists(c, Child(r + 1, node, c))))
    return big_and(parts)


def _members_are(node: str, R: FrozenSet[str], fv: Sequence[str]) -> List[Formula]:
    return [Subset(node, x) if x in R else Not(Subset(node, x)) for x in fv]


@lru_cache(maxsize=64)
def build_phi_mso(formula: Formula, config: Config, budget: Optional[int] = None) -> Formula:
    """
    MSO formula over the relabeled alphabet, with FV within FV(phi), that
    holds on the relabeled tree under nu iff phi holds on the tree under nu.

    It guesses one set per reachable type and requires that
      the sets partition the nodes,
      the root is in the set of a type on which phi holds,
      each node's set is comp of its letter, memberships and children's sets,
      a node with no marked node below or at it carries its letter's type.

    Raises:
        ResourceLimitError: the formula grows beyond budget nodes
            (MSOU_FORMULA_BUDGET by default)
    """
    guard = _SizeGuard(settings.FORMULA_BUDGET if budget is None else budget)
    space = reachable_types(formula, config)
    fv = formula.fv_order
    k = len(space)
    r_max = config.r_max

    taken = set(fv)
    xs = []
    for i in range(k):
        name = fresh_var(taken, f"Xt{i}")
        taken.add(name)
        xs.append(name)
    n, c, w, d, p, q = (fresh_var(taken, base) for base in ("N", "C", "W", "D", "P", "Q"))

    def letter_is(a: str, node: str) -> Formula:
        return big_or([LabelAtom(relabel_letter(a, i), node) for i in range(k)])

    # partition
    partition = [guard.add(disjoint(xs[i], xs[j])) for i in range(k) for j in range(i + 1, k)]
    partition.append(
        guard.add(forall(n, implies(sing(n), big_or([Subset(n, x) for x in xs]))))
    )

    # rootOK
    truthy = [xs[space.index(t)] for t in space.truthy]
    root_ok = guard.add(
        Exists(n, big_and([sing(n), is_root(n, r_max), big_or([Subset(n, x) for x in truthy])]))
    )

    # localComp
    local = []
    memberships = root_memberships(formula)
    for a in config.alphabet:
        letter = letter_is(a, n)
        for r in range(r_max + 1):
            arity = _arity_is(n, r, r_max, c)
            for taus in product(range(k), repeat=r):
                args = tuple(space.reachable[i] for i in taus)
                children = [
                    Exists(c, And(Child(j, n, c), Subset(c, xs[i])))
                    for j, i in enumerate(taus, start=1)
                ]
                for R in memberships:
                    result = default_composer._comp(formula, a, r, R, args)
                    premise = big_and(
                        [sing(n), letter, arity] + _members_are(n, R, fv) + children
                    )
                    local.append(
                        guard.add(forall(n, implies(premise, Subset(n, xs[space.index(result)]))))
                    )

    # emptySuffix
    suffix = []
    if fv:
        closed = forall(
            p,
            forall(
                q,
                implies(big_and([sing(p), sing(q), Subset(p, d), child_any(p, q, r_max)]), Subset(q, d)),
            ),
        ) if r_max >= 1 else None
        reaches = forall(
            d, implies(big_and([Subset(n, d)] + ([closed] if closed else [])), Subset(w, d))
        )
        unmarked = forall(
            w, implies(And(sing(w), reaches), big_and([Not(Subset(w, x)) for x in fv]))
        )
    else:
        unmarked = None
    for a in config.alphabet:
        for i in range(k):
            premise = [sing(n), LabelAtom(relabel_letter(a, i), n)]
            if unmarked is not None:
                premise.append(unmarked)
            suffix.append(guard.add(forall(n, implies(big_and(premise), Subset(n, xs[i])))))

    result = big_and(partition + [root_ok] + local + suffix)
    for x in reversed(xs):
        result = Exists(x, result)
    logger.info(
        f"Built MSO formula with {k} type variables, {len(local)} local cases, "
        f"{result.size} nodes"
    )
    return result


class Thm2Report(BaseModel):
    lhs: bool
    rhs: bool
    relabeled_tree: str
    is_mso: bool
    fv_contained: bool
    formula_size: int


def check_thm2(
    formula: Formula,
    tree: Tree,
    valuation: Valuation = EMPTY_VALUATION,
    config: Optional[Config] = None,
    budget: Optional[int] = None,
) -> Thm2Report:
    """
    Compare T, nu |= phi with Psi(T), nu |= phi_MSO.

    Raises:
        NotUniqueError: the relabeling is undefined somewhere
        ResourceLimitError: formula size guard or oracle budget
    """
    config = config or Config()
    check_valuation(tree, valuation)
    relabeling = build_relabeling(formula, config)
    relabeled = apply_relabeling(relabeling, tree)
    phi_mso = build_phi_mso(formula, config, budget)
    lhs = Oracle(tree).holds(formula, valuation)
    rhs = Oracle(relabeled).holds(phi_mso, valuation)
    return Thm2Report(
        lhs=lhs,
        rhs=rhs,
        relabeled_tree=print_tree(relabeled),
        is_mso=is_mso(phi_mso),
        fv_contained=phi_mso.fv <= formula.fv,
        formula_size=phi_mso.size,
    )

