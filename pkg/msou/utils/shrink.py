"""
Greedy minimisation of failing (formula, tree, valuation) cases.

Each pass tries smaller variants one at a time and keeps the first one that
still fails, until no variant fails.
"""

import logging
from dataclasses import dataclass
from typing import Callable, Iterator

from msou.services.formula import And, Exists, Formula, Not, Unbound
from msou.services.tree import NodeAddr, Tree, Valuation, addresses, restrict_valuation, subtree

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Case:
    formula: Formula
    tree: Tree
    valuation: Valuation


def _drop_last_child(tree: Tree, address: NodeAddr) -> Tree:
    """tree without the last child of the node at address."""
    if not address:
        return Tree(tree.label, tree.children[:-1])
    i = address[0]
    children = list(tree.children)
    children[i - 1] = _drop_last_child(children[i - 1], address[1:])
    return Tree(tree.label, tuple(children))


def smaller_trees(case: Case) -> Iterator[Case]:
    """Replace the tree by a child subtree, or drop the last child of some node."""
    for i in range(1, case.tree.arity + 1):
        yield Case(case.formula, subtree(case.tree, (i,)), restrict_valuation(case.valuation, (i,)))
    for address in addresses(case.tree):
        node = subtree(case.tree, address)
        if node.arity:
            tree = _drop_last_child(case.tree, address)
            kept = set(addresses(tree))
            valuation = Valuation(
                {var: [a for a in nodes if a in kept] for var, nodes in case.valuation.items()}
            )
            yield Case(case.formula, tree, valuation)


def smaller_valuations(case: Case) -> Iterator[Case]:
    for var, nodes in case.valuation.items():
        for address in sorted(nodes):
            yield Case(case.formula, case.tree, case.valuation.bind(var, nodes - {address}))


def smaller_formulas(formula: Formula) -> Iterator[Formula]:
    """Formulas with one subformula replaced by one of its own children."""
    for child in formula.children():
        yield child
    if isinstance(formula, And):
        for lhs in smaller_formulas(formula.lhs):
            yield And(lhs, formula.rhs)
        for rhs in smaller_formulas(formula.rhs):
            yield And(formula.lhs, rhs)
    elif isinstance(formula, Not):
        for inner in smaller_formulas(formula.inner):
            yield Not(inner)
    elif isinstance(formula, (Exists, Unbound)):
        for body in smaller_formulas(formula.body):
            yield type(formula)(formula.var, body)


def shrink(case: Case, fails: Callable[[Case], bool], max_steps: int = 200) -> Case:
    """
    Greedily minimise a failing case.

    Args:
        case: a case for which fails(case) is true
        fails: the property violation to preserve; exceptions count as "does not fail"
        max_steps: accepted reductions before giving up

    Returns:
        A case that still fails and none of whose one-step reductions does
    """

    def still_fails(candidate: Case) -> bool:
        try:
            return fails(candidate)
        except Exception:
            return False

    steps = 0
    progress = True
    while progress and steps < max_steps:
        progress = False
        variants = [
            *smaller_trees(case),
            *smaller_valuations(case),
            *(Case(f, case.tree, case.valuation) for f in smaller_formulas(case.formula)),
        ]
        for variant in variants:
            if still_fails(variant):
                case = variant
                steps += 1
                progress = True
                break
    logger.info(f"Shrunk counterexample in {steps} steps")
    return case
