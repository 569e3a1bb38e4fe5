"""
Seeded random and exhaustive generators for formulas, trees, valuations and contexts.
"""

import random
from functools import lru_cache
from itertools import combinations, product
from typing import Iterator, List, Optional, Sequence, Tuple

from msou.config import Config
from msou.services.formula import And, Child, Exists, Formula, LabelAtom, Not, Subset, Unbound
from msou.services.tree import Hole, Node, NodeAddr, Tree, Valuation, addresses, subtree

VARIABLE_POOL = ("X", "Y", "Z")

# (constructor, weight); quantifiers fall back to atoms when the depth is used up
FORMULA_WEIGHTS = (
    ("atom", 40),
    ("and", 20),
    ("not", 20),
    ("exists", 15),
    ("unbound", 5),
)


def random_atom(rng: random.Random, config: Config, pool: Sequence[str] = VARIABLE_POOL) -> Formula:
    kind = rng.choice(("label", "subset", "child"))
    if kind == "label":
        return LabelAtom(rng.choice(config.alphabet), rng.choice(pool))
    if kind == "subset":
        return Subset(rng.choice(pool), rng.choice(pool))
    return Child(rng.randint(1, max(1, config.r_max)), rng.choice(pool), rng.choice(pool))


def random_formula(
    rng: random.Random,
    config: Config,
    max_qdepth: int = 2,
    max_size: int = 12,
    pool: Sequence[str] = VARIABLE_POOL,
) -> Formula:
    """
    Random formula with at most max_qdepth nested quantifiers and roughly
    max_size constructors.
    """
    kinds = [kind for kind, _ in FORMULA_WEIGHTS]
    weights = [weight for _, weight in FORMULA_WEIGHTS]

    def gen(depth: int, budget: int) -> Formula:
        if budget <= 1:
            return random_atom(rng, config, pool)
        kind = rng.choices(kinds, weights)[0]
        if kind in ("exists", "unbound") and depth == 0:
            kind = "atom"
        if kind == "atom":
            return random_atom(rng, config, pool)
        if kind == "not":
            return Not(gen(depth, budget - 1))
        if kind == "and":
            left = rng.randint(1, budget - 1)
            return And(gen(depth, left), gen(depth, budget - left))
        var = rng.choice(pool)
        body = gen(depth - 1, budget - 1)
        return Exists(var, body) if kind == "exists" else Unbound(var, body)

    return gen(max_qdepth, max_size)


def random_tree(rng: random.Random, config: Config, max_nodes: int = 6) -> Tree:
    """Random tree with between 1 and max_nodes nodes, grown by attaching leaves."""
    target = rng.randint(1, max_nodes)
    labels = [rng.choice(config.alphabet)]
    kids: List[List[int]] = [[]]
    while len(labels) < target:
        open_nodes = [i for i in range(len(labels)) if len(kids[i]) < config.r_max]
        if not open_nodes:
            break
        parent = rng.choice(open_nodes)
        kids[parent].append(len(labels))
        labels.append(rng.choice(config.alphabet))
        kids.append([])

    def build(i: int) -> Tree:
        return Tree(labels[i], tuple(build(j) for j in kids[i]))

    return build(0)


def random_valuation(
    rng: random.Random, tree: Node, variables: Sequence[str], density: float = 0.3
) -> Valuation:
    nodes = addresses(tree)
    return Valuation(
        {var: [address for address in nodes if rng.random() < density] for var in variables}
    )


def random_context(rng: random.Random, tree: Tree) -> Optional[Tuple[Node, NodeAddr, Tree]]:
    """
    Cut a random non-root subtree out of tree.

    Returns:
        (context with hole _1, address of the hole, the removed subtree);
        None when the tree is a single node
    """
    candidates = [address for address in addresses(tree) if address]
    if not candidates:
        return None
    hole_at = rng.choice(candidates)

    def cut(node: Tree, address: NodeAddr) -> Node:
        if address == hole_at:
            return Hole(1)
        return Tree(
            node.label,
            tuple(cut(child, address + (i,)) for i, child in enumerate(node.children, start=1)),
        )

    return cut(tree, ()), hole_at, subtree(tree, hole_at)


@lru_cache(maxsize=None)
def trees_of_size(n: int, alphabet: Tuple[str, ...], r_max: int) -> Tuple[Tree, ...]:
    """Every tree with exactly n nodes over the alphabet, arity at most r_max."""
    if n < 1:
        return ()
    result = []
    for label in alphabet:
        if n == 1:
            result.append(Tree(label, ()))
            continue
        for r in range(1, r_max + 1):
            for sizes in _compositions(n - 1, r):
                pools = [trees_of_size(size, alphabet, r_max) for size in sizes]
                for children in product(*pools):
                    result.append(Tree(label, children))
    return tuple(result)


def _compositions(total: int, parts: int) -> Iterator[Tuple[int, ...]]:
    """Ordered ways to write total as a sum of parts positive integers."""
    if parts == 1:
        if total >= 1:
            yield (total,)
        return
    for first in range(1, total - parts + 2):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def all_trees(config: Config, max_nodes: int) -> Iterator[Tree]:
    for n in range(1, max_nodes + 1):
        yield from trees_of_size(n, config.alphabet, config.r_max)


def all_valuations(tree: Node, variables: Sequence[str]) -> Iterator[Valuation]:
    """Every assignment of node sets to the given variables."""
    nodes = addresses(tree)
    subsets = [
        frozenset(c) for size in range(len(nodes) + 1) for c in combinations(nodes, size)
    ]
    for choice in product(subsets, repeat=len(variables)):
        yield Valuation(dict(zip(variables, choice)))
