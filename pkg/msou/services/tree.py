"""
Finite ordered trees of bounded arity, node addresses, valuations and contexts.

A tree is stored as a label with an ordered tuple of children; its domain of
addresses is derived. The root has the empty address, the i-th child of u
has address u + (i,), children counted from 1.
"""

from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterable, Iterator, List, Mapping, Optional, Tuple, Union

from msou.config import Config
from msou.errors import AddressError, ConfigError, ContextError, format_address

NodeAddr = Tuple[int, ...]
ROOT: NodeAddr = ()


@dataclass(frozen=True)
class Hole:
    """A leaf of a context standing for a whole subtree."""

    hole_id: int


@dataclass(frozen=True)
class Tree:
    label: str
    children: Tuple[Union["Tree", Hole], ...] = ()

    @property
    def arity(self) -> int:
        return len(self.children)


Node = Union[Tree, Hole]


def leaf(label: str) -> Tree:
    return Tree(label, ())


def address_key(address: NodeAddr) -> Tuple[int, NodeAddr]:
    """Sort key: by length, then componentwise."""
    return (len(address), address)


def addresses(tree: Node) -> List[NodeAddr]:
    """All addresses of labelled (non-hole) nodes, sorted by address_key."""
    result = [address for address, node in iter_nodes(tree) if isinstance(node, Tree)]
    result.sort(key=address_key)
    return result


def iter_nodes(tree: Node, prefix: NodeAddr = ROOT) -> Iterator[Tuple[NodeAddr, Node]]:
    """Yield (address, node) pairs, holes included, pre-order."""
    stack = [(prefix, tree)]
    while stack:
        address, node = stack.pop()
        yield address, node
        if isinstance(node, Tree):
            for i in range(len(node.children), 0, -1):
                stack.append((address + (i,), node.children[i - 1]))


def node_count(tree: Node) -> int:
    return sum(1 for _, node in iter_nodes(tree) if isinstance(node, Tree))


def holes(tree: Node) -> Dict[int, NodeAddr]:
    """Map hole id -> address of that hole."""
    found: Dict[int, NodeAddr] = {}
    for address, node in iter_nodes(tree):
        if isinstance(node, Hole):
            if node.hole_id in found:
                raise ContextError(f"Duplicate hole identifier _{node.hole_id}")
            found[node.hole_id] = address
    return found


def is_closed(tree: Node) -> bool:
    """True when the value is a tree, i.e. a context without holes."""
    return isinstance(tree, Tree) and not holes(tree)


def validate_tree(tree: Node, config: Config, allow_holes: bool = False) -> None:
    """
    Check a tree or context against the configured alphabet and maximal arity.

    Raises:
        ConfigError: unknown label or too many children
        ContextError: holes present where a tree is required, or duplicated
    """
    found = holes(tree)
    if found and not allow_holes:
        raise ContextError(f"Expected a tree, found {len(found)} hole(s)")
    if isinstance(tree, Hole) and not allow_holes:
        raise ContextError("Expected a tree, found a hole")
    for address, node in iter_nodes(tree):
        if not isinstance(node, Tree):
            continue
        if node.label not in config.alphabet:
            raise ConfigError(f"Label {node.label!r} at {format_address(address)} is not in the alphabet")
        if node.arity > config.r_max:
            raise ConfigError(
                f"Node {format_address(address)} has {node.arity} children, r_max is {config.r_max}"
            )


def subtree(tree: Node, address: NodeAddr) -> Node:
    """Return the subtree of tree starting at address."""
    node = tree
    for i in address:
        if not isinstance(node, Tree) or not 1 <= i <= node.arity:
            raise AddressError(address)
        node = node.children[i - 1]
    return node


def root_tree(tree: Tree) -> Tree:
    """Single-node tree labelled like the root of tree."""
    return Tree(tree.label, ())


def plug(context: Node, assignment: Mapping[int, Node], config: Optional[Config] = None) -> Node:
    """
    Replace holes of a context by trees or contexts.

    Args:
        context: tree with holes
        assignment: hole id -> replacement; may cover only some holes
        config: when given, the result is validated against it

    Returns:
        The plugged tree or context

    Raises:
        ContextError: unknown hole ids, or duplicate hole ids after plugging
    """
    present = holes(context)
    unknown = set(assignment) - set(present)
    if unknown:
        raise ContextError(f"Unknown hole(s): {', '.join(f'_{h}' for h in sorted(unknown))}")

    def replace(node: Node) -> Node:
        if isinstance(node, Hole):
            return assignment.get(node.hole_id, node)
        return Tree(node.label, tuple(replace(child) for child in node.children))

    result = replace(context)
    holes(result)  # raises on duplicates
    if config is not None:
        validate_tree(result, config, allow_holes=True)
    return result


class Valuation:
    """
    Finite-support map from variables to finite sets of addresses.

    Unmentioned variables map to the empty set. Empty assignments are
    dropped, so two valuations are equal iff they agree on every variable.
    """

    __slots__ = ("_items", "_hash")

    def __init__(self, assignment: Optional[Mapping[str, Iterable[NodeAddr]]] = None):
        items = {}
        for var, nodes in (assignment or {}).items():
            nodes = frozenset(tuple(address) for address in nodes)
            if nodes:
                items[var] = nodes
        self._items: Dict[str, FrozenSet[NodeAddr]] = dict(sorted(items.items()))
        self._hash = hash(tuple(self._items.items()))

    def __getitem__(self, var: str) -> FrozenSet[NodeAddr]:
        return self._items.get(var, frozenset())

    def variables(self) -> Tuple[str, ...]:
        return tuple(self._items)

    def items(self):
        return self._items.items()

    def __eq__(self, other) -> bool:
        return isinstance(other, Valuation) and self._items == other._items

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        inner = ", ".join(
            f"{var}: {sorted(nodes, key=address_key)}" for var, nodes in self._items.items()
        )
        return f"Valuation({{{inner}}})"

    def bind(self, var: str, nodes: Iterable[NodeAddr]) -> "Valuation":
        """Return nu[var -> nodes]."""
        assignment = dict(self._items)
        assignment[var] = frozenset(nodes)
        return Valuation(assignment)

    def project(self, variables: Iterable[str]) -> "Valuation":
        keep = set(variables)
        return Valuation({var: nodes for var, nodes in self._items.items() if var in keep})

    def members(self, address: NodeAddr, variables: Iterable[str]) -> FrozenSet[str]:
        """The variables among `variables` whose set contains address."""
        return frozenset(var for var in variables if address in self[var])

    def nodes(self) -> FrozenSet[NodeAddr]:
        result = set()
        for nodes in self._items.values():
            result |= nodes
        return frozenset(result)


EMPTY_VALUATION = Valuation()


def restrict_valuation(valuation: Valuation, address: NodeAddr) -> Valuation:
    """nu restricted to the subtree at address: X -> {w | address.w in nu(X)}."""
    n = len(address)
    return Valuation(
        {
            var: [node[n:] for node in nodes if node[:n] == address]
            for var, nodes in valuation.items()
        }
    )


def root_valuation(valuation: Valuation) -> Valuation:
    """X -> {eps} intersected with nu(X)."""
    return Valuation({var: [ROOT] for var, nodes in valuation.items() if ROOT in nodes})


def check_valuation(tree: Node, valuation: Valuation) -> None:
    """
    Check that every address used by the valuation is a labelled node of tree.

    Raises:
        AddressError: an address outside the domain, at a hole, or below one
    """
    domain = set(addresses(tree))
    for var, nodes in valuation.items():
        for address in nodes:
            if address not in domain:
                raise AddressError(
                    address, f"Valuation of {var} uses {format_address(address)}, not a node of the tree"
                )
