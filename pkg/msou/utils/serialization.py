"""
JSON shapes for reports, decompositions, relabelings and type spaces.
"""

import json
from typing import Dict, FrozenSet, List, Optional

from msou.errors import format_address
from msou.services.decompose import OmegaSet, Relabeling
from msou.services.syntax import print_formula
from msou.services.tree import NodeAddr, address_key
from msou.services.typespace import TypeSpace, potential_size


def dumps(document) -> str:
    """The single JSON document a command prints."""
    return json.dumps(document, indent=2, sort_keys=False)


def omega_to_json(omega: OmegaSet) -> List[List[str]]:
    """One array per tuple: the root formula, then the child formulas."""
    return [[print_formula(f) for f in entry.formulas] for entry in omega.entries]


def relabeling_to_json(relabeling: Relabeling) -> Dict[str, str]:
    return {letter: print_formula(sentence) for letter, sentence in relabeling.sentences.items()}


def type_space_to_json(space: TypeSpace) -> Dict:
    # Saturates: the exact value is a tower of exponentials beyond depth 2
    cap = 10 ** 18
    size = potential_size(space.formula, cap=cap)
    return {
        "potential_size": str(size) if size < cap else f">={cap}",
        "reachable": [str(t) for t in space.reachable],
        "truthy": [str(t) for t in space.truthy],
    }


def nodes_to_json(nodes: Optional[FrozenSet[NodeAddr]]) -> Optional[List[str]]:
    if nodes is None:
        return None
    return [format_address(address) for address in sorted(nodes, key=address_key)]