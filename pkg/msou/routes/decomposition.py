from fastapi import APIRouter, HTTPException
from typing import Dict, List, Optional
import logging

from msou.errors import MsouError
from msou.routes.common import FormulaRequest, TreeRequest, to_http_error
from msou.services.decompose import (
    apply_relabeling,
    build_omega,
    build_phi_mso,
    build_relabeling,
    check_thm1,
    check_thm2,
)
from msou.services.syntax import parse_type, print_formula, print_tree
from msou.services.typespace import synth_psi, synth_psi_empty
from msou.utils.serialization import omega_to_json, relabeling_to_json

logger = logging.getLogger(__name__)
router = APIRouter()


class SynthRequest(FormulaRequest):
    """Request model for the synth endpoint"""
    type: str  # canonical type term, e.g. "q({ff,tt},{})"
    empty_valuation: Optional[bool] = False


def _fail(action: str, e: Exception) -> HTTPException:
    if isinstance(e, MsouError):
        return to_http_error(e)
    logger.error(f"Error {action}: {str(e)}")
    return HTTPException(status_code=500, detail=f"Error {action}: {str(e)}")


@router.post("/synth")
def synthesize(request: SynthRequest) -> Dict:
    """Formula that holds exactly on the (tree, valuation) pairs of the given type."""
    try:
        config = request.config()
        formula = request.parsed_formula()
        t = parse_type(request.type, formula)
        if request.empty_valuation:
            psi = synth_psi_empty(formula, t, config)
        else:
            psi = synth_psi(formula, t, config)
        return {"formula": print_formula(psi), "size": psi.size}
    except HTTPException:
        raise
    except Exception as e:
        raise _fail("synthesizing formula", e)


@router.post("/omega")
def get_omega(request: FormulaRequest) -> List[List[str]]:
    """
    Decomposition tuples: each is a root formula followed by one formula per
    child, and the formula holds iff some tuple matches.
    """
    try:
        return omega_to_json(build_omega(request.parsed_formula(), request.config()))
    except HTTPException:
        raise
    except Exception as e:
        raise _fail("building decomposition", e)


@router.post("/check/thm1")
def check_decomposition(request: TreeRequest) -> Dict:
    try:
        config = request.config()
        formula = request.parsed_formula()
        tree = request.parsed_tree(config)
        valuation = request.parsed_valuation(tree)
        report = check_thm1(formula, tree, valuation, build_omega(formula, config))
        return report.model_dump()
    except HTTPException:
        raise
    except Exception as e:
        raise _fail("checking decomposition", e)


@router.post("/relabel")
def relabel_tree(request: TreeRequest) -> Dict:
    """
    Relabel each node with its letter and the type of its subtree.

    Returns 409 when the relabeling is undefined at some node.
    """
    try:
        config = request.config()
        formula = request.parsed_formula()
        tree = request.parsed_tree(config)
        relabeling = build_relabeling(formula, config)
        relabeled = apply_relabeling(relabeling, tree)
        return {"relabeled_tree": print_tree(relabeled), "legend": relabeling.legend}
    except HTTPException:
        raise
    except Exception as e:
        raise _fail("relabeling tree", e)


@router.post("/decompose")
def decompose(request: FormulaRequest) -> Dict:
    """The relabeling sentences, their legend and the U-free formula."""
    try:
        config = request.config()
        formula = request.parsed_formula()
        relabeling = build_relabeling(formula, config)
        phi_mso = build_phi_mso(formula, config)
        logger.info(f"Decomposed formula into {len(relabeling.sentences)} letters")
        return {
            "phi_mso": print_formula(phi_mso),
            "size": phi_mso.size,
            "relabeling": relabeling_to_json(relabeling),
            "legend": relabeling.legend,
        }
    except HTTPException:
        raise
    except Exception as e:
        raise _fail("decomposing formula", e)


@router.post("/check/thm2")
def check_relabeled(request: TreeRequest) -> Dict:
    try:
        config = request.config()
        formula = request.parsed_formula()
        tree = request.parsed_tree(config)
        valuation = request.parsed_valuation(tree)
        return check_thm2(formula, tree, valuation, config).model_dump()
    except HTTPException:
        raise
    except Exception as e:
        raise _fail("checking relabeled formula", e)
