from fastapi import APIRouter, HTTPException
from typing import Dict, Optional
import logging

from msou.errors import MsouError
from msou.routes.common import FormulaRequest, TreeRequest, to_http_error
from msou.services.compose import bottom_up_type
from msou.services.formula import Exists
from msou.services.oracle import Oracle
from msou.services.typespace import reachable_types, tv
from msou.utils.serialization import nodes_to_json, type_space_to_json

logger = logging.getLogger(__name__)
router = APIRouter()


class TypeRequest(TreeRequest):
    """Request model for the type endpoint"""
    method: Optional[str] = "direct"  # direct | comp
    check: Optional[bool] = False  # run both methods and report a mismatch


@router.post("/eval")
def evaluate_formula(request: TreeRequest) -> Dict:
    """
    Decide whether the formula holds on the tree under the valuation.

    Returns:
        {"holds": bool}, plus "witness" (addresses, or null) for ex-formulas
    """
    try:
        config = request.config()
        formula = request.parsed_formula()
        tree = request.parsed_tree(config)
        valuation = request.parsed_valuation(tree)

        oracle = Oracle(tree)
        result = {"holds": oracle.holds(formula, valuation)}
        if isinstance(formula, Exists):
            result["witness"] = nodes_to_json(oracle.witness(formula, valuation))
        return result

    except HTTPException:
        raise
    except MsouError as e:
        raise to_http_error(e)
    except Exception as e:
        logger.error(f"Error evaluating formula: {str(e)}")
        raise HTTPException(status_code=500, detail=f"Error evaluating formula: {str(e)}")


@router.post("/type")
def compute_type(request: TypeRequest) -> Dict:
    """
    Compute the type of (tree, valuation) for the formula.

    Args:
        method: "direct" enumerates subsets, "comp" folds comp from the leaves
        check: compute both and answer 409 when they differ

    Returns:
        {"type": canonical type term, "tv": truth value read off the type}
    """
    try:
        if request.method not in ("direct", "comp"):
            raise HTTPException(status_code=400, detail=f"Unknown method: {request.method}")
        config = request.config()
        formula = request.parsed_formula()
        tree = request.parsed_tree(config)
        valuation = request.parsed_valuation(tree)

        if request.check:
            direct = Oracle(tree).type_of(formula, valuation)
            folded = bottom_up_type(formula, tree, valuation, config)
            if direct != folded:
                logger.error(f"Direct type {direct} and bottom-up type {folded} differ")
                raise HTTPException(
                    status_code=409,
                    detail=f"Direct type {direct} differs from bottom-up type {folded}",
                )
            t = direct
        elif request.method == "comp":
            t = bottom_up_type(formula, tree, valuation, config)
        else:
            t = Oracle(tree).type_of(formula, valuation)

        return {"type": str(t), "tv": tv(formula, t)}

    except HTTPException:
        raise
    except MsouError as e:
        raise to_http_error(e)
    except Exception as e:
        logger.error(f"Error computing type: {str(e)}")
        raise HTTPException(status_code=500, detail=f"Error computing type: {str(e)}")


@router.post("/typespace")
def get_type_space(request: FormulaRequest) -> Dict:
    """Potential size, reachable types and truthy types of the formula."""
    try:
        space = reachable_types(request.parsed_formula(), request.config())
        logger.info(f"Type space with {len(space)} reachable types")
        return type_space_to_json(space)

    except HTTPException:
        raise
    except MsouError as e:
        raise to_http_error(e)
    except Exception as e:
        logger.error(f"Error building type space: {str(e)}")
        raise HTTPException(status_code=500, detail=f"Error building type space: {str(e)}")
