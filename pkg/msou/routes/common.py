from fastapi import HTTPException
from pydantic import BaseModel
from typing import Optional
import logging

from msou.config import Config
from msou.errors import MsouError, NotUniqueError, ResourceLimitError
from msou.services.formula import Formula
from msou.services.syntax import parse_formula, parse_tree, parse_valuation
from msou.services.tree import EMPTY_VALUATION, Tree, Valuation, check_valuation, validate_tree

logger = logging.getLogger(__name__)


class FormulaRequest(BaseModel):
    """Fields shared by every request: the formula and the tree configuration"""
    formula: str
    alphabet: Optional[str] = "a,b"  # comma-separated letters
    rmax: Optional[int] = 2

    def config(self) -> Config:
        return Config.from_flags(self.alphabet or "a,b", 2 if self.rmax is None else self.rmax)

    def parsed_formula(self) -> Formula:
        return parse_formula(self.formula)


class TreeRequest(FormulaRequest):
    tree: str
    valuation: Optional[str] = None  # e.g. "X = {eps, 1}"

    def parsed_tree(self, config: Config) -> Tree:
        tree = parse_tree(self.tree)
        validate_tree(tree, config)
        return tree

    def parsed_valuation(self, tree: Tree) -> Valuation:
        if not self.valuation:
            return EMPTY_VALUATION
        valuation = parse_valuation(self.valuation)
        check_valuation(tree, valuation)
        return valuation


def to_http_error(e: MsouError) -> HTTPException:
    """Map a toolkit error to the HTTP status a client should see."""
    if isinstance(e, ResourceLimitError):
        return HTTPException(status_code=413, detail=str(e))
    if isinstance(e, NotUniqueError):
        return HTTPException(status_code=409, detail=str(e))
    logger.warning(f"Rejected request: {type(e).__name__}: {e}")
    return HTTPException(status_code=400, detail=str(e))
