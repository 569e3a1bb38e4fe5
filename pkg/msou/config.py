from pathlib import Path
from typing import Tuple
import logging
import os
import re

from pydantic import BaseModel, ConfigDict, ValidationError, field_validator

from msou.errors import ConfigError

# Configure logging
logging.basicConfig(level=os.environ.get("MSOU_LOG_LEVEL", "INFO").upper())
logger = logging.getLogger(__name__)

# Get the directory where this script is located
BASE_DIR = Path(__file__).resolve().parent.parent

# Caps for the brute-force parts of the toolkit
NODE_CAP = int(os.environ.get("MSOU_NODE_CAP", "16"))
EVAL_BUDGET = int(os.environ.get("MSOU_EVAL_BUDGET", "5000000"))
MAX_STATES = int(os.environ.get("MSOU_MAX_STATES", "20000"))
FORMULA_BUDGET = int(os.environ.get("MSOU_FORMULA_BUDGET", "1000000"))
MEMO_SIZE = int(os.environ.get("MSOU_MEMO_SIZE", "200000"))

LABEL_PATTERN = re.compile(r"[a-z][A-Za-z0-9_]*(#t[0-9]+)?")
# Words the formula grammar reads as keywords or sugar, never as label atoms
RESERVED_WORDS = frozenset({"ex", "all", "sub", "empty", "sing", "big"})
CHILD_PATTERN = re.compile(r"child([0-9]+)")

logger.debug(f"BASE_DIR: {BASE_DIR}")
logger.debug(f"NODE_CAP: {NODE_CAP}, EVAL_BUDGET: {EVAL_BUDGET}")
logger.debug(f"MAX_STATES: {MAX_STATES}, FORMULA_BUDGET: {FORMULA_BUDGET}")


class Config(BaseModel):
    """Finite alphabet and maximal arity shared by the decomposition operations."""

    model_config = ConfigDict(frozen=True)

    alphabet: Tuple[str, ...] = ("a", "b")
    r_max: int = 2

    @field_validator("alphabet")
    @classmethod
    def check_alphabet(cls, value: Tuple[str, ...]) -> Tuple[str, ...]:
        if not value:
            raise ValueError("Alphabet must not be empty")
        for letter in value:
            if not LABEL_PATTERN.fullmatch(letter):
                raise ValueError(f"Invalid letter: {letter!r}")
            if letter in RESERVED_WORDS or CHILD_PATTERN.fullmatch(letter):
                raise ValueError(f"Letter {letter!r} is a reserved word of the formula syntax")
        # Keep first occurrences, drop repeats
        return tuple(dict.fromkeys(value))

    @field_validator("r_max")
    @classmethod
    def check_r_max(cls, value: int) -> int:
        if value < 0:
            raise ValueError("r_max must be >= 0")
        return value

    @classmethod
    def from_flags(cls, alphabet: str = "a,b", r_max: int = 2) -> "Config":
        """Build a config from the comma-separated alphabet used on the command line."""
        letters = tuple(part.strip() for part in alphabet.split(",") if part.strip())
        try:
            return cls(alphabet=letters, r_max=r_max)
        except ValidationError as e:
            raise ConfigError(str(e)) from e
