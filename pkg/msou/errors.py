"""
Exceptions raised by the toolkit.

Routes turn them into HTTP statuses and the CLI into exit codes; library code
only raises them.
"""

from typing import Optional, Tuple


class MsouError(Exception):
    """Base class for every error raised by the toolkit."""


class FormulaSyntaxError(MsouError):
    """Text that does not conform to one of the grammars."""

    def __init__(self, message: str, line: int = 1, column: int = 1, offset: int = 0):
        super().__init__(f"{message} (line {line}, column {column}, offset {offset})")
        self.line = line
        self.column = column
        self.offset = offset


class UnknownSugarError(FormulaSyntaxError):
    """An application of a lowercase name that is neither a label atom nor known sugar."""


class AddressError(MsouError):
    """A node address outside the domain of the tree it is used with."""

    def __init__(self, address: Tuple[int, ...], message: Optional[str] = None):
        super().__init__(message or f"Address {format_address(address)} is not in the tree domain")
        self.address = address


class ConfigError(MsouError):
    """A tree or context that does not conform to the configured alphabet or arity."""


class ContextError(MsouError):
    """Holes that are duplicated, uncovered, unknown, or carry valuation below them."""


class ShapeError(MsouError):
    """A type whose shape does not match the formula, or a comp call with wrong arity."""


class ResourceLimitError(MsouError):
    """One of the configured caps was exceeded."""


class NotUniqueError(MsouError):
    """A relabeling is undefined at a node: zero or several sentences hold there."""

    def __init__(self, address: Tuple[int, ...], letters: Tuple[str, ...]):
        super().__init__(
            f"Relabeling undefined at {format_address(address)}: "
            f"{len(letters)} sentences hold ({', '.join(letters) or 'none'})"
        )
        self.address = address
        self.letters = letters


def format_address(address: Tuple[int, ...]) -> str:
    return ".".join(str(i) for i in address) if address else "eps"
