"""
Text formats: formulas, trees, valuations and type terms.

Formulas
    phi := LABEL(VAR) | VAR sub VAR | childN(VAR,VAR) | phi & phi | phi | phi
         | phi -> phi | !phi | (phi) | ex VAR. phi | all VAR. phi | U VAR. phi
         | empty(VAR) | sing(VAR) | big(VAR)
    Precedence ! > & > | > ->, quantifier bodies extend as far right as possible.
    Sugar is expanded while parsing; printing is fully parenthesised and only
    uses the core constructors, so parse(print(phi)) == phi.

Trees
    a(b,c(a)); a leaf is a bare label, holes are _1, _2, ...

Valuations
    one line per variable: X = {eps, 1, 2.1}; unlisted variables are empty.

Types
    tt | ff | empty | root | pair(t1,t2) | q({t,...},{t,...})
"""

from typing import List, Tuple

from lark import Lark, Transformer, v_args
from lark.exceptions import (
    UnexpectedCharacters,
    UnexpectedEOF,
    UnexpectedInput,
    UnexpectedToken,
    VisitError,
)

from msou.config import CHILD_PATTERN
from msou.errors import (
    FormulaSyntaxError,
    MsouError,
    ShapeError,
    UnknownSugarError,
    format_address,
)
from msou.services.formula import (
    And,
    Child,
    Exists,
    Formula,
    LabelAtom,
    Not,
    Subset,
    Unbound,
    big,
    empty,
    forall,
    implies,
    or_,
    sing,
)
from msou.services.phtypes import CHILD_VALUES, Bool, Child4, Pair, PhType, Quant
from msou.services.tree import Hole, Node, Tree, Valuation, address_key

# Conflicts between reducing a quantifier and extending its body are
# resolved as shift by the LALR analyser, which gives maximal bodies.
FORMULA_GRAMMAR = r"""
    ?start: formula

    ?formula: disj
            | disj "->" formula            -> implies

    ?disj: conj
         | disj "|" conj                   -> or_

    ?conj: unary
         | conj "&" unary                  -> and_

    ?unary: "!" unary                      -> not_
          | "ex" VAR "." formula           -> exists
          | "all" VAR "." formula          -> forall
          | "U" VAR "." formula            -> unbound
          | VAR "sub" VAR                  -> subset
          | LABEL "(" VAR ("," VAR)* ")"   -> call
          | "(" formula ")"

    VAR: /[A-Z][A-Za-z0-9_]*/
    LABEL: /[a-z][A-Za-z0-9_]*(#t[0-9]+)?/

    %import common.WS
    %ignore WS
"""

TREE_GRAMMAR = r"""
    start: node

    node: LABEL ("(" node ("," node)* ")")?   -> tree
        | HOLE                                 -> hole

    LABEL: /[a-z][A-Za-z0-9_]*(#t[0-9]+)?/
    HOLE: /_[0-9]+/

    %import common.WS
    %ignore WS
"""

VALUATION_GRAMMAR = r"""
    start: binding*

    binding: VAR "=" "{" (addr ("," addr)*)? "}"

    addr: "eps"                 -> root_addr
        | INT ("." INT)*        -> path

    VAR: /[A-Z][A-Za-z0-9_]*/
    INT: /[0-9]+/

    %import common.WS
    %ignore WS
"""

TYPE_GRAMMAR = r"""
    start: term

    ?term: NAME                             -> atom
         | "pair" "(" term "," term ")"     -> pair
         | "q" "(" tset "," tset ")"        -> quant

    tset: "{" (term ("," term)*)? "}"

    NAME: /[a-z]+/

    %import common.WS
    %ignore WS
"""

CHILD_NAME = CHILD_PATTERN
SUGAR_NAMES = {"empty": empty, "sing": sing, "big": big}

formula_parser = Lark(FORMULA_GRAMMAR, parser="lalr", propagate_positions=True)
tree_parser = Lark(TREE_GRAMMAR, parser="lalr", propagate_positions=True)
valuation_parser = Lark(VALUATION_GRAMMAR, parser="lalr", propagate_positions=True)
type_parser = Lark(TYPE_GRAMMAR, parser="lalr")


def _line_col(text: str, offset: int) -> Tuple[int, int]:
    line = text.count("\n", 0, offset) + 1
    column = offset - (text.rfind("\n", 0, offset) + 1) + 1
    return line, column


def _syntax_error(text: str, exc: UnexpectedInput) -> FormulaSyntaxError:
    if isinstance(exc, UnexpectedToken) and exc.token.type == "$END":
        offset, message = len(text), "Unexpected end of input"
    elif isinstance(exc, UnexpectedToken):
        offset = exc.token.start_pos if exc.token.start_pos is not None else 0
        message = f"Unexpected token {str(exc.token)!r}"
    elif isinstance(exc, UnexpectedCharacters):
        offset = exc.pos_in_stream
        message = f"Unexpected character {text[offset:offset + 1]!r}"
    elif isinstance(exc, UnexpectedEOF):
        offset, message = len(text), "Unexpected end of input"
    else:
        offset, message = 0, str(exc)
    line, column = _line_col(text, offset)
    return FormulaSyntaxError(message, line, column, offset)


def _run(parser: Lark, transformer: Transformer, text: str):
    try:
        tree = parser.parse(text)
    except UnexpectedInput as e:
        raise _syntax_error(text, e) from None
    except RecursionError:
        raise _too_deep(text) from None
    try:
        return transformer.transform(tree)
    except VisitError as e:
        if isinstance(e.orig_exc, MsouError):
            raise e.orig_exc from None
        if isinstance(e.orig_exc, RecursionError):
            raise _too_deep(text) from None
        raise
    except RecursionError:
        raise _too_deep(text) from None


def _too_deep(text: str) -> FormulaSyntaxError:
    line, column = _line_col(text, len(text))
    return FormulaSyntaxError("Input nested too deeply", line, column, len(text))


# Formulas


class FormulaBuilder(Transformer):
    """Turn a formula parse tree into the AST, expanding sugar."""

    def __init__(self, text: str):
        super().__init__()
        self.text = text

    def implies(self, children):
        return implies(children[0], children[1])

    def or_(self, children):
        return or_(children[0], children[1])

    def and_(self, children):
        return And(children[0], children[1])

    def not_(self, children):
        return Not(children[0])

    def exists(self, children):
        return Exists(str(children[0]), children[1])

    def forall(self, children):
        return forall(str(children[0]), children[1])

    def unbound(self, children):
        return Unbound(str(children[0]), children[1])

    def subset(self, children):
        return Subset(str(children[0]), str(children[1]))

    @v_args(meta=True)
    def call(self, meta, children):
        name = str(children[0])
        args = [str(arg) for arg in children[1:]]
        offset = getattr(meta, "start_pos", 0) or 0
        line, column = _line_col(self.text, offset)

        match = CHILD_NAME.fullmatch(name)
        if match:
            index = int(match.group(1))
            if len(args) != 2:
                raise FormulaSyntaxError(f"{name} takes two variables", line, column, offset)
            if index < 1:
                raise FormulaSyntaxError("Child index must be >= 1", line, column, offset)
            return Child(index, args[0], args[1])
        if name in SUGAR_NAMES:
            if len(args) != 1:
                raise FormulaSyntaxError(f"{name} takes one variable", line, column, offset)
            return SUGAR_NAMES[name](args[0])
        if len(args) == 1:
            return LabelAtom(name, args[0])
        raise UnknownSugarError(f"Unknown sugar keyword {name!r}", line, column, offset)


def parse_formula(text: str) -> Formula:
    """
    Parse formula text into the AST.

    Raises:
        FormulaSyntaxError: with line, column and offset of the problem
        UnknownSugarError: for an application like foo(X,Y)
    """
    return _run(formula_parser, FormulaBuilder(text), text)


def print_formula(formula: Formula) -> str:
    """Canonical, fully parenthesised text of a formula."""
    if isinstance(formula, LabelAtom):
        return f"{formula.label}({formula.var})"
    if isinstance(formula, Subset):
        return f"{formula.x} sub {formula.y}"
    if isinstance(formula, Child):
        return f"child{formula.index}({formula.x},{formula.y})"
    if isinstance(formula, And):
        return f"(({print_formula(formula.lhs)}) & ({print_formula(formula.rhs)}))"
    if isinstance(formula, Not):
        return f"!({print_formula(formula.inner)})"
    if isinstance(formula, Exists):
        return f"ex {formula.var}. ({print_formula(formula.body)})"
    if isinstance(formula, Unbound):
        return f"U {formula.var}. ({print_formula(formula.body)})"
    raise TypeError(f"Not a formula: {formula!r}")


# Trees


class TreeBuilder(Transformer):
    def start(self, children):
        return children[0]

    def tree(self, children):
        return Tree(str(children[0]), tuple(children[1:]))

    def hole(self, children):
        return Hole(int(str(children[0])[1:]))


def parse_tree(text: str) -> Node:
    """Parse a tree or context in term syntax."""
    return _run(tree_parser, TreeBuilder(), text)


def print_tree(node: Node) -> str:
    if isinstance(node, Hole):
        return f"_{node.hole_id}"
    if not node.children:
        return node.label
    return f"{node.label}({','.join(print_tree(child) for child in node.children)})"


# Valuations


class ValuationBuilder(Transformer):
    def __init__(self, text: str):
        super().__init__()
        self.text = text

    def start(self, children):
        assignment = {}
        for var, nodes in children:
            if var in assignment:
                raise FormulaSyntaxError(f"Variable {var} is assigned twice")
            assignment[var] = nodes
        return Valuation(assignment)

    def binding(self, children):
        return str(children[0]), list(children[1:])

    def root_addr(self, children):
        return ()

    @v_args(meta=True)
    def path(self, meta, children):
        address = tuple(int(str(part)) for part in children)
        if any(i < 1 for i in address):
            offset = getattr(meta, "start_pos", 0) or 0
            line, column = _line_col(self.text, offset)
            raise FormulaSyntaxError("Child indices start at 1", line, column, offset)
        return address


def parse_valuation(text: str) -> Valuation:
    return _run(valuation_parser, ValuationBuilder(text), text)


def print_valuation(valuation: Valuation) -> str:
    lines = []
    for var, nodes in valuation.items():
        members = ", ".join(format_address(a) for a in sorted(nodes, key=address_key))
        lines.append(f"{var} = {{{members}}}")
    return "\n".join(lines)


# Types


class TypeTermBuilder(Transformer):
    """Raw type terms; tt/ff stay ambiguous until matched against a formula."""

    def start(self, children):
        return children[0]

    def atom(self, children):
        return ("atom", str(children[0]))

    def pair(self, children):
        return ("pair", children[0], children[1])

    def quant(self, children):
        return ("quant", children[0], children[1])

    def tset(self, children):
        return list(children)


def _resolve(raw, formula: Formula) -> PhType:
    while isinstance(formula, Not):
        formula = formula.inner
    kind = raw[0]
    if isinstance(formula, (LabelAtom, Subset)) and kind == "atom" and raw[1] in ("tt", "ff"):
        return Bool(raw[1] == "tt")
    if isinstance(formula, Child) and kind == "atom" and raw[1] in CHILD_VALUES:
        return Child4(raw[1])
    if isinstance(formula, And) and kind == "pair":
        return Pair(_resolve(raw[1], formula.lhs), _resolve(raw[2], formula.rhs))
    if isinstance(formula, (Exists, Unbound)) and kind == "quant":
        return Quant(
            [_resolve(t, formula.body) for t in raw[1]],
            [_resolve(t, formula.body) for t in raw[2]],
        )
    raise ShapeError(f"Type term does not fit formula {print_formula(formula)}")


def parse_type(text: str, formula: Formula) -> PhType:
    """Parse a type term, using formula's shape to pick Bool or Child4 for tt/ff."""
    raw = _run(type_parser, TypeTermBuilder(), text)
    return _resolve(raw, formula)


def split_labels(text: str) -> List[str]:
    return [part.strip() for part in text.split(",") if part.strip()]
