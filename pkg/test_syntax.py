import pytest

from msou.config import Config
from msou.errors import ConfigError, FormulaSyntaxError, ShapeError, UnknownSugarError
from msou.services.formula import (
    And,
    Child,
    Exists,
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
from msou.services.phtypes import C_TT, FF, TT, Pair, Quant
from msou.services.syntax import (
    parse_formula,
    parse_tree,
    parse_type,
    parse_valuation,
    print_formula,
    print_tree,
    print_valuation,
    split_labels,
)
from msou.services.tree import EMPTY_VALUATION, Hole, Tree, Valuation

X, Y = "X", "Y"


@pytest.mark.parametrize(
    "text, expected",
    [
        ("b(X)", LabelAtom("b", X)),
        ("X sub Y", Subset(X, Y)),
        ("child2(X,Y)", Child(2, X, Y)),
        ("!a(X) & b(X)", And(Not(LabelAtom("a", X)), LabelAtom("b", X))),
        ("a(X) | b(X)", or_(LabelAtom("a", X), LabelAtom("b", X))),
        ("a(X) -> b(X)", implies(LabelAtom("a", X), LabelAtom("b", X))),
        ("all Y. Y sub X", forall(Y, Subset(Y, X))),
        ("U X. child1(X,Y)", Unbound(X, Child(1, X, Y))),
        ("empty(X)", empty(X)),
        ("big(X)", big(X)),
        ("ex X. b(X) & sing(X)", Exists(X, And(LabelAtom("b", X), sing(X)))),
        ("(ex X. b(X)) & a(Y)", And(Exists(X, LabelAtom("b", X)), LabelAtom("a", Y))),
        ("a#t3(X)", LabelAtom("a#t3", X)),
    ],
)
def test_parse_formula(text, expected):
    assert parse_formula(text) == expected


def test_and_binds_tighter_than_or():
    a, b, c = (LabelAtom(label, X) for label in "abc")
    assert parse_formula("a(X) | b(X) & c(X)") == or_(a, And(b, c))


def test_implication_is_right_associative():
    a, b, c = (LabelAtom(label, X) for label in "abc")
    assert parse_formula("a(X) -> b(X) -> c(X)") == implies(a, implies(b, c))


def test_unbalanced_paren_reports_offset():
    with pytest.raises(FormulaSyntaxError) as err:
        parse_formula("b(X")
    assert err.value.offset == 3
    assert err.value.line == 1


def test_unexpected_character_reports_position():
    with pytest.raises(FormulaSyntaxError) as err:
        parse_formula("a(X) &\n  $")
    assert err.value.line == 2
    assert err.value.column == 3


def test_unknown_sugar():
    with pytest.raises(UnknownSugarError):
        parse_formula("foo(X,Y)")


def test_sugar_arity_is_checked():
    with pytest.raises(FormulaSyntaxError):
        parse_formula("sing(X,Y)")


def test_print_formula():
    assert print_formula(Not(LabelAtom("a", X))) == "!(a(X))"
    assert print_formula(And(Subset(X, Y), Child(2, X, "Z"))) == "((X sub Y) & (child2(X,Z)))"


@pytest.mark.parametrize(
    "text",
    [
        "ex X. b(X) & sing(X)",
        "U X. (child1(X,Y) & !(Y sub X))",
        "all Y. (a(Y) -> ex Z. child2(Y,Z))",
        "!!a(X) & (b(Y) | X sub Y)",
    ],
)
def test_printed_formulas_parse_back(text):
    formula = parse_formula(text)
    assert parse_formula(print_formula(formula)) == formula


def test_parse_tree_and_context():
    assert parse_tree("a(b, c(_1))") == Tree("a", (Tree("b"), Tree("c", (Hole(1),))))
    assert parse_tree("_2") == Hole(2)
    assert print_tree(parse_tree("a( b , c(d,_1) )")) == "a(b,c(d,_1))"


def test_malformed_tree():
    with pytest.raises(FormulaSyntaxError):
        parse_tree("a(b,")


def test_parse_valuation():
    valuation = parse_valuation("X = {eps, 1.2}\nY = {}")
    assert valuation == Valuation({X: [(), (1, 2)]})
    assert valuation[Y] == frozenset()
    assert parse_valuation("") == EMPTY_VALUATION


def test_valuation_rejects_zero_index_and_repeats():
    with pytest.raises(FormulaSyntaxError):
        parse_valuation("X = {0}")
    with pytest.raises(FormulaSyntaxError):
        parse_valuation("X = {eps} X = {1}")


def test_print_valuation_orders_addresses():
    valuation = Valuation({Y: [(2,)], X: [(1, 1), ()]})
    assert print_valuation(valuation) == "X = {eps, 1.1}\nY = {2}"
    assert parse_valuation(print_valuation(valuation)) == valuation


def test_parse_type_follows_formula_shape():
    quant = parse_formula("ex X. b(X)")
    assert parse_type("q({ff,tt},{})", quant) == Quant([FF, TT], [])
    assert parse_type("tt", parse_formula("child1(X,Y)")) == C_TT
    pair = parse_formula("a(X) & !child1(X,Y)")
    assert parse_type("pair(ff,tt)", pair) == Pair(FF, C_TT)


def test_parse_type_shape_mismatch():
    with pytest.raises(ShapeError):
        parse_type("root", parse_formula("b(X)"))
    with pytest.raises(ShapeError):
        parse_type("tt", parse_formula("ex X. b(X)"))


def test_split_labels():
    assert split_labels(" a, b ,,c ") == ["a", "b", "c"]


@pytest.mark.parametrize("letter", ["empty", "sing", "big", "ex", "all", "sub", "child1", "child12"])
def test_alphabet_rejects_reserved_words(letter):
    with pytest.raises(ConfigError):
        Config.from_flags(f"a,{letter}")


@pytest.mark.parametrize("letter", ["emptyish", "singer", "children", "exit"])
def test_letters_near_reserved_words_print_and_parse_back(letter):
    config = Config.from_flags(f"a,{letter}")
    formula = And(LabelAtom(letter, "X"), Exists("Y", LabelAtom(config.alphabet[0], "Y")))
    assert parse_formula(print_formula(formula)) == formula


def test_deep_nesting_is_a_syntax_error():
    with pytest.raises(FormulaSyntaxError, match="nested too deeply"):
        parse_formula("!" * 5000 + "a(X)")
