import pytest

from msou import config as settings
from msou.config import Config
from msou.errors import AddressError, ConfigError, ContextError, ShapeError
from msou.services.compose import Composer, bottom_up_type, comp, context_type, default_composer
from msou.services.oracle import direct_type
from msou.services.phtypes import C_EMPTY, C_FF, C_ROOT, C_TT, FF, TT, Quant
from msou.services.syntax import parse_formula, parse_tree
from msou.services.tree import EMPTY_VALUATION, Valuation, plug, restrict_valuation
from msou.utils.generators import all_trees, all_valuations

CHILD1 = parse_formula("child1(X,Y)")
U_B = parse_formula("U X. b(X)")


def test_label_atom_clause():
    b = parse_formula("b(X)")
    assert comp(b, "a", 0, {"X"}) == FF
    assert comp(b, "a", 0, set()) == TT
    assert comp(b, "b", 2, {"X"}, [TT, TT]) == TT
    assert comp(b, "b", 2, {"X"}, [TT, FF]) == FF


def test_subset_clause():
    subset = parse_formula("X sub Y")
    assert comp(subset, "a", 0, {"X"}) == FF
    assert comp(subset, "a", 0, {"X", "Y"}) == TT
    assert comp(subset, "a", 1, {"Y"}, [TT]) == TT


def test_child_clause():
    assert comp(CHILD1, "a", 2, set(), [C_TT, C_EMPTY]) == C_TT
    assert comp(CHILD1, "a", 1, {"X"}, [C_ROOT]) == C_TT
    assert comp(CHILD1, "a", 2, {"X"}, [C_EMPTY, C_ROOT]) == C_FF
    assert comp(CHILD1, "a", 0, {"Y"}) == C_ROOT
    assert comp(CHILD1, "a", 1, set(), [C_EMPTY]) == C_EMPTY
    assert comp(CHILD1, "a", 1, set(), [C_ROOT]) == C_FF


def test_unbounded_stays_alive_through_comp():
    arg = Quant([TT], [TT])
    assert comp(U_B, "a", 1, set(), [arg]) == Quant([TT, FF], [TT, FF])


def test_comp_argument_checks():
    with pytest.raises(ShapeError):
        comp(CHILD1, "a", 2, set(), [C_TT])
    with pytest.raises(ShapeError):
        comp(CHILD1, "a", 1, {"Z"}, [C_TT])
    with pytest.raises(ShapeError):
        comp(CHILD1, "a", 1, set(), [TT])
    with pytest.raises(ConfigError):
        comp(CHILD1, "a", 3, set(), [C_EMPTY] * 3, Config(r_max=2))


def test_composer_memo_is_per_instance():
    composer = Composer()
    formula = parse_formula("ex X. b(X)")
    first = composer.comp(formula, "a", 0, set(), ())
    assert composer.cached
    assert composer.comp(formula, "a", 0, set(), ()) is first
    composer.clear()
    assert composer.cached == 0


def test_composer_memo_is_bounded():
    composer = Composer(max_size=4)
    formula = parse_formula("ex X. (b(X) & ex Y. (Y sub X & a(Y)))")
    for letter in ["a", "b", "c", "d", "e", "f"]:
        composer.comp(formula, letter, 0, set(), ())
    assert composer.cached == 4
    assert composer.comp(formula, "a", 0, set(), ()) == Composer().comp(formula, "a", 0, set(), ())


def test_default_composer_is_bounded():
    assert default_composer.max_size == settings.MEMO_SIZE


def test_bottom_up_type():
    assert bottom_up_type(parse_formula("b(X)"), parse_tree("b"), Valuation({"X": [()]})) == TT
    assert bottom_up_type(parse_formula("ex X. b(X)"), parse_tree("c")) == Quant([TT, FF], [])


def test_bottom_up_type_rejects_bad_inputs():
    with pytest.raises(ContextError):
        bottom_up_type(CHILD1, parse_tree("a(_1)"))
    with pytest.raises(AddressError):
        bottom_up_type(CHILD1, parse_tree("a"), Valuation({"X": [(1,)]}))
    with pytest.raises(ConfigError):
        bottom_up_type(CHILD1, parse_tree("c"), EMPTY_VALUATION, Config())


FORMULAS = [
    "b(X)",
    "X sub Y",
    "child2(X,Y)",
    "!(a(X) & child1(Y,X))",
    "ex Z. (child1(X,Z) & b(Z))",
    "U X. (X sub Y & a(X))",
    "ex X. !ex Y. (Y sub X & !(X sub Y))",
]


@pytest.mark.parametrize("text", FORMULAS)
def test_bottom_up_matches_direct_type(text):
    formula = parse_formula(text)
    for tree in all_trees(Config(), 3):
        for valuation in all_valuations(tree, formula.fv_order):
            assert bottom_up_type(formula, tree, valuation) == direct_type(formula, tree, valuation)


def test_context_type():
    assert context_type(parse_formula("b(X)"), parse_tree("a(_1)"), EMPTY_VALUATION, {1: FF}) == FF
    assumed = {1: Quant([TT], [TT])}
    assert context_type(U_B, parse_tree("a(_1)"), EMPTY_VALUATION, assumed) == Quant(
        [TT, FF], [TT, FF]
    )


@pytest.mark.parametrize("text", FORMULAS)
def test_context_type_agrees_with_plugging(text):
    formula = parse_formula(text)
    context = parse_tree("a(b,_1)")
    hole = (2,)
    for sub in all_trees(Config(), 2):
        tree = plug(context, {1: sub})
        for valuation in all_valuations(tree, formula.fv_order):
            outside = Valuation(
                {var: [u for u in nodes if u[:1] != hole] for var, nodes in valuation.items()}
            )
            assumed = bottom_up_type(formula, sub, restrict_valuation(valuation, hole))
            expected = bottom_up_type(formula, tree, valuation)
            assert context_type(formula, context, outside, {1: assumed}) == expected


def test_context_type_errors():
    context = parse_tree("a(_1,_2)")
    with pytest.raises(ContextError):
        context_type(CHILD1, context, EMPTY_VALUATION, {1: C_EMPTY})
    with pytest.raises(ContextError):
        context_type(CHILD1, context, EMPTY_VALUATION, {1: C_EMPTY, 2: C_EMPTY, 3: C_EMPTY})
    with pytest.raises(ContextError):
        context_type(CHILD1, context, Valuation({"X": [(1,)]}), {1: C_EMPTY, 2: C_EMPTY})
    with pytest.raises(ShapeError):
        context_type(CHILD1, context, EMPTY_VALUATION, {1: TT, 2: C_EMPTY})
