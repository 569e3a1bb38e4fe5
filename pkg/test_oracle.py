import pytest

from msou.config import Config
from msou.errors import AddressError, ContextError, ResourceLimitError
from msou.services.formula import And, Exists, Not, Subset, big, disjoint, empty, free_vars, sing
from msou.services.oracle import (
    ANY,
    AT_MOST_ONE,
    SINGLE,
    Oracle,
    direct_type,
    evaluate,
    find_witness,
    plan_block,
)
from msou.services.phtypes import C_EMPTY, C_FF, C_ROOT, C_TT, FF, TT, Quant
from msou.services.syntax import parse_formula, parse_tree
from msou.services.tree import EMPTY_VALUATION, Valuation
from msou.services.typespace import tv
from msou.utils.generators import all_trees, all_valuations

EPS = ()


def test_label_atoms():
    assert evaluate(parse_formula("b(X)"), parse_tree("b"), Valuation({"X": [EPS]}))
    assert evaluate(parse_formula("b(X)"), parse_tree("a"), EMPTY_VALUATION)
    assert not evaluate(parse_formula("b(X)"), parse_tree("a"), Valuation({"X": [EPS]}))


def test_child_atom():
    formula = parse_formula("child1(X,Y)")
    tree = parse_tree("a(b)")
    assert evaluate(formula, tree, Valuation({"X": [EPS], "Y": [(1,)]}))
    assert not evaluate(parse_formula("child2(X,Y)"), tree, Valuation({"X": [EPS], "Y": [(1,)]}))
    assert not evaluate(formula, tree, Valuation({"X": [EPS, (1,)], "Y": [(1,)]}))


@pytest.mark.parametrize("tree", ["a", "a(b)", "b(a,b(a))"])
def test_unbound_never_holds_on_finite_trees(tree):
    formula = parse_formula("U X. b(X)")
    assert not evaluate(formula, parse_tree(tree))
    assert not evaluate(parse_formula("U X. X sub X"), parse_tree(tree))


def test_direct_type_of_child_atom():
    formula = parse_formula("child1(X,Y)")
    assert direct_type(formula, parse_tree("a"), Valuation({"Y": [EPS]})) == C_ROOT
    assert direct_type(formula, parse_tree("a")) == C_EMPTY
    assert direct_type(formula, parse_tree("a(b)"), Valuation({"X": [EPS], "Y": [(1,)]})) == C_TT
    assert direct_type(formula, parse_tree("a(b)"), Valuation({"Y": [(1,)]})) == C_FF


def test_direct_type_of_exists():
    t = direct_type(parse_formula("ex X. b(X)"), parse_tree("c"))
    assert t == Quant([TT, FF], [])
    assert str(t) == "q({ff,tt},{})"


def test_quantifier_types_have_no_unbounded_part():
    formula = parse_formula("U X. ex Y. (Y sub X & a(Y))")
    t = direct_type(formula, parse_tree("a(b,a)"))
    assert t.unbounded == ()
    assert all(s.unbounded == () for s in t.exists)


def test_sugar_semantics_on_small_trees():
    config = Config(alphabet=("a",), r_max=2)
    assert free_vars(empty("X")) == {"X"}
    assert free_vars(sing("X")) == {"X"}
    assert free_vars(big("X")) == {"X"}
    for tree in all_trees(config, 3):
        oracle = Oracle(tree)
        for valuation in all_valuations(tree, ["X"]):
            size = len(valuation["X"])
            assert oracle.holds(empty("X"), valuation) == (size == 0)
            assert oracle.holds(sing("X"), valuation) == (size == 1)
            assert oracle.holds(big("X"), valuation) == (size >= 2)


def test_block_search_with_disjoint_singletons():
    formula = Exists("X", Exists("Y", And(And(sing("X"), sing("Y")), disjoint("X", "Y"))))
    assert evaluate(formula, parse_tree("a(b)"))
    assert not evaluate(formula, parse_tree("a"))


def test_block_search_matches_truth_of_type():
    formula = Exists("X", Exists("Y", And(Subset("X", "Y"), Not(Subset("Y", "X")))))
    for text in ["a", "a(b)", "a(b,a)"]:
        tree = parse_tree(text)
        oracle = Oracle(tree)
        assert oracle.holds(formula) == tv(formula, oracle.type_of(formula))
    # the empty set is a proper subset of {eps}
    assert evaluate(formula, parse_tree("a"))


def test_witness_is_first_in_enumeration_order():
    formula = parse_formula("ex X. (sing(X) & b(X))")
    tree = parse_tree("a(b,a)")
    assert find_witness(formula, tree) == frozenset({(1,)})
    assert find_witness(parse_formula("ex X. (sing(X) & c(X))"), tree) is None
    assert find_witness(parse_formula("b(X)"), tree) is None


def test_node_cap():
    with pytest.raises(ResourceLimitError):
        Oracle(parse_tree("a(a,a)"), node_cap=2)


def test_evaluation_budget():
    formula = Exists("X", Exists("Y", And(Subset("X", "Y"), Not(Subset("Y", "X")))))
    oracle = Oracle(parse_tree("a(b)"), budget=1)
    with pytest.raises(ResourceLimitError):
        oracle.holds(formula)


def test_valuation_outside_domain():
    with pytest.raises(AddressError):
        evaluate(parse_formula("b(X)"), parse_tree("a"), Valuation({"X": [(2,)]}))


def test_contexts_are_rejected():
    with pytest.raises(ContextError):
        Oracle(parse_tree("a(_1)"))


def test_double_negation_and_conjunction():
    tree = parse_tree("a(b,b)")
    valuation = Valuation({"X": [(1,)], "Y": [(1,), (2,)]})
    oracle = Oracle(tree)
    for text in ["b(X)", "X sub Y", "child2(X,Y)", "ex Z. (Z sub Y & !(Z sub X))"]:
        phi = parse_formula(text)
        assert oracle.holds(Not(Not(phi)), valuation) == oracle.holds(phi, valuation)
        both = And(phi, parse_formula("a(Y)"))
        assert oracle.holds(both, valuation) == (
            oracle.holds(phi, valuation) and oracle.holds(parse_formula("a(Y)"), valuation)
        )


@pytest.mark.parametrize(
    "text, size",
    [
        ("ex X. (sing(X) & b(X))", SINGLE),
        ("ex X. (!big(X) & b(X))", AT_MOST_ONE),
        ("ex X. b(X)", ANY),
    ],
)
def test_block_plan_restricts_candidate_sizes(text, size):
    assert plan_block(parse_formula(text)).sizes == (size,)
