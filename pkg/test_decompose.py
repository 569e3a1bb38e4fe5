import pytest

from msou.config import Config
from msou.errors import ConfigError, NotUniqueError, ResourceLimitError, ShapeError
from msou.services.decompose import (
    Relabeling,
    apply_relabeling,
    build_omega,
    build_phi_mso,
    build_relabeling,
    check_thm1,
    check_thm2,
    eta,
    omega_holds,
    relabel_letter,
    root_label,
)
from msou.services.formula import LabelAtom, falsum, is_mso, verum
from msou.services.oracle import direct_type, evaluate
from msou.services.syntax import parse_formula, parse_tree, print_formula
from msou.services.tree import EMPTY_VALUATION, Tree, Valuation, addresses, subtree
from msou.utils.generators import all_trees, all_valuations

B_X = parse_formula("b(X)")
ONE_B = parse_formula("ex X. (b(X) & sing(X))")


def test_eta_matches_written_form():
    written = parse_formula("(all Y. b(Y)) & (all Y. Y sub X)")
    assert eta("b", {"X"}, {"X"}) == written


def test_eta_on_single_nodes():
    tree = parse_tree("a")
    assert evaluate(eta("a", set(), {"X"}), tree, EMPTY_VALUATION)
    assert not evaluate(eta("a", set(), {"X"}), tree, Valuation({"X": [()]}))
    assert evaluate(eta("a", {"X"}, {"X"}), tree, Valuation({"X": [()]}))
    assert not evaluate(eta("b", set(), {"X"}), tree, EMPTY_VALUATION)


def test_omega_for_single_letter_leaves():
    omega = build_omega(B_X, Config(alphabet=("b",), r_max=0))
    assert omega.tuples() == [(eta("b", set(), {"X"}),), (eta("b", {"X"}, {"X"}),)]

    omega = build_omega(B_X, Config(alphabet=("a",), r_max=0))
    assert omega.tuples() == [(eta("a", set(), {"X"}),)]


def test_omega_formulas_stay_within_free_variables(config):
    formula = parse_formula("ex Y. (child1(X,Y) & b(Y))")
    for entry in build_omega(formula, config).entries:
        assert entry.arity == len(entry.child_types)
        for part in entry.formulas:
            assert part.fv <= formula.fv


def test_check_thm1_examples(config):
    omega = build_omega(B_X, config)
    report = check_thm1(B_X, parse_tree("b"), Valuation({"X": [()]}), omega)
    assert report.lhs and report.rhs
    assert report.witness == [print_formula(eta("b", {"X"}, {"X"}))]
    assert omega_holds(omega.entries[report.witness_index], parse_tree("b"), Valuation({"X": [()]}))

    report = check_thm1(B_X, parse_tree("a"), Valuation({"X": [()]}), omega)
    assert not report.lhs and not report.rhs
    assert report.witness is None


def test_check_thm1_rejects_trees_outside_the_configuration(small_config):
    omega = build_omega(B_X, small_config)
    with pytest.raises(ConfigError):
        check_thm1(B_X, parse_tree("c"), EMPTY_VALUATION, omega)
    with pytest.raises(ConfigError):
        check_thm1(B_X, parse_tree("a(b,b)"), EMPTY_VALUATION, omega)


@pytest.mark.parametrize("text", ["b(X)", "ex Y. (child1(X,Y) & b(Y))", "U X. a(X)", "!ex X. (X sub Y & a(X))"])
def test_decomposition_is_equivalent_on_small_trees(text, small_config):
    formula = parse_formula(text)
    omega = build_omega(formula, small_config)
    for tree in all_trees(small_config, 3):
        for valuation in all_valuations(tree, formula.fv_order):
            report = check_thm1(formula, tree, valuation, omega)
            assert report.lhs == report.rhs


def test_relabel_letter():
    assert relabel_letter("a", 3) == "a#t3"


def test_root_label():
    assert evaluate(root_label("a", 2), parse_tree("a(b)"))
    assert not evaluate(root_label("b", 2), parse_tree("a(b)"))


def test_relabeling_sentences(config):
    relabeling = build_relabeling(B_X, config)
    assert len(relabeling.sentences) == 4
    assert set(relabeling.alphabet) == {"a#t0", "a#t1", "b#t0", "b#t1"}
    assert relabeling.legend == {"0": "ff", "1": "tt"}
    assert all(not sentence.fv for sentence in relabeling.sentences.values())


def test_relabeling_rejects_free_variables():
    with pytest.raises(ShapeError):
        Relabeling({"p": LabelAtom("a", "X")})


def test_apply_relabeling_with_constant_sentences():
    relabeling = Relabeling({"p": verum(), "q": falsum()})
    assert apply_relabeling(relabeling, parse_tree("a(b)")) == Tree("p", (Tree("p"),))

    with pytest.raises(NotUniqueError) as err:
        apply_relabeling(Relabeling({"p": verum(), "q": verum()}), parse_tree("a(b)"))
    assert err.value.address == ()


def test_apply_relabeling_marks_letters_and_types(config):
    assert print_formula(B_X) == "b(X)"
    relabeled = apply_relabeling(build_relabeling(B_X, config), parse_tree("a(b)"))
    assert relabeled == parse_tree("a#t1(b#t1)")


def test_relabeling_agrees_with_direct_types(small_config):
    formula = parse_formula("ex Y. (child1(X,Y) & b(Y))")
    relabeling = build_relabeling(formula, small_config)
    legend = relabeling.legend
    for tree in all_trees(small_config, 3):
        relabeled = apply_relabeling(relabeling, tree)
        for u in addresses(tree):
            letter, index = subtree(relabeled, u).label.split("#t")
            assert letter == subtree(tree, u).label
            assert legend[index] == str(direct_type(formula, subtree(tree, u)))


def test_phi_mso_is_mso_with_contained_free_variables(config):
    for text in ["b(X)", "U X. a(X)", "ex Y. (child1(X,Y) & b(Y))"]:
        formula = parse_formula(text)
        phi_mso = build_phi_mso(formula, config)
        assert is_mso(phi_mso)
        assert phi_mso.fv <= formula.fv


def test_phi_mso_size_guard(config):
    with pytest.raises(ResourceLimitError):
        build_phi_mso(parse_formula("ex Y. (child1(X,Y) & b(Y))"), config, budget=10)


def test_check_thm2_examples(config):
    report = check_thm2(ONE_B, parse_tree("a(b)"), EMPTY_VALUATION, config)
    assert report.lhs and report.rhs
    assert report.is_mso and report.fv_contained

    report = check_thm2(ONE_B, parse_tree("a(a)"), EMPTY_VALUATION, config)
    assert not report.lhs and not report.rhs


@pytest.mark.parametrize("text", ["b(X)", "U X. a(X)", "ex Y. (child1(X,Y) & b(Y))"])
def test_relabeled_formula_is_equivalent_on_small_trees(text, small_config):
    formula = parse_formula(text)
    for tree in all_trees(small_config, 3):
        for valuation in all_valuations(tree, formula.fv_order):
            report = check_thm2(formula, tree, valuation, small_config)
            assert report.lhs == report.rhs, (print_formula(formula), tree, valuation)
