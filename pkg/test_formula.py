import pytest

from msou.errors import ConfigError
from msou.services.formula import (
    And,
    Child,
    Exists,
    LabelAtom,
    Not,
    Subset,
    Unbound,
    big,
    big_and,
    big_or,
    conjuncts,
    empty,
    falsum,
    forall,
    free_vars,
    fresh_var,
    is_mso,
    is_root,
    sing,
    sugar,
    verum,
    walk,
)


def test_free_vars_of_atoms_and_quantifiers():
    assert free_vars(LabelAtom("b", "X")) == {"X"}
    assert free_vars(Exists("X", Subset("X", "Y"))) == {"Y"}
    assert free_vars(Unbound("X", And(LabelAtom("b", "X"), Subset("X", "Y")))) == {"Y"}


def test_fv_order_is_sorted():
    formula = And(Subset("Z", "X"), Child(1, "Y", "X"))
    assert formula.fv_order == ("X", "Y", "Z")


def test_empty_expands_to_forall_subset():
    assert empty("X") == Not(Exists("Y", Not(Subset("X", "Y"))))


def test_sing_is_not_empty_and_not_big():
    assert sing("X") == And(Not(empty("X")), Not(big("X")))


def test_sugar_by_name():
    assert sugar("empty", "X") == empty("X")
    assert sugar("forall", "Y", Subset("Y", "X")) == forall("Y", Subset("Y", "X"))
    with pytest.raises(ValueError):
        sugar("nonsense", "X")


def test_child_any_needs_children():
    with pytest.raises(ConfigError):
        sugar("child_any", "X", "Y", 0)


def test_child_index_starts_at_one():
    with pytest.raises(ValueError):
        Child(0, "X", "Y")


def test_fresh_var_skips_taken_names():
    assert fresh_var({"X"}) == "Y"
    assert fresh_var({"Y", "Y1"}) == "Y2"
    assert fresh_var({"N"}, "N") == "N1"


def test_empty_listings():
    assert big_and([]) == verum()
    assert big_or([]) == falsum()
    assert big_and([LabelAtom("a", "X")]) == LabelAtom("a", "X")


def test_big_and_is_balanced():
    parts = [LabelAtom("a", v) for v in ("A", "B", "C", "D")]
    assert big_and(parts) == And(And(parts[0], parts[1]), And(parts[2], parts[3]))
    assert conjuncts(big_and(parts)) == parts


def test_conjuncts_look_through_double_negation():
    a, b = LabelAtom("a", "X"), LabelAtom("b", "X")
    assert conjuncts(Not(Not(And(a, b)))) == [a, b]


def test_size_and_quantifier_depth():
    formula = Exists("X", And(LabelAtom("b", "X"), Unbound("Y", Subset("Y", "X"))))
    assert formula.size == 5
    assert formula.qdepth == 2


def test_is_mso():
    assert not is_mso(Unbound("X", LabelAtom("b", "X")))
    assert is_mso(Exists("X", LabelAtom("b", "X")))
    assert not is_mso(Not(And(LabelAtom("a", "X"), Unbound("Y", Subset("Y", "X")))))


def test_is_root_without_children_is_verum():
    assert is_root("X", 0) == verum()
    assert "X" in is_root("X", 2).fv


def test_walk_visits_every_subformula():
    formula = And(LabelAtom("a", "X"), Not(Subset("X", "Y")))
    kinds = [type(node).__name__ for node in walk(formula)]
    assert kinds == ["And", "LabelAtom", "Not", "Subset"]


def test_formulas_are_hashable_values():
    assert {LabelAtom("a", "X"): 1}[LabelAtom("a", "X")] == 1
    assert LabelAtom("a", "X") != LabelAtom("a", "Y")
