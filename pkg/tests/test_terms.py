"""Term structure: equality, paths, navigation, outline, identifiers."""

from fractions import Fraction

import pytest
from hypothesis import given

from mathtutor.parse import parse
from mathtutor.terms import (
    Apply,
    Binder,
    Constant,
    Cursor,
    DEFAULT_TABLE,
    FULL_SIGNATURE,
    Notation,
    NotationTable,
    Number,
    PathError,
    Variable,
    collapse,
    contains_op,
    expand,
    free_identifiers,
    iter_paths,
    navigate,
    num,
    outline,
    rename_free,
    replace_at,
    subterm,
    validate_term,
)

from conftest import ground_term_strategy, term_strategy


# --- value semantics -------------------------------------------------------

def test_numbers_are_exact_fractions():
    assert num(Fraction(1, 3)).value * 3 == Fraction(1)
    assert num(2).value == Fraction(2)


def test_float_marker_separates_exact_from_approximate():
    # 1/2 exact and 0.5 approximate are different terms: one is a value,
    # the other a rounded display of one.
    assert num(Fraction(1, 2)) != num(0.5, is_float=True)
    assert num(2) != num(2.0, is_float=True)


def test_float_marked_numbers_compare_by_float_value():
    assert num(0.5, is_float=True) == num(Fraction(1, 2), is_float=True)
    assert num(0.1, is_float=True) != num(0.2, is_float=True)


def test_structural_equality_is_recursive():
    a = Apply("plus", (Variable("x"), num(1)))
    b = Apply("plus", (Variable("x"), num(1)))
    assert a == b and hash(a) == hash(b)
    assert a != Apply("plus", (Variable("x"), num(2)))


def test_pattern_variables_are_ordinary_variables_with_marked_names():
    assert Variable("?a") != Variable("a")
    assert Variable("?a").name.startswith("?")


# --- paths -----------------------------------------------------------------

def test_iter_paths_is_preorder():
    t = parse("(x+1)/(y-2)")
    assert [p for p, _ in iter_paths(t)] == [
        (), (0,), (0, 0), (0, 1), (1,), (1, 0), (1, 1),
    ]


def test_subterm_and_replace_at():
    t = parse("(x+1)/(y-2)")
    assert subterm(t, (0, 0)) == Variable("x")
    swapped = replace_at(t, (0, 0), Variable("z"))
    assert subterm(swapped, (0, 0)) == Variable("z")
    assert subterm(swapped, (1,)) == subterm(t, (1,))  # untouched branch shared


def test_binder_body_is_path_zero():
    t = parse("forall x. x=1")
    assert isinstance(t, Binder)
    assert subterm(t, (0,)) == parse("x=1")


def test_bad_path_raises():
    with pytest.raises(PathError):
        subterm(parse("x+1"), (5,))
    with pytest.raises(PathError):
        replace_at(Variable("x"), (0,), num(1))


@given(term_strategy())
def test_replace_at_roundtrip(t):
    for path, node in iter_paths(t):
        assert replace_at(t, path, node) == t


@given(term_strategy())
def test_every_path_resolves(t):
    for path, node in iter_paths(t):
        assert subterm(t, path) == node


# --- navigation ------------------------------------------------------------

def test_navigate_moves():
    t = parse("(x+1)/(y-2)")
    c = Cursor(t, ())
    down, blocked = navigate(c, "to-first-child")
    assert down.at == (0,) and not blocked
    over, blocked = navigate(down, "to-next-sibling")
    assert over.at == (1,) and not blocked
    up, blocked = navigate(over, "to-parent")
    assert up.at == () and not blocked


def test_navigate_signals_boundaries_instead_of_wrapping():
    t = parse("(x+1)/(y-2)")
    at_root, blocked = navigate(Cursor(t, ()), "to-parent")
    assert blocked and at_root.at == ()
    at_leaf, blocked = navigate(Cursor(t, (0, 0)), "to-first-child")
    assert blocked and at_leaf.at == (0, 0)
    first, blocked = navigate(Cursor(t, (0,)), "to-prev-sibling")
    assert blocked and first.at == (0,)
    last, blocked = navigate(Cursor(t, (1,)), "to-next-sibling")
    assert blocked and last.at == (1,)


def test_navigate_rejects_unknown_move():
    with pytest.raises(ValueError):
        navigate(Cursor(parse("x"), ()), "sideways")


def test_collapsed_nodes_block_descent():
    t = parse("(x+1)/(y-2)")
    c = collapse(Cursor(t, (0,)))
    assert c.collapsed == frozenset({(0,)})
    _, blocked = navigate(c, "to-first-child")
    assert blocked
    opened = expand(c)
    _, blocked = navigate(opened, "to-first-child")
    assert not blocked


@given(ground_term_strategy())
def test_navigation_never_leaves_the_term(t):
    c = Cursor(t, ())
    for move in ("to-first-child", "to-next-sibling", "to-first-child",
                 "to-parent", "to-prev-sibling", "to-parent"):
        c, _ = navigate(c, move)
        assert subterm(t, c.at) is not None


# --- outline ---------------------------------------------------------------

def test_outline_shows_children_one_level_down():
    o = outline(parse("(x+1)/(y-2)"), 1)
    assert o.text == "(x+1)/(y-2)"
    assert o.child_count == 2
    assert [(n.path, n.text) for n in o.children] == [((0,), "x+1"), ((1,), "y-2")]


def test_outline_depth_zero_is_summary_only():
    o = outline(parse("(x+1)/(y-2)"), 0)
    assert o.children == ()
    assert o.child_count == 2


def test_outline_truncates_long_lines():
    wide = parse("+".join(f"x{i}" for i in range(40)))
    o = outline(wide, 0, width=16)
    assert len(o.text) <= 16
    assert o.text.endswith("...")


# --- identifiers -----------------------------------------------------------

def test_free_identifiers_skip_bound_names():
    t = parse("forall x. x+y=z")
    assert free_identifiers(t) == frozenset({"y", "z"})


def test_contains_op_sees_operators_not_binders():
    assert contains_op(parse("sqrt(x)+1"), "sqrt")
    assert not contains_op(parse("d/dx(x^2)"), "derivative")  # binder, not operator


def test_rename_free_respects_binders():
    t = parse("x + (forall x. x=y)")
    renamed = rename_free(t, {"x": "u", "y": "v"})
    assert renamed == parse("u + (forall x. x=v)")


def test_rename_free_is_simultaneous():
    t = parse("x+y")
    assert rename_free(t, {"x": "y", "y": "x"}) == parse("y+x")


# --- signature and notation ------------------------------------------------

def test_validate_term_reports_arity_errors():
    bad = Apply("plus", (Variable("x"),))
    problems = validate_term(bad, FULL_SIGNATURE)
    assert problems and "plus" in problems[0]


def test_validate_term_reports_unknown_operator():
    assert validate_term(Apply("frobnicate", (num(1),)), FULL_SIGNATURE)


def test_validate_term_accepts_well_formed():
    assert validate_term(parse("sqrt(x^2+1)=y"), FULL_SIGNATURE) == []


def test_notation_table_rejects_duplicate_symbols():
    with pytest.raises(ValueError):
        NotationTable({
            "plus": Notation("+", 40, "left", "infix"),
            "oplus": Notation("+", 40, "left", "infix"),
        })


def test_notation_table_rejects_non_ascii():
    with pytest.raises(ValueError):
        NotationTable({"times": Notation("×", 50, "left", "infix")})


def test_default_table_has_entries_for_core_operators():
    for op in ("plus", "minus", "times", "div", "pow", "eq", "and", "implies"):
        assert DEFAULT_TABLE.for_op(op) is not None


def test_constant_and_variable_are_distinct():
    assert Constant("pi") != Variable("pi")
