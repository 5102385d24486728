"""Knowledge store: loading, import closure, problem refinement, outlines."""

import json
from fractions import Fraction

import pytest

from mathtutor.knowledge import (
    KnowledgeError,
    default_corpus,
    load_corpus,
)
from mathtutor.parse import parse
from mathtutor.render import render_linear
from mathtutor.rewrite import eval_pred
from mathtutor.terms import DEFAULT_TABLE


@pytest.fixture(scope="module")
def kb():
    return default_corpus()


# --- the shipped corpus --------------------------------------------------------

def test_shipped_corpus_inventory(kb):
    assert set(kb.theories) == {"Arith", "Poly", "Root", "Trig", "Diff_App"}
    assert len(kb.problems) == 7
    assert set(kb.methods) == {"by_univariate_calculus", "by_substitution"}
    assert set(kb.examples) == {"No123a"}


def test_theory_order_is_topological(kb):
    order = kb.theory_order()
    assert set(order) == set(kb.theories)
    for name in order:
        for imported in kb.theory(name).imports:
            assert order.index(imported) < order.index(name)


def test_closure_includes_transitive_imports(kb):
    assert kb.closure("Diff_App")[-1] == "Diff_App"
    assert "Arith" in kb.closure("Diff_App")
    assert kb.closure("Arith") == ["Arith"]


def test_signature_merges_the_closure(kb):
    sig = kb.signature("Diff_App")
    assert sig.operators["plus"] == 2      # from Arith
    assert sig.operators["sqrt"] == 1      # from Root
    assert sig.operators["sin"] == 1       # from Trig
    assert "derivative" in sig.binders
    assert "pi" in sig.constants


def test_rulesets_follow_import_order(kb):
    names = [rs.name for rs in kb.rulesets("Diff_App")]
    assert names.index("eq_rearrange") < names.index("diff")


def test_definition_lookup(kb):
    d = kb.definition("Root", "sqrt")
    assert "nonnegative" in d.levels["school"]


def test_lookup_semantics_walks_all_theories(kb):
    school = kb.lookup_semantics("sqrt", "school")
    assert len(school) == 1 and "square" in school[0]
    assert kb.lookup_semantics("sqrt", "academic")
    assert kb.lookup_semantics("frobnicate", "school") == []


def test_unknown_lookups_raise(kb):
    with pytest.raises(KnowledgeError):
        kb.theory("Nope")
    with pytest.raises(KnowledgeError):
        kb.problem("no/such/problem")
    with pytest.raises(KnowledgeError):
        kb.method("by_magic")
    with pytest.raises(KnowledgeError):
        kb.example("No999")


# --- problem tree ----------------------------------------------------------------

def test_problem_tree_structure(kb):
    roots = kb.children(None)
    assert {n.path for n in roots} == {"univariate_calculus", "make", "equation"}
    below = kb.children("equation")
    assert {n.path for n in below} == {"equation/polynomial", "equation/square_root"}
    node = kb.problem("univariate_calculus/Optimisation")
    assert node.name == "Optimisation"
    assert node.parent == "univariate_calculus"


def test_methods_for_problem(kb):
    methods = kb.methods_for("univariate_calculus/Optimisation")
    assert [m.name for m in methods] == ["by_univariate_calculus"]
    assert kb.methods_for("equation") == []


def test_refine_problem_on_a_root_equation(kb):
    subject = parse("sqrt(x+1)=3")
    results = kb.refine_problem("equation", subject, {})
    verdicts = {path: conditions for path, conditions in results}
    assert set(verdicts) == {"equation/polynomial", "equation/square_root"}
    poly = verdicts["equation/polynomial"]
    assert [status for _, status in poly] == [False]
    root = verdicts["equation/square_root"]
    assert [status for _, status in root] == [True]


def test_refine_problem_substitutes_the_subject(kb):
    results = kb.refine_problem("equation", parse("x^2=2"), {})
    for path, conditions in results:
        for condition, _ in conditions:
            assert "?subject" not in render_linear(condition)


def test_refine_problem_agrees_with_direct_evaluation(kb):
    # brute force: instantiate every precondition and evaluate it directly
    subjects = [
        "x^2=2", "sqrt(x)=2", "x+1=3", "sqrt(x^2+1)=x", "x^3-x=0",
        "1/2*x=4", "x*x=9", "sqrt(x+1)+x=5",
    ]
    for source in subjects:
        subject = parse(source)
        for path, conditions in kb.refine_problem("equation", subject, {}):
            node = kb.problem(path)
            assert len(conditions) == len(node.where)
            for (instantiated, status), raw in zip(conditions, node.where):
                from mathtutor.rewrite import substitute
                expected = eval_pred(substitute(raw, {"?subject": subject}), {})
                assert status == expected
                assert instantiated == substitute(raw, {"?subject": subject})


def test_refine_problem_reports_unknown_for_free_conditions(kb):
    # 0<r cannot be decided without a value for r
    results = kb.refine_problem("univariate_calculus", parse("x=1"), {})
    verdicts = dict(results)
    statuses = [s for _, s in verdicts["univariate_calculus/Optimisation"]]
    assert statuses == [None]
    decided = kb.refine_problem("univariate_calculus", parse("x=1"), {"r": Fraction(7)})
    assert [s for _, s in dict(decided)["univariate_calculus/Optimisation"]] == [True]


# --- outlines ---------------------------------------------------------------------

def test_outline_store_theories_nests_by_import(kb):
    rows = kb.outline_store("theories", 3)
    by_id = {row["id"]: row for row in rows}
    assert set(by_id) == {"Arith", "Poly"}  # roots: theories importing nothing
    arith = by_id["Arith"]
    assert arith["childCount"] == 2
    importers = {c["id"]: c for c in arith["children"]}
    assert set(importers) == {"Root", "Trig"}
    assert [c["id"] for c in importers["Root"]["children"]] == ["Diff_App"]


def test_outline_store_problems(kb):
    rows = kb.outline_store("problems", 2)
    by_id = {row["id"]: row for row in rows}
    assert by_id["equation"]["childCount"] == 2
    texts = [c["text"] for c in by_id["equation"]["children"]]
    assert any("square root" in t for t in texts)


def test_outline_store_methods(kb):
    rows = kb.outline_store("methods", 1)
    ids = {row["id"] for row in rows}
    assert {"by_univariate_calculus", "by_substitution"} <= ids


def test_outline_store_rejects_unknown_kind(kb):
    with pytest.raises(KnowledgeError):
        kb.outline_store("recipes", 1)


# --- loading and validation ---------------------------------------------------------

def write_corpus(root, theories=(), problems=None, methods=None, examples=(),
                 notation=True):
    (root / "theories").mkdir(parents=True)
    (root / "problems").mkdir()
    (root / "methods").mkdir()
    (root / "examples").mkdir()
    if notation:
        (root / "notation").mkdir()
        (root / "notation" / "default.tsv").write_text(
            "plus\t+\t40\tleft\tinfix\n"
            "eq\t=\t10\tleft\tinfix\n"
        )
    for theory in theories:
        name = theory["name"].lower()
        (root / "theories" / f"{name}.json").write_text(json.dumps(theory))
    if problems is not None:
        (root / "problems" / "problems.json").write_text(json.dumps(problems))
    if methods is not None:
        (root / "methods" / "methods.json").write_text(json.dumps(methods))
    for example in examples:
        (root / "examples" / f"{example['id'].lower()}.json").write_text(
            json.dumps(example)
        )


def minimal_theory(name, imports=()):
    return {
        "format_version": 1,
        "name": name,
        "imports": list(imports),
        "operators": {},
        "constants": [],
        "binders": [],
        "rulesets": [],
        "definitions": [],
    }


def test_empty_directory_is_a_valid_empty_store(tmp_path):
    write_corpus(tmp_path, notation=False)
    kb = load_corpus(tmp_path)
    assert kb.theories == {} and kb.problems == {}
    assert kb.master_table is DEFAULT_TABLE


def test_loading_aggregates_errors_instead_of_stopping(tmp_path):
    write_corpus(tmp_path, theories=[minimal_theory("Good")])
    (tmp_path / "theories" / "broken.json").write_text("{not json")
    (tmp_path / "theories" / "badterm.json").write_text(json.dumps({
        **minimal_theory("BadTerm"),
        "rulesets": [{"name": "r", "rules": [
            {"name": "r1", "lhs": "?a+", "rhs": "?a", "when": []},
        ]}],
    }))
    errors = []
    kb = load_corpus(tmp_path, errors=errors)
    assert "Good" in kb.theories
    assert len(errors) == 2
    assert any("broken.json" in e for e in errors)
    assert any("BadTerm" in e for e in errors)


def test_loading_without_errors_list_raises_on_first_problem(tmp_path):
    write_corpus(tmp_path)
    (tmp_path / "theories" / "broken.json").write_text("{not json")
    with pytest.raises(KnowledgeError):
        load_corpus(tmp_path)


def test_import_cycles_are_reported_for_both_members(tmp_path):
    write_corpus(tmp_path, theories=[
        minimal_theory("A", imports=["B"]),
        minimal_theory("B", imports=["A"]),
    ])
    errors = []
    load_corpus(tmp_path, errors=errors)
    text = "\n".join(errors)
    assert "cycle" in text
    assert "A" in text and "B" in text


def test_unknown_import_is_an_error(tmp_path):
    write_corpus(tmp_path, theories=[minimal_theory("A", imports=["Ghost"])])
    errors = []
    load_corpus(tmp_path, errors=errors)
    assert any("Ghost" in e for e in errors)


def test_format_version_mismatch_is_an_error(tmp_path):
    theory = minimal_theory("Future")
    theory["format_version"] = 99
    write_corpus(tmp_path, theories=[theory])
    errors = []
    load_corpus(tmp_path, errors=errors)
    assert any("format_version" in e for e in errors)


def test_method_must_point_at_a_known_problem(tmp_path):
    write_corpus(
        tmp_path,
        problems={"format_version": 1, "problems": [
            {"path": "p", "text": "", "where": [], "methods": ["m"]},
        ]},
        methods={"format_version": 1, "methods": [
            {"name": "m", "problem": "otherproblem", "text": "", "program": []},
        ]},
    )
    errors = []
    load_corpus(tmp_path, errors=errors)
    assert any("otherproblem" in e for e in errors)


def test_missing_notation_falls_back_to_the_default_table(tmp_path):
    write_corpus(tmp_path, theories=[minimal_theory("A")], notation=False)
    kb = load_corpus(tmp_path)
    assert kb.master_table is DEFAULT_TABLE


def test_shipped_theory_table_covers_its_signature(kb):
    # list and open_interval use the fixed bracket syntax, not table entries
    table = kb.table("Diff_App")
    for op in kb.signature("Diff_App").operators:
        if op not in ("list", "open_interval"):
            assert table.for_op(op).symbol
