"""Specification phase: build the model against hidden formalisation variants.

The student fills the Given/Find/Relate fields of a template.  Each entry
is matched (modulo an explicit, injective renaming and canonical
normalization) against the items of the example's formalisation
variants.  Variants are scored by how many of their items are matched;
the best one is active and drives the feedback:

  Correct      the entry matches a still-unmatched item of the active variant
  Superfluous  the entry parses but matches nothing unmatched
  Missing      reported per field by check_model, as item labels
  Incomplete   overall status while anything is missing
  SyntaxError  the entry does not parse in the chosen theory
  False        a Where condition not (yet) established

The interval guarding the search variable is never typed in: checking
the RMethod box reveals it as a system-provided Given item, and
unchecking removes it again.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Optional, Sequence

from .evaluate import eval_exact
from .knowledge import Example, KnowledgeBase, Variant
from .parse import ParseError, parse
from .render import render_linear, render_pretty
from .rewrite import canonical, eval_pred
from .terms import Apply, Term, Variable, rename_free

FIELDS = ("Given", "Find", "Relate")


@dataclass(frozen=True)
class Feedback:
    kind: str  # Correct | Superfluous | Missing | Incomplete | SyntaxError | False
    labels: tuple[str, ...] = ()
    position: Optional[int] = None
    detail: str = ""

    def to_json(self) -> dict:
        out: dict = {"kind": self.kind}
        if self.labels:
            out["labels"] = list(self.labels)
        if self.position is not None:
            out["position"] = self.position
        if self.detail:
            out["detail"] = self.detail
        return out


CORRECT = Feedback("Correct")
SUPERFLUOUS = Feedback("Superfluous")


@dataclass
class Item:
    field: str  # Given | Find | Relate
    source: str  # student | revealed
    text: str
    term: Optional[Term]  # None when the text did not parse
    status: Feedback


@dataclass(frozen=True)
class Atom:
    """One matchable unit of a formalisation variant."""

    field: str
    label: str  # Constants | Maximum | AdditionalValues | Relations
    term: Optional[Term] = None
    name: Optional[str] = None  # for find atoms


def variant_atoms(variant: Variant) -> list[Atom]:
    atoms = [Atom("Given", "Constants", term=g) for g in variant.given]
    atoms.append(Atom("Find", "Maximum", name=variant.find_main))
    atoms.extend(Atom("Find", "AdditionalValues", name=n) for n in variant.find_additional)
    atoms.extend(Atom("Relate", "Relations", term=r) for r in variant.relate)
    return atoms


@dataclass(frozen=True)
class MatchResult:
    score: int
    assigned: Mapping[int, list[int]]  # item index -> atom indices
    atoms: list[Atom]
    taken: list[bool]


class ModelState:
    """Mutable specification state for one session."""

    def __init__(self, kb: KnowledgeBase, example: Example):
        self.kb = kb
        self.example = example
        self.items: list[Item] = []
        self.renaming: dict[str, str] = {}
        self.active_variant = 0
        self.references = {
            "RTheory": example.theory,
            "RProblem": example.problem,
            "RMethod": example.variants[0].method,
        }
        self.rproblem_checked = True
        self.rmethod_checked = False

    # -- helpers -----------------------------------------------------------

    @property
    def variant(self) -> Variant:
        return self.example.variants[self.active_variant]

    def _parse(self, text: str) -> Term:
        theory = self.references["RTheory"]
        return parse(text, self.kb.signature(theory), self.kb.table(theory))

    def _rename(self, t: Term) -> Term:
        return rename_free(t, self.renaming) if self.renaming else t

    def _item_units(self, item: Item) -> Optional[list]:
        """What an item offers for matching: terms or identifier names."""
        if item.term is None:
            return None
        t = self._rename(item.term)
        if item.field == "Find":
            elements = t.args if isinstance(t, Apply) and t.op == "list" else (t,)
            if not all(isinstance(e, Variable) for e in elements):
                return None
            return [e.name for e in elements]
        return [canonical(t)]

    def _match_variant(self, variant: Variant) -> "MatchResult":
        """Greedy 1-1 assignment of item units to a variant's atoms."""
        atoms = variant_atoms(variant)
        taken = [False] * len(atoms)
        assigned: dict[int, list[int]] = {}
        score = 0
        for index, item in enumerate(self.items):
            units = self._item_units(item)
            if units is None:
                continue
            got: list[int] = []
            for unit in units:
                for k, atom in enumerate(atoms):
                    if taken[k] or atom.field != item.field:
                        continue
                    if isinstance(unit, str):
                        hit = atom.name == unit
                    else:
                        hit = atom.term is not None and canonical(atom.term) == unit
                    if hit:
                        taken[k] = True
                        got.append(k)
                        score += 1
                        break
            if len(got) == len(units) and units:
                assigned[index] = got
        return MatchResult(score, assigned, atoms, taken)

    def rescore(self):
        """Recompute the active variant and every item's status."""
        best_index, best = 0, None
        for i, variant in enumerate(self.example.variants):
            result = self._match_variant(variant)
            if best is None or result.score > best.score:  # ties keep the earliest variant
                best_index, best = i, result
        self.active_variant = best_index
        for index, item in enumerate(self.items):
            if item.source == "revealed":
                item.status = CORRECT
                continue
            if item.term is None:
                continue  # keep the SyntaxError
            item.status = CORRECT if index in best.assigned else SUPERFLUOUS
        self._refresh_reveal()

    def _refresh_reveal(self):
        """Revealed interval always shows the active variant's interval."""
        for item in self.items:
            if item.source == "revealed":
                item.term = self.variant.interval
                item.text = render_linear(self.variant.interval, self.kb.table(self.example.theory))

    # -- queries -----------------------------------------------------------

    def matched_atoms(self) -> list[Atom]:
        result = self._match_variant(self.variant)
        return [result.atoms[k] for ks in result.assigned.values() for k in ks]

    def given_env(self) -> dict[str, Fraction]:
        """Numeric bindings induced by matched Given items."""
        env: dict[str, Fraction] = {}
        for atom in self.matched_atoms():
            t = atom.term
            if atom.field == "Given" and isinstance(t, Apply) and t.op == "eq":
                lhs, rhs = t.args
                if isinstance(lhs, Variable):
                    value = eval_exact(rhs, {})
                    if value is not None:
                        env[lhs.name] = value
        return env

    def interval_revealed(self) -> bool:
        return any(item.source == "revealed" for item in self.items)


# ---------------------------------------------------------------------------
# Operations


def new_specification(kb: KnowledgeBase, example: Example) -> ModelState:
    return ModelState(kb, example)


def input_item(state: ModelState, field_name: str, text: str) -> Feedback:
    if field_name not in FIELDS:
        raise ValueError(f"unknown model field {field_name!r}")
    try:
        term = state._parse(text)
        status = Feedback("Incomplete")  # placeholder until rescore
    except ParseError as e:
        term = None
        status = Feedback("SyntaxError", position=e.position, detail=str(e))
    item = Item(field_name, "student", text, term, status)
    state.items.append(item)
    if term is not None:
        state.rescore()
    return item.status


def rename_identifiers(state: ModelState, source: str, target: str) -> Feedback:
    if source == target:
        return CORRECT
    taken = {v for k, v in state.renaming.items() if k != source}
    if target in taken:
        return Feedback("Superfluous", detail=f"{target!r} is already the image of another name")
    state.renaming[source] = target
    state.rescore()
    return CORRECT


def set_reference(state: ModelState, slot: str, ref_id: str) -> Feedback:
    if slot == "RTheory":
        known = ref_id in state.kb.theories
    elif slot == "RProblem":
        known = ref_id in state.kb.problems
    elif slot == "RMethod":
        known = ref_id in state.kb.methods
    else:
        raise ValueError(f"unknown reference slot {slot!r}")
    if not known:
        return Feedback("SyntaxError", detail=f"unknown {slot} id {ref_id!r}")
    state.references[slot] = ref_id
    if slot == "RTheory":
        # entries must re-parse in the new theory
        for item in state.items:
            if item.source != "student":
                continue
            try:
                item.term = state._parse(item.text)
            except ParseError as e:
                item.term = None
                item.status = Feedback("SyntaxError", position=e.position, detail=str(e))
        state.rescore()
    return CORRECT


def toggle_reference_checkbox(state: ModelState, which: str) -> None:
    if which == "RProblem":
        state.rproblem_checked = not state.rproblem_checked
        return
    if which != "RMethod":
        raise ValueError(f"unknown checkbox {which!r}")
    state.rmethod_checked = not state.rmethod_checked
    if state.rmethod_checked:
        interval = state.variant.interval
        state.items.append(
            Item(
                "Given",
                "revealed",
                render_linear(interval, state.kb.table(state.example.theory)),
                interval,
                CORRECT,
            )
        )
    else:
        state.items = [item for item in state.items if item.source != "revealed"]


def check_model(state: ModelState) -> tuple[Feedback, dict[str, list[str]], list[dict]]:
    """Overall status, missing labels per field, Where condition results."""
    result = state._match_variant(state.variant)
    missing: dict[str, list[str]] = {f: [] for f in FIELDS}
    for k, atom in enumerate(result.atoms):
        if not result.taken[k] and atom.label not in missing[atom.field]:
            missing[atom.field].append(atom.label)

    env = state.given_env()
    where_results = []
    all_true = True
    for condition in state.kb.problem(state.example.problem).where:
        holds = eval_pred(condition, env) is True  # undecided counts as not established
        all_true = all_true and holds
        where_results.append(
            {
                "condition": render_linear(condition, state.kb.master_table),
                "status": "Correct" if holds else "False",
            }
        )

    nothing_missing = not any(missing.values())
    if nothing_missing and all_true:
        overall = CORRECT
    else:
        labels = [label for f in FIELDS for label in missing[f]]
        overall = Feedback("Incomplete", labels=tuple(labels))
    return overall, missing, where_results


def instantiate_postcondition(pattern: Optional[Term], variant: Variant) -> Term:
    """The optimality statement for a variant.

    With a literal pattern term, placeholders (?main, ?relations) are
    substituted; a pattern without placeholders comes back verbatim.
    Without a pattern the standard maximum statement is built: the
    conjoined relations, and all primed candidates satisfying them stay
    below the sought maximum.
    """
    relations = _conjoin(variant.relate)
    main = variant.find_main
    if pattern is not None:
        from .rewrite import substitute

        bindings = {
            "?main": Variable(main),
            "?relations": relations,
        }
        return substitute(pattern, bindings)
    finds = [main, *variant.find_additional]
    primes = {name: name + "'" for name in finds}
    primed_relations = rename_free(relations, primes)
    bound = Apply("implies", (primed_relations, Apply("le", (Variable(main + "'"), Variable(main)))))
    quantified: Term = bound
    for name in reversed(finds):
        from .terms import Binder

        quantified = Binder("forall", name + "'", quantified)
    return Apply("and", (relations, quantified))


def _conjoin(terms: Sequence[Term]) -> Term:
    acc = terms[0]
    for t in terms[1:]:
        acc = Apply("and", (acc, t))
    return acc


def template_view(state: ModelState) -> dict:
    """Serializable picture of the model template for clients."""
    table = state.kb.table(state.references["RTheory"]) if state.references["RTheory"] in state.kb.theories else state.kb.master_table
    def show(item: Item) -> dict:
        out = {
            "field": item.field,
            "source": item.source,
            "text": item.text,
            "status": item.status.to_json(),
        }
        if item.term is not None:
            out["linear"] = render_linear(item.term, table)
            out["pretty"] = render_pretty(item.term, table)
        return out

    return {
        "example": state.example.id,
        "title": state.example.title,
        "statement": state.example.statement,
        "fields": {f: [show(i) for i in state.items if i.field == f] for f in FIELDS},
        "references": dict(state.references),
        "checkboxes": {"RProblem": state.rproblem_checked, "RMethod": state.rmethod_checked},
        "renaming": dict(state.renaming),
        "activeVariant": state.variant.name,
    }
