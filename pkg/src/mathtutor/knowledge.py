"""The knowledge corpus: theories, rules, problem classes, methods, examples.

Data lives in JSON/TSV files under ``corpus/`` next to this module.
Theories form an import DAG (an import may be reached along several
routes; it is loaded once).  A theory scopes what can even be said: its
merged signature and notation table drive the parser, so a term using an
operator the theory lacks is a syntax error, not a semantic one.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Optional, Sequence, Union

from .parse import ParseError, parse
from .rewrite import RewriteRule, RuleSet, eval_pred, substitute
from .terms import (
    DEFAULT_TABLE,
    FULL_SIGNATURE,
    NotationTable,
    Signature,
    Term,
    TermError,
    Variable,
    free_identifiers,
    load_notation_table,
)

FORMAT_VERSION = 1

CORPUS_DIR = Path(__file__).parent / "corpus"


class KnowledgeError(Exception):
    """Corpus data is malformed or a lookup failed."""


@dataclass(frozen=True)
class Definition:
    op: str
    levels: Mapping[str, str]  # school / academic / ...


@dataclass(frozen=True)
class Theory:
    name: str
    imports: tuple[str, ...]
    operators: Mapping[str, int]
    constants: frozenset[str]
    binders: frozenset[str]
    rulesets: tuple[RuleSet, ...]
    definitions: tuple[Definition, ...]


@dataclass(frozen=True)
class ProblemNode:
    path: str  # slash-separated position in the classification tree
    text: str
    where: tuple[Term, ...]
    methods: tuple[str, ...]

    @property
    def name(self) -> str:
        return self.path.rsplit("/", 1)[-1]

    @property
    def parent(self) -> Optional[str]:
        return self.path.rsplit("/", 1)[0] if "/" in self.path else None


@dataclass(frozen=True)
class Step:
    tactic: str
    params: Mapping[str, object]


@dataclass(frozen=True)
class Method:
    name: str
    problem: str
    text: str
    program: tuple[Step, ...]


@dataclass(frozen=True)
class Variant:
    name: str
    given: tuple[Term, ...]
    find_main: str
    find_additional: tuple[str, ...]
    relate: tuple[Term, ...]
    interval: Term
    interval_variable: str
    method: str

    def declared(self) -> frozenset[str]:
        names = {self.find_main, *self.find_additional}
        for g in self.given:
            names |= free_identifiers(_given_lhs(g))
        return frozenset(names)


@dataclass(frozen=True)
class Example:
    id: str
    title: str
    statement: str
    theory: str
    problem: str
    precision: int
    variants: tuple[Variant, ...]

    def variant(self, name: str) -> Variant:
        for v in self.variants:
            if v.name == name:
                return v
        raise KnowledgeError(f"example {self.id} has no variant {name!r}")


def _given_lhs(g: Term) -> Term:
    from .terms import Apply

    if isinstance(g, Apply) and g.op == "eq":
        return g.args[0]
    return g


class KnowledgeBase:
    """Loaded corpus with import-closure signature/notation/rule lookups."""

    def __init__(
        self,
        theories: Mapping[str, Theory],
        problems: Mapping[str, ProblemNode],
        methods: Mapping[str, Method],
        examples: Mapping[str, Example],
        master_table: NotationTable,
    ):
        self.theories = dict(theories)
        self.problems = dict(problems)
        self.methods = dict(methods)
        self.examples = dict(examples)
        self.master_table = master_table
        self._signatures: dict[str, Signature] = {}
        self._tables: dict[str, NotationTable] = {}

    # -- theories ----------------------------------------------------------

    def theory(self, name: str) -> Theory:
        try:
            return self.theories[name]
        except KeyError:
            raise KnowledgeError(f"unknown theory {name!r}") from None

    def closure(self, name: str) -> list[str]:
        """Import closure, dependencies first, each theory once."""
        out: list[str] = []
        seen: set[str] = set()

        def visit(n: str, trail: tuple[str, ...]):
            if n in trail:
                raise KnowledgeError(f"theory import cycle: {' -> '.join(trail + (n,))}")
            if n in seen:
                return
            for imp in self.theory(n).imports:
                visit(imp, trail + (n,))
            seen.add(n)
            out.append(n)

        visit(name, ())
        return out

    def signature(self, name: str) -> Signature:
        if name not in self._signatures:
            sig = Signature()
            for n in self.closure(name):
                t = self.theory(n)
                sig = sig.merged(Signature(dict(t.operators), t.constants, t.binders))
            self._signatures[name] = sig
        return self._signatures[name]

    def table(self, name: str) -> NotationTable:
        if name not in self._tables:
            entries = {}
            for op in self.signature(name).operators:
                if op in ("list", "open_interval"):
                    continue  # structural syntax, not symbol-driven
                if op not in self.master_table.entries:
                    raise KnowledgeError(f"no notation for operator {op!r}")
                entries[op] = self.master_table.entries[op]
            self._tables[name] = NotationTable(entries)
        return self._tables[name]

    def rulesets(self, name: str) -> tuple[RuleSet, ...]:
        out: list[RuleSet] = []
        for n in self.closure(name):
            out.extend(self.theory(n).rulesets)
        return tuple(out)

    def ruleset(self, theory: str, name: str) -> RuleSet:
        for rs in self.rulesets(theory):
            if rs.name == name:
                return rs
        raise KnowledgeError(f"theory {theory!r} has no ruleset {name!r}")

    def definition(self, theory: str, op: str) -> Definition:
        for n in reversed(self.closure(theory)):  # nearest theory wins
            for d in self.theory(n).definitions:
                if d.op == op:
                    return d
        raise KnowledgeError(f"no definition of {op!r} reachable from theory {theory!r}")

    def theory_order(self) -> list[str]:
        """All theories, each after everything it imports."""
        out: list[str] = []
        seen: set[str] = set()
        for name in sorted(self.theories):
            for n in self.closure(name):
                if n not in seen:
                    seen.add(n)
                    out.append(n)
        return out

    def lookup_semantics(self, op: str, level: str) -> list[str]:
        """Explanation entries for an operator at one detail level.

        Unknown symbols give an empty list, not an error; the UI shows
        "no entry"."""
        out = []
        for name in self.theory_order():
            for d in self.theory(name).definitions:
                if d.op == op and level in d.levels:
                    out.append(d.levels[level])
        return out

    # -- problems ----------------------------------------------------------

    def problem(self, path: str) -> ProblemNode:
        try:
            return self.problems[path]
        except KeyError:
            raise KnowledgeError(f"unknown problem {path!r}") from None

    def children(self, path: Optional[str]) -> list[ProblemNode]:
        return [p for p in self.problems.values() if p.parent == path]

    def refine(
        self, path: Optional[str], subject: Optional[Term] = None, env: Optional[Mapping] = None
    ) -> list[tuple[ProblemNode, bool]]:
        """Children of path with their classification verdicts.

        A child matches when every one of its conditions evaluates to
        True; an undecided condition counts against the match.  The
        subject term, if any, replaces ``?subject`` in conditions.
        """
        bindings = {"?subject": subject} if subject is not None else {}
        out = []
        for child in self.children(path):
            ok = all(
                eval_pred(substitute(c, bindings), env or {}) is True for c in child.where
            )
            out.append((child, ok))
        return out

    def refine_problem(
        self,
        start: str,
        subject: Optional[Term] = None,
        env: Optional[Mapping] = None,
    ) -> list[tuple[str, list[tuple[Term, Optional[bool]]]]]:
        """Preorder walk strictly below start: each node's conditions
        with their verdicts (True, False, or None for undecided)."""
        self.problem(start)
        bindings = {"?subject": subject} if subject is not None else {}
        out: list[tuple[str, list[tuple[Term, Optional[bool]]]]] = []

        def visit(node: ProblemNode):
            instantiated = [substitute(c, bindings) for c in node.where]
            results = [(c, eval_pred(c, env or {})) for c in instantiated]
            out.append((node.path, results))
            for child in self.children(node.path):
                visit(child)

        for child in self.children(start):
            visit(child)
        return out

    def outline_store(self, kind: str, depth: int) -> list[dict]:
        """Summary tree over theories, problems, or methods."""
        if kind == "theories":
            names = self.theory_order()
            roots = [n for n in names if not self.theory(n).imports]

            def children_of(n: str) -> list[str]:
                return [m for m in names if n in self.theory(m).imports]

            def build(n: str, d: int) -> dict:
                kids = children_of(n)
                node = {"id": n, "text": n, "childCount": len(kids)}
                if d > 0:
                    node["children"] = [build(k, d - 1) for k in kids]
                return node

            return [build(r, depth) for r in roots]

        if kind == "problems":

            def build_p(node: ProblemNode, d: int) -> dict:
                kids = self.children(node.path)
                entry = {"id": node.path, "text": node.text, "childCount": len(kids)}
                if d > 0:
                    entry["children"] = [build_p(k, d - 1) for k in kids]
                return entry

            return [build_p(r, depth) for r in self.children(None)]

        if kind == "methods":
            return [
                {"id": m.name, "text": m.text, "childCount": 0}
                for m in self.methods.values()
            ]
        raise KnowledgeError(f"unknown outline kind {kind!r}")

    def methods_for(self, path: str) -> list[Method]:
        return [self.methods[m] for m in self.problem(path).methods]

    def method(self, name: str) -> Method:
        try:
            return self.methods[name]
        except KeyError:
            raise KnowledgeError(f"unknown method {name!r}") from None

    # -- examples ----------------------------------------------------------

    def example(self, example_id: str) -> Example:
        try:
            return self.examples[example_id]
        except KeyError:
            raise KnowledgeError(f"unknown example {example_id!r}") from None


# ---------------------------------------------------------------------------
# Loading


def _check_version(data: Mapping, path: Path):
    if data.get("format_version") != FORMAT_VERSION:
        raise KnowledgeError(f"{path}: expected format_version {FORMAT_VERSION}")


def load_corpus(
    root: Union[str, Path, None] = None, errors: Optional[list[str]] = None
) -> KnowledgeBase:
    """Read every corpus file under root (default: the packaged data).

    With an `errors` list, diagnostics are collected per file and loading
    continues past recoverable problems; without one the first problem
    raises.  An empty directory is a valid empty store.
    """
    base = Path(root) if root is not None else CORPUS_DIR

    def fail(msg: str):
        if errors is None:
            raise KnowledgeError(msg)
        errors.append(msg)

    notation_path = base / "notation" / "default.tsv"
    master = DEFAULT_TABLE
    if notation_path.exists():
        try:
            master = load_notation_table(str(notation_path))
        except (TermError, OSError, ValueError) as e:
            fail(f"{notation_path}: {e}")

    def read_json(path: Path) -> Optional[dict]:
        try:
            data = json.loads(path.read_text(encoding="utf-8"))
            _check_version(data, path)
            return data
        except (OSError, ValueError, KnowledgeError) as e:
            fail(f"{path}: {e}")
            return None

    raw_theories: dict[str, dict] = {}
    for path in sorted((base / "theories").glob("*.json")):
        data = read_json(path)
        if data is not None:
            raw_theories[str(data.get("name", path.stem))] = data

    kb = KnowledgeBase({}, {}, {}, {}, master)

    def build_theory(name: str, trail: tuple[str, ...]):
        if name in kb.theories:
            return
        if name in trail:
            raise KnowledgeError(f"theory import cycle: {' -> '.join(trail + (name,))}")
        if name not in raw_theories:
            raise KnowledgeError(f"imported theory {name!r} has no corpus file")
        data = raw_theories[name]
        for imp in data.get("imports", ()):
            build_theory(imp, trail + (name,))
        kb.theories[name] = _theory_from_json(data, kb)

    for name in raw_theories:
        try:
            build_theory(name, ())
        except (KnowledgeError, ParseError, TermError, KeyError, TypeError) as e:
            fail(f"theory {name!r}: {e}")

    for path in sorted((base / "problems").glob("*.json")):
        data = read_json(path)
        for entry in (data or {}).get("problems", ()):
            try:
                node = ProblemNode(
                    path=entry["path"],
                    text=entry.get("text", ""),
                    where=tuple(
                        parse(c, FULL_SIGNATURE, kb.master_table)
                        for c in entry.get("where", ())
                    ),
                    methods=tuple(entry.get("methods", ())),
                )
                if node.path in kb.problems:
                    raise KnowledgeError(f"duplicate problem path {node.path!r}")
                kb.problems[node.path] = node
            except (KnowledgeError, ParseError, KeyError, TypeError) as e:
                fail(f"{path}: {e}")

    for path in sorted((base / "methods").glob("*.json")):
        data = read_json(path)
        for entry in (data or {}).get("methods", ()):
            try:
                program = tuple(
                    Step(step["tactic"], {k: v for k, v in step.items() if k != "tactic"})
                    for step in entry["program"]
                )
                method = Method(entry["name"], entry["problem"], entry.get("text", ""), program)
                if method.name in kb.methods:
                    raise KnowledgeError(f"duplicate method name {method.name!r}")
                kb.methods[method.name] = method
            except (KnowledgeError, KeyError, TypeError) as e:
                fail(f"{path}: {e}")

    for path in sorted((base / "examples").glob("*.json")):
        data = read_json(path)
        for entry in (data or {}).get("examples", ()):
            try:
                example = _example_from_json(entry, kb)
                if example.id in kb.examples:
                    raise KnowledgeError(f"duplicate example id {example.id!r}")
                kb.examples[example.id] = example
            except (KnowledgeError, ParseError, TermError, KeyError, TypeError) as e:
                fail(f"{path}: {e}")

    for problem in _validate(kb):
        fail(problem)
    return kb


def _theory_from_json(data: Mapping, kb: KnowledgeBase) -> Theory:
    name = data["name"]
    theory = Theory(
        name=name,
        imports=tuple(data.get("imports", ())),
        operators=dict(data.get("operators", {})),
        constants=frozenset(data.get("constants", ())),
        binders=frozenset(data.get("binders", ())),
        rulesets=(),
        definitions=tuple(
            Definition(d["op"], dict(d["levels"])) for d in data.get("definitions", ())
        ),
    )
    # rules parse against the theory's own merged signature
    kb.theories[name] = theory
    sig = kb.signature(name)
    table = kb.table(name)
    del kb.theories[name]
    kb._signatures.pop(name, None)
    kb._tables.pop(name, None)

    rulesets = []
    for rs in data.get("rulesets", ()):
        rules = tuple(
            RewriteRule(
                name=r["name"],
                lhs=parse(r["lhs"], sig, table),
                rhs=parse(r["rhs"], sig, table),
                when=tuple(parse(c, FULL_SIGNATURE, kb.master_table) for c in r.get("when", ())),
                text=r.get("text", ""),
            )
            for r in rs["rules"]
        )
        rulesets.append(RuleSet(rs["name"], rules))
    return Theory(
        name=theory.name,
        imports=theory.imports,
        operators=theory.operators,
        constants=theory.constants,
        binders=theory.binders,
        rulesets=tuple(rulesets),
        definitions=theory.definitions,
    )


def _example_from_json(entry: Mapping, kb: KnowledgeBase) -> Example:
    theory = entry["theory"]
    sig = kb.signature(theory)
    table = kb.table(theory)
    variants = []
    for v in entry["variants"]:
        variants.append(
            Variant(
                name=v["name"],
                given=tuple(parse(g, sig, table) for g in v["given"]),
                find_main=v["find"]["main"],
                find_additional=tuple(v["find"].get("additional", ())),
                relate=tuple(parse(r, sig, table) for r in v["relate"]),
                interval=parse(v["interval"], sig, table),
                interval_variable=v["interval_variable"],
                method=v["method"],
            )
        )
    return Example(
        id=entry["id"],
        title=entry.get("title", ""),
        statement=entry.get("statement", ""),
        theory=theory,
        problem=entry["problem"],
        precision=int(entry.get("precision", 2)),
        variants=tuple(variants),
    )


def _validate(kb: KnowledgeBase) -> list[str]:
    problems: list[str] = []
    for node in kb.problems.values():
        if node.parent is not None and node.parent not in kb.problems:
            problems.append(f"problem {node.path!r} has no parent node")
        for m in node.methods:
            if m not in kb.methods:
                problems.append(f"problem {node.path!r} references unknown method {m!r}")
    for method in kb.methods.values():
        if method.problem not in kb.problems:
            problems.append(
                f"method {method.name!r} attached to unknown problem {method.problem!r}"
            )
    for example in kb.examples.values():
        if example.theory not in kb.theories:
            problems.append(f"example {example.id!r} uses unknown theory")
        if example.problem not in kb.problems:
            problems.append(f"example {example.id!r} uses unknown problem")
        for v in example.variants:
            if v.method not in kb.methods:
                problems.append(f"variant {v.name!r} uses unknown method {v.method!r}")
            declared = v.declared()
            if v.interval_variable not in declared:
                problems.append(
                    f"variant {v.name!r}: interval variable {v.interval_variable!r} is not declared"
                )
            for r in v.relate:
                extra = free_identifiers(r) - declared
                if extra:
                    problems.append(
                        f"variant {v.name!r}: relation mentions undeclared {sorted(extra)}"
                    )
    return problems


_DEFAULT: Optional[KnowledgeBase] = None


def default_corpus() -> KnowledgeBase:
    """The packaged corpus, loaded once per process."""
    global _DEFAULT
    if _DEFAULT is None:
        _DEFAULT = load_corpus()
    return _DEFAULT
