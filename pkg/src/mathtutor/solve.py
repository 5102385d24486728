"""Solution phase: a method program interpreted step by step.

The interpreter always knows the next step (tactic plus resulting
formula) and commits it on request, growing a calculation tree whose
nodes carry justifications.  Student input is checked against the
proposal first, then against a bounded breadth-first search over the
theory's rulesets; accepted off-script steps are recorded as detour
nodes without moving the program.

A Differentiate step opens a micro-phase that unfolds the derivative one
rule application at a time (each displayed and justified) until no
derivative binder remains; the program continues afterwards.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Union

from . import algebra
from .evaluate import EvalError, eval_float, make_float
from .knowledge import KnowledgeBase, Method, Step, Variant
from .render import render_linear
from .rewrite import Interval, canonical, in_interval, match, rewrite_once
from .specify import ModelState, check_model
from .terms import Apply, Binder, Path, Term, TermError, Variable, iter_paths, subterm


class SolveError(Exception):
    def __init__(self, code: str, message: str, data: Optional[dict] = None):
        super().__init__(message)
        self.code = code
        self.data = data or {}


# ---------------------------------------------------------------------------
# Tactics


@dataclass(frozen=True)
class Rewrite:
    rule: str
    path: Path


@dataclass(frozen=True)
class Substitute:
    equation: Term


@dataclass(frozen=True)
class SolveUnivariate:
    equation: Term
    unknown: str


@dataclass(frozen=True)
class Differentiate:
    function: Term
    variable: str


@dataclass(frozen=True)
class FilterByInterval:
    solutions: tuple[Term, ...]
    interval: Term


@dataclass(frozen=True)
class TakeEquation:
    index: int


@dataclass(frozen=True)
class SwitchToFloat:
    precision: int


@dataclass(frozen=True)
class SubProblem:
    problem: str


Tactic = Union[
    Rewrite, Substitute, SolveUnivariate, Differentiate, FilterByInterval,
    TakeEquation, SwitchToFloat, SubProblem,
]


def tactic_from_json(data: dict, parse_term: Callable[[str], Term]) -> Tactic:
    kind = data.get("tactic")
    try:
        if kind == "Rewrite":
            return Rewrite(str(data["rule"]), tuple(int(i) for i in data["path"]))
        if kind == "Substitute":
            return Substitute(parse_term(data["equation"]))
        if kind == "SolveUnivariate":
            return SolveUnivariate(parse_term(data["equation"]), str(data["for"]))
        if kind == "Differentiate":
            return Differentiate(parse_term(data["function"]), str(data["variable"]))
        if kind == "FilterByInterval":
            return FilterByInterval(
                tuple(parse_term(s) for s in data["solutions"]),
                parse_term(data["interval"]),
            )
        if kind == "TakeEquation":
            return TakeEquation(int(data["index"]))
        if kind == "SwitchToFloat":
            return SwitchToFloat(int(data["precision"]))
        if kind == "SubProblem":
            return SubProblem(str(data["problem"]))
    except (KeyError, TypeError, ValueError) as e:
        raise SolveError("bad-tactic", f"malformed {kind} tactic: {e}") from None
    raise SolveError("bad-tactic", f"unknown tactic kind {kind!r}")


def tactic_to_json(t: Tactic, lin: Callable[[Term], str]) -> dict:
    match t:
        case Rewrite(rule, path):
            return {"tactic": "Rewrite", "rule": rule, "path": list(path)}
        case Substitute(equation):
            return {"tactic": "Substitute", "equation": lin(equation)}
        case SolveUnivariate(equation, unknown):
            return {"tactic": "SolveUnivariate", "equation": lin(equation), "for": unknown}
        case Differentiate(function, variable):
            return {"tactic": "Differentiate", "function": lin(function), "variable": variable}
        case FilterByInterval(solutions, interval):
            return {
                "tactic": "FilterByInterval",
                "solutions": [lin(s) for s in solutions],
                "interval": lin(interval),
            }
        case TakeEquation(index):
            return {"tactic": "TakeEquation", "index": index}
        case SwitchToFloat(precision):
            return {"tactic": "SwitchToFloat", "precision": precision}
        case SubProblem(problem):
            return {"tactic": "SubProblem", "problem": problem}
    raise TypeError(f"not a tactic: {t!r}")


# ---------------------------------------------------------------------------
# Calculation tree


@dataclass
class CalcNode:
    kind: str  # specification | solution | formula | subcalc | result
    term: Optional[Term] = None
    justification: Optional[dict] = None
    children: list["CalcNode"] = field(default_factory=list)
    collapsed: bool = False
    detour: bool = False
    label: str = ""
    equations: tuple[Term, ...] = ()

    def to_json(self, lin: Callable[[Term], str]) -> dict:
        out: dict = {"kind": self.kind}
        if self.label:
            out["label"] = self.label
        if self.term is not None:
            out["formula"] = lin(self.term)
        if self.justification is not None:
            out["justification"] = self.justification
        if self.kind == "result":
            out["equations"] = [lin(e) for e in self.equations]
        if self.kind in ("specification", "solution", "subcalc"):
            out["children"] = [c.to_json(lin) for c in self.children]
        out["collapsed"] = self.collapsed
        if self.detour:
            out["detour"] = True
        return out


@dataclass
class Frame:
    method: Method
    pc: int = 0
    owns_subcalc: bool = False


@dataclass(frozen=True)
class Proposal:
    finished: bool
    tactic: Optional[Tactic] = None
    preview: Optional[Term] = None
    result: tuple[Term, ...] = ()


# ---------------------------------------------------------------------------
# Solve state


class SolveState:
    def __init__(self, kb: KnowledgeBase, spec: ModelState, k: int = 2):
        self.kb = kb
        self.example = spec.example
        self.variant: Variant = spec.variant
        self.k = k
        self.given = spec.given_env()
        self.relations = [canonical(r) for r in self.variant.relate]
        self.values = list(self.variant.find_additional)
        self.main = self.variant.find_main
        self.interval_term = self.variant.interval
        self.interval = Interval.from_term(self.interval_term, self.given)
        self.interval_variable = self.variant.interval_variable
        self.lets: dict[str, object] = {}
        self.current: Optional[Term] = None
        self.function: Optional[Term] = None  # the objective equation before differentiation
        self.precision: Optional[int] = None
        self.mode = "program"  # program | diff | done | finished
        method = kb.method(spec.references["RMethod"])
        self.frames: list[Frame] = [Frame(method)]
        self.table = kb.table(self.example.theory)
        self.rulesets = kb.rulesets(self.example.theory)
        self.diff_rulesets = tuple(
            rs for rs in self.rulesets
            if rs.rules and all(
                isinstance(r.lhs, Binder) and r.lhs.kind == "derivative" for r in rs.rules
            )
        )
        spec_node = CalcNode(kind="specification", collapsed=True, label=self.variant.name)
        self.solution = CalcNode(kind="solution")
        self.calc = [spec_node, self.solution]
        self.targets = [self.solution]  # append stack; subcalcs push here

    def lin(self, t: Term) -> str:
        return render_linear(t, self.table)

    def clone(self) -> "SolveState":
        """Scratch copy for lookahead: shares the knowledge base, owns the
        interpretation state, and writes into a throwaway calc tree."""
        other = object.__new__(SolveState)
        other.__dict__.update(self.__dict__)
        other.lets = {
            k: list(v) if isinstance(v, list) else v for k, v in self.lets.items()
        }
        other.frames = [Frame(f.method, f.pc, f.owns_subcalc) for f in self.frames]
        other.solution = CalcNode(kind="solution")
        other.calc = [CalcNode(kind="specification", collapsed=True), other.solution]
        other.targets = [other.solution] + [
            CalcNode(kind="subcalc", label=t.label) for t in self.targets[1:]
        ]
        return other

    # -- program references --------------------------------------------------

    def _resolve(self, ref: object):
        """A method parameter: literal, env list name, or name[index]."""
        if not isinstance(ref, str):
            return ref
        name, index = ref, None
        if ref.endswith("]") and "[" in ref:
            name, bracket = ref[:-1].split("[", 1)
            index = int(bracket)
        pools: dict[str, object] = {
            "relations": self.relations,
            "values": self.values,
            "interval": self.interval_term,
            **self.lets,
        }
        if name not in pools:
            raise SolveError("stuck", f"method references unknown name {ref!r}")
        value = pools[name]
        if index is None:
            return value
        try:
            return value[index]  # type: ignore[index]
        except (IndexError, TypeError):
            raise SolveError("stuck", f"method reference {ref!r} out of range") from None


def start_solve(kb: KnowledgeBase, spec: ModelState, k: int = 2) -> SolveState:
    overall, missing, where = check_model(spec)
    unmet = [w["condition"] for w in where if w["status"] != "Correct"]
    if overall.kind != "Correct":
        raise SolveError(
            "guard-unsatisfied",
            "specification is not complete",
            {"missing": [l for f in missing.values() for l in f], "where": unmet},
        )
    if not spec.interval_revealed():
        raise SolveError("guard-unsatisfied", "the interval has not been revealed", {"missing": ["interval"]})
    return SolveState(kb, spec, k)


# ---------------------------------------------------------------------------
# Interpretation


def propose_next(state: SolveState) -> Proposal:
    if state.mode == "finished":
        raise SolveError("not-applicable", "the calculation is finished")
    if state.mode == "diff":
        assert state.current is not None
        app = rewrite_once(state.diff_rulesets, state.current, state.given)
        if app is not None:
            return Proposal(
                False, Rewrite(app.rule.name, app.path), canonical(app.result)
            )
        state.mode = "program"  # unfold complete, fall through to the program
    while state.frames and state.frames[-1].pc >= len(state.frames[-1].method.program):
        _pop_frame(state)
    if not state.frames:
        return Proposal(True, result=_result_equations(state))
    step = state.frames[-1].method.program[state.frames[-1].pc]
    tactic = _step_tactic(state, step)
    preview = _tactic_result(state, tactic, step)
    return Proposal(False, tactic, preview)


def _pop_frame(state: SolveState):
    frame = state.frames.pop()
    if frame.owns_subcalc:
        state.targets.pop()


def _step_tactic(state: SolveState, step: Step) -> Tactic:
    p = step.params
    if step.tactic == "SubProblem":
        return SubProblem(str(p["problem"]))
    if step.tactic == "SolveUnivariate":
        equation = state._resolve(p["equation"])
        unknown = state._resolve(p["for"])
        if not isinstance(equation, Term) or not isinstance(unknown, str):
            raise SolveError("stuck", "SolveUnivariate needs an equation and a name")
        return SolveUnivariate(equation, unknown)
    if step.tactic == "FilterByInterval":
        solutions = state._resolve(p["values"])
        interval = state._resolve(p["interval"])
        if not isinstance(solutions, list):
            raise SolveError("stuck", "FilterByInterval needs a solution list")
        return FilterByInterval(tuple(solutions), interval)  # type: ignore[arg-type]
    if step.tactic == "TakeEquation":
        return TakeEquation(int(p["index"]))  # type: ignore[call-overload]
    if step.tactic == "Substitute":
        equation = state._resolve(p["value"])
        if not isinstance(equation, Term):
            raise SolveError("stuck", "Substitute needs an equation")
        return Substitute(equation)
    if step.tactic == "Differentiate":
        if state.current is None:
            raise SolveError("stuck", "nothing to differentiate yet")
        return Differentiate(state.current, state.interval_variable)
    if step.tactic == "SwitchToFloat":
        return SwitchToFloat(int(p.get("precision", state.example.precision)))  # type: ignore[call-overload]
    raise SolveError("stuck", f"unknown tactic {step.tactic!r} in method program")


def _tactic_result(state: SolveState, tactic: Tactic, step: Optional[Step]) -> Optional[Term]:
    """The formula the tactic would display, without committing."""
    match tactic:
        case SubProblem(_):
            return None
        case SolveUnivariate(equation, unknown):
            try:
                solutions = algebra.solve_univariate(equation, unknown)
            except algebra.SolveStuck as e:
                raise SolveError("stuck", str(e)) from None
            return Apply("list", tuple(solutions))
        case FilterByInterval(solutions, _):
            kept = tuple(
                s for s in solutions
                if in_interval(s.args[1], state.interval, state.given) is not False
            )
            return Apply("list", kept)
        case TakeEquation(index):
            if not 0 <= index < len(state.relations):
                raise SolveError("stuck", f"no relation {index}")
            return state.relations[index]
        case Substitute(equation):
            if state.current is None:
                raise SolveError("not-applicable", "no formula to substitute into")
            if not (isinstance(equation, Apply) and equation.op == "eq" and isinstance(equation.args[0], Variable)):
                raise SolveError("not-applicable", "substitution needs name = value")
            name, value = equation.args[0].name, equation.args[1]
            replaced = _replace_variable(state.current, name, value)
            return canonical(replaced)
        case Differentiate(function, variable):
            if not (isinstance(function, Apply) and function.op == "eq"):
                raise SolveError("not-applicable", "can only differentiate an equation")
            lhs, rhs = function.args
            if not isinstance(lhs, Variable):
                raise SolveError("not-applicable", "left side must be the sought name")
            return Apply(
                "eq",
                (Variable(lhs.name + "'"), Binder("derivative", variable, rhs)),
            )
        case SwitchToFloat(_):
            return state.current
        case Rewrite(rule_name, path):
            if state.current is None:
                raise SolveError("not-applicable", "no formula to rewrite")
            rule = _find_rule(state, rule_name)
            result = rule.try_at(state.current, path, state.given)
            if result is None:
                raise SolveError("not-applicable", f"rule {rule_name} does not apply there")
            return canonical(result)
    raise TypeError(f"not a tactic: {tactic!r}")


def _replace_variable(t: Term, name: str, value: Term) -> Term:
    match t:
        case Variable(n) if n == name:
            return value
        case Apply(op, args):
            return Apply(op, tuple(_replace_variable(a, name, value) for a in args))
        case Binder(kind, bound, body):
            if bound == name:
                return t
            return Binder(kind, bound, _replace_variable(body, name, value))
    return t


def _find_rule(state: SolveState, rule_name: str):
    for rs in state.rulesets:
        for rule in rs.rules:
            if rule.name == rule_name:
                return rule
    raise SolveError("not-applicable", f"unknown rule {rule_name!r}")


def _rule_justification(state: SolveState, rule_name: str, path: Path, predecessor: Term) -> dict:
    rule = _find_rule(state, rule_name)
    ruleset = next(rs.name for rs in state.rulesets for r in rs.rules if r.name == rule_name)
    try:
        bindings = match(rule.lhs, subterm(predecessor, path)) or {}
    except TermError:
        bindings = {}
    return {
        "kind": "rule",
        "rule": rule.name,
        "ruleset": ruleset,
        "path": list(path),
        "bindings": {k: state.lin(v) for k, v in sorted(bindings.items())},
        "text": rule.text,
    }


def commit_step(state: SolveState, tactic: Tactic) -> CalcNode:
    proposal = propose_next(state)
    if proposal.finished:
        raise SolveError("not-applicable", "the program has terminated")
    if tactic == proposal.tactic:
        return _commit_proposal(state, proposal)
    # off-script: apply if possible, record a detour, keep the program still
    result = _tactic_result(state, tactic, None)
    if result is None:
        raise SolveError("not-applicable", "cannot take this step here")
    node = CalcNode(
        kind="formula",
        term=result,
        justification=_tactic_justification(state, tactic),
        detour=True,
    )
    state.targets[-1].children.append(node)
    return node


def _tactic_justification(state: SolveState, tactic: Tactic) -> dict:
    if isinstance(tactic, Rewrite) and state.current is not None:
        return _rule_justification(state, tactic.rule, tactic.path, state.current)
    return {"kind": "tactic", **tactic_to_json(tactic, state.lin)}


def _commit_proposal(state: SolveState, proposal: Proposal) -> CalcNode:
    tactic = proposal.tactic
    assert tactic is not None
    if state.mode == "diff":
        assert isinstance(tactic, Rewrite) and proposal.preview is not None
        assert state.current is not None
        justification = _rule_justification(state, tactic.rule, tactic.path, state.current)
        state.current = proposal.preview
        node = CalcNode(kind="formula", term=state.current, justification=justification)
        state.targets[-1].children.append(node)
        if not _has_derivative(state.current):
            state.mode = "program"
        return node

    frame = state.frames[-1]
    step = frame.method.program[frame.pc]
    if isinstance(tactic, SubProblem):  # fallible lookup before any state change
        methods = state.kb.methods_for(tactic.problem)
        if not methods:
            raise SolveError("stuck", f"no method for problem {tactic.problem!r}")
    frame.pc += 1
    match tactic:
        case SubProblem(problem):
            node = CalcNode(kind="subcalc", label=problem, justification=_tactic_justification(state, tactic))
            state.targets[-1].children.append(node)
            state.frames.append(Frame(methods[0], owns_subcalc=True))
            state.targets.append(node)
            return node
        case SolveUnivariate(_, _):
            assert proposal.preview is not None
            state.current = proposal.preview
            bind = step.params.get("bind")
            if bind:
                state.lets[str(bind)] = list(proposal.preview.args)
        case FilterByInterval(_, _):
            assert proposal.preview is not None
            state.current = proposal.preview
            bind = step.params.get("bind")
            if bind:
                state.lets[str(bind)] = list(proposal.preview.args)
        case TakeEquation(_):
            state.current = proposal.preview
        case Substitute(_):
            state.current = proposal.preview
        case Differentiate(_, _):
            state.function = state.current
            state.current = proposal.preview
            state.mode = "diff"
        case SwitchToFloat(precision):
            state.precision = precision
        case _:
            raise SolveError("not-applicable", "this tactic cannot be proposed")
    node = CalcNode(
        kind="formula",
        term=state.current,
        justification=_tactic_justification(state, tactic),
    )
    state.targets[-1].children.append(node)
    return node


def _has_derivative(t: Term) -> bool:
    return any(
        isinstance(node, Binder) and node.kind == "derivative" for _, node in iter_paths(t)
    )


# ---------------------------------------------------------------------------
# Finishing


def _result_equations(state: SolveState) -> tuple[Term, ...]:
    if state.current is None or not (
        isinstance(state.current, Apply) and state.current.op == "eq"
    ):
        raise SolveError("stuck", "no derivative equation to search on")
    derivative_rhs = state.current.args[1]
    lo, hi = state.interval.lower, state.interval.upper
    if lo is None or hi is None:
        raise SolveError("stuck", "the search interval must be bounded")

    def g(x: float) -> float:
        return eval_float(derivative_rhs, {**_float_env(state.given), state.interval_variable: x})

    brackets = algebra.sign_change_brackets(g, float(lo), float(hi))
    if not brackets:
        raise SolveError("stuck", "the derivative has no sign change on the interval")
    candidates = [algebra.bisect(g, a, b) for a, b in brackets]
    best = candidates[0] if len(candidates) == 1 else _best_candidate(state, candidates)

    companions = _companion_equations(state)
    precision = state.precision if state.precision is not None else state.example.precision
    out = []
    env = {**_float_env(state.given), state.interval_variable: best}
    for name in state.values:
        if name == state.interval_variable:
            out.append(Apply("eq", (Variable(name), make_float(best, precision))))
        elif name in companions:
            value = eval_float(companions[name], env)
            out.append(Apply("eq", (Variable(name), make_float(value, precision))))
    return tuple(out)


def _best_candidate(state: SolveState, candidates: list[float]) -> float:
    assert state.function is not None
    objective = state.function.args[1]

    def value(x: float) -> float:
        try:
            return eval_float(objective, {**_float_env(state.given), state.interval_variable: x})
        except EvalError:
            return float("-inf")

    return max(candidates, key=value)


def _companion_equations(state: SolveState) -> dict[str, Term]:
    out: dict[str, Term] = {}
    for bound in state.lets.values():
        items = bound if isinstance(bound, list) else [bound]
        for item in items:
            if isinstance(item, Apply) and item.op == "eq" and isinstance(item.args[0], Variable):
                out.setdefault(item.args[0].name, item.args[1])
    return out


def _float_env(env) -> dict[str, float]:
    return {k: float(v) for k, v in env.items()}


def finish(state: SolveState) -> CalcNode:
    proposal = propose_next(state)
    if not proposal.finished:
        raise SolveError("not-terminated", "the method program has not terminated")
    node = CalcNode(kind="result", equations=proposal.result)
    state.solution.children.append(node)
    state.mode = "finished"
    return node


# ---------------------------------------------------------------------------
# Checking student steps


def check_user_step(state: SolveState, proposed: Term, should_stop: Callable[[], bool] = lambda: False):
    """Accepted (with justification) or Rejected (with a reason)."""
    if state.current is None:
        return False, {"reason": "no active formula"}
    target = canonical(proposed)
    if target == canonical(state.current):
        return False, {"reason": "no-progress"}
    try:
        proposal = propose_next(state)
    except SolveError:
        proposal = None
    if proposal and not proposal.finished and proposal.preview is not None:
        if target == canonical(proposal.preview):
            return True, {
                "justification": _tactic_justification(state, proposal.tactic),
                "matches": "proposal",
                "depth": 1,
            }
    depth, justification = _lookahead(state, target)
    if depth is not None:
        return True, {"justification": justification, "matches": "program", "depth": depth}
    chain = derivation_chain(
        state.rulesets, canonical(state.current), target, state.given,
        state.k, state.lin, should_stop,
    )
    if chain is not None:
        return True, {
            "justification": {"kind": "chain", "steps": chain},
            "matches": "derivation",
        }
    reason = {"reason": f"not reachable within {state.k} rule applications"}
    if proposal and proposal.preview is not None:
        mismatch = _first_mismatch(canonical(proposal.preview), target)
        reason["mismatch_path"] = list(mismatch)
    return False, reason


_LOOKAHEAD = 8  # how far ahead a student may jump along the program


def _lookahead(state: SolveState, target: Term) -> tuple[Optional[int], Optional[dict]]:
    """Does a later program formula equal the target?  Runs on a scratch
    copy so nothing commits; depth counts proposals to replay."""
    scratch = state.clone()
    for depth in range(2, _LOOKAHEAD + 1):
        try:
            prop = propose_next(scratch)
            if prop.finished:
                return None, None
            _commit_proposal(scratch, prop)
            nxt = propose_next(scratch)
        except SolveError:
            return None, None
        if nxt.finished:
            return None, None
        if nxt.preview is not None and canonical(nxt.preview) == target:
            return depth, _tactic_justification(scratch, nxt.tactic)
    return None, None


def derivation_chain(
    rulesets,
    start: Term,
    target: Term,
    env=None,
    k: int = 2,
    lin: Callable[[Term], str] = render_linear,
    should_stop: Callable[[], bool] = lambda: False,
) -> Optional[list[dict]]:
    """Breadth-first: a ≤k-step rule chain from start to target, or None.

    Both ends and every intermediate form are compared canonically, so
    "subtract 1, divide by 2" finds x=4 from 2*x+1=9 even though the
    raw rule results read 2*x=9-1 and x=8/2.
    """
    frontier: list[tuple[Term, list[dict]]] = [(start, [])]
    seen = {start}
    for _ in range(k):
        next_frontier: list[tuple[Term, list[dict]]] = []
        for term, chain in frontier:
            for path, _node in iter_paths(term):
                if should_stop():
                    return None
                for rs in rulesets:
                    for rule in rs.rules:
                        result = rule.try_at(term, path, env)
                        if result is None:
                            continue
                        result = canonical(result)
                        if result in seen:
                            continue
                        bindings = match(rule.lhs, subterm(term, path)) or {}
                        step = {
                            "rule": rule.name,
                            "ruleset": rs.name,
                            "path": list(path),
                            "bindings": {k_: lin(v) for k_, v in sorted(bindings.items())},
                            "text": rule.text,
                        }
                        if result == target:
                            return chain + [step]
                        seen.add(result)
                        next_frontier.append((result, chain + [step]))
        frontier = next_frontier
    return None


def _first_mismatch(expected: Term, got: Term) -> Path:
    if type(expected) is not type(got):
        return ()
    if isinstance(expected, Apply) and isinstance(got, Apply):
        if expected.op == got.op and len(expected.args) == len(got.args):
            for i, (a, b) in enumerate(zip(expected.args, got.args)):
                if a != b:
                    return (i,) + _first_mismatch(a, b)
            return ()
        return ()
    if isinstance(expected, Binder) and isinstance(got, Binder):
        if expected.kind == got.kind and expected.bound == got.bound and expected.body != got.body:
            return (0,) + _first_mismatch(expected.body, got.body)
        return ()
    return ()


def input_step(state: SolveState, proposed: Term):
    """Check a student formula; commit the program up to it or record a detour."""
    accepted, info = check_user_step(state, proposed)
    if not accepted:
        return False, info, None
    if info.get("matches") in ("proposal", "program"):
        node = None
        for _ in range(info["depth"]):
            node = _commit_proposal(state, propose_next(state))
        return True, info, node
    node = CalcNode(
        kind="formula", term=canonical(proposed), justification=info["justification"], detour=True
    )
    state.targets[-1].children.append(node)
    return True, info, node


def serialize_calc(state: SolveState) -> list[dict]:
    return [node.to_json(state.lin) for node in state.calc]
