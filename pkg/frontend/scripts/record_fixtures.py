#!/usr/bin/env python3
"""Record protocol fixtures for the client tests.

Runs the real engine in-process and captures request/response pairs into
tests/fixtures/*.json.  The client test suite replays these through a fake
transport, so UI behavior is checked against genuine engine output without
a live server.  Re-run after engine changes: python3 scripts/record_fixtures.py
"""

import json
from pathlib import Path

from mathtutor.knowledge import default_corpus
from mathtutor.parse import parse
from mathtutor.protocol import Server
from mathtutor.terms import DEFAULT_TABLE, FULL_SIGNATURE, iter_paths

FIXTURES = Path(__file__).resolve().parent.parent / "tests" / "fixtures"

MODEL_INPUTS = [
    ("Given", "r=7"),
    ("Find", "A"),
    ("Find", "u"),
    ("Find", "v"),
    ("Relate", "A=2*u*v-u^2"),
    ("Relate", "(u/2)^2+(v/2)^2=r^2"),
]


class Recorder:
    """One fixture file per Recorder; fresh server, so session ids start at s1."""

    def __init__(self):
        self.server = Server(default_corpus())
        self.entries = []
        self.count = 0

    def call(self, method, **params):
        self.count += 1
        response = self.server.dispatch(
            {"id": f"r{self.count}", "method": method, "params": params}
        )
        body = (
            {"result": response["result"]}
            if "result" in response
            else {"error": response["error"]}
        )
        self.entries.append({"method": method, "params": params, "response": body})
        return response.get("result")

    def save(self, name):
        path = FIXTURES / name
        path.write_text(json.dumps({"entries": self.entries}, indent=1) + "\n")
        print(f"wrote {path.relative_to(FIXTURES.parent.parent)} ({len(self.entries)} entries)")


def record_navigation():
    rec = Recorder()
    for text in ("a+b", "(u/2)^2+(v/2)^2=r^2"):
        rec.call("term/render", text=text)
        rec.call("term/outline", text=text, depth=10)
        term = parse(text, FULL_SIGNATURE, DEFAULT_TABLE)
        moves = ("to-parent", "to-first-child", "to-next-sibling", "to-prev-sibling")
        for path, _node in iter_paths(term):
            for move in moves:
                rec.call("term/navigate", text=text, path=list(path), move=move)
    rec.save("navigation.json")


def record_specification():
    rec = Recorder()
    rec.call("example/list")
    opened = rec.call("example/open", id="No123a")
    sid = opened["session"]
    # fresh model: check before anything is typed
    rec.call("model/check", session=sid)
    rec.call("model/input", session=sid, field="Given", text="r=7")
    rec.call("model/input", session=sid, field="Relate", text="2+*3")
    rec.call("model/input", session=sid, field="Relate", text="u^2+v^2=(2*r)^2")
    for field, text in MODEL_INPUTS[1:]:
        rec.call("model/input", session=sid, field=field, text=text)
    rec.call("refs/set", session=sid, slot="RTheory", id="Diff_App")
    rec.call("refs/set", session=sid, slot="RProblem", id="univariate_calculus/Optimisation")
    rec.call("refs/set", session=sid, slot="RMethod", id="by_univariate_calculus")
    rec.call("refs/toggle", session=sid, which="RMethod")
    rec.call("model/check", session=sid)
    rec.call("postcond/show", session=sid)
    # refinement against the session environment: 0<r decided by r=7
    rec.call("knowledge/refine", problem="univariate_calculus", session=sid)
    rec.save("specification.json")


def record_refine():
    rec = Recorder()
    rec.call("knowledge/refine", problem="equation", subject="sqrt(x+1)=3")
    rec.call("knowledge/refine", problem="univariate_calculus")
    rec.save("refine.json")


def complete_model(rec):
    opened = rec.call("example/open", id="No123a")
    sid = opened["session"]
    for field, text in MODEL_INPUTS:
        rec.call("model/input", session=sid, field=field, text=text)
    rec.call("refs/toggle", session=sid, which="RMethod")
    rec.call("model/check", session=sid)
    return sid


def record_solution():
    rec = Recorder()
    sid = complete_model(rec)
    rec.call("solve/start", session=sid)
    while True:
        proposal = rec.call("solve/propose", session=sid)
        if proposal["finished"]:
            break
        rec.call("solve/commit", session=sid, tactic=proposal["tactic"])
    rec.call("solve/finish", session=sid)
    rec.save("solution.json")


def record_student():
    """Own-step traffic: a rejection, an out-of-order rule, a two-ahead jump."""
    rec = Recorder()
    sid = complete_model(rec)
    rec.call("solve/start", session=sid)
    lines = []
    for _ in range(7):
        proposal = rec.call("solve/propose", session=sid)
        committed = rec.call("solve/commit", session=sid, tactic=proposal["tactic"])
        if "formula" in committed:  # the SubProblem step has no formula of its own
            lines.append(committed["formula"]["linear"])
    rec.call("solve/inputStep", session=sid, text="A'=u+1")
    # differentiate the last addend first: off the program order, found by search
    from mathtutor.rewrite import RewriteRule, apply_rule
    from mathtutor.render import render_linear
    kb = default_corpus()
    table = kb.table("Diff_App")
    sig = kb.signature("Diff_App")
    current = parse(lines[-1], sig, table)
    diff_power = next(
        r for r in kb.ruleset("Diff_App", "diff") if r.name == "diff_power"
    )
    swapped, _ = apply_rule(diff_power, current, (1, 1))
    rec.call("solve/inputStep", session=sid, text=render_linear(swapped, table))
    # jump two program steps in one go
    two_ahead = rec.server.sessions[sid].solve.clone()
    import mathtutor.solve as solve_mod
    for _ in range(2):
        prop = solve_mod.propose_next(two_ahead)
        solve_mod._commit_proposal(two_ahead, prop)
    rec.call("solve/inputStep", session=sid, text=two_ahead.lin(two_ahead.current))
    rec.save("student.json")


def main():
    FIXTURES.mkdir(parents=True, exist_ok=True)
    record_navigation()
    record_specification()
    record_refine()
    record_solution()
    record_student()


if __name__ == "__main__":
    main()
