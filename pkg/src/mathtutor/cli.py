"""Command line front end.

check     validate a knowledge directory and report every problem found
replay    drive a server with a recorded transcript and diff the replies
repl      interactive line-oriented session (plain ASCII, one fact per line)
serve     run the protocol server on stdio or a WebSocket port
render    one-shot term rendering

Exit codes: 0 success, 1 validation failure or divergence, 2 usage.
"""

from __future__ import annotations

import argparse
import difflib
import json
import logging
import sys
from pathlib import Path
from typing import Optional

from .knowledge import load_corpus
from .parse import ParseError, parse
from .protocol import Server, canonical_json, serve_stdio, run_websocket
from .render import render_linear, render_pretty
from .terms import DEFAULT_TABLE, FULL_SIGNATURE


def main(argv: Optional[list[str]] = None) -> int:
    parser = argparse.ArgumentParser(
        prog="mathtutor", description="An interactive mathematics tutor."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_check = sub.add_parser("check", help="validate a knowledge directory")
    p_check.add_argument("directory")

    p_replay = sub.add_parser("replay", help="replay a recorded transcript")
    p_replay.add_argument("transcript")
    p_replay.add_argument(
        "--update", action="store_true", help="rewrite the transcript with actual responses"
    )

    p_repl = sub.add_parser("repl", help="interactive line-oriented session")
    p_repl.add_argument("--example", help="open this example immediately")

    p_serve = sub.add_parser("serve", help="run the protocol server")
    transport = p_serve.add_mutually_exclusive_group()
    transport.add_argument("--stdio", action="store_true", help="serve on stdin/stdout (default)")
    transport.add_argument("--port", type=int, help="serve WebSocket on this port")

    p_render = sub.add_parser("render", help="render one term")
    p_render.add_argument("term")
    form = p_render.add_mutually_exclusive_group()
    form.add_argument("--linear", action="store_true", help="linear notation (default)")
    form.add_argument("--pretty", action="store_true", help="presentation markup")

    args = parser.parse_args(argv)
    if args.command == "check":
        return _cmd_check(args.directory)
    if args.command == "replay":
        return _cmd_replay(args.transcript, args.update)
    if args.command == "repl":
        return _cmd_repl(args.example)
    if args.command == "serve":
        return _cmd_serve(args.port)
    if args.command == "render":
        return _cmd_render(args.term, args.pretty)
    return 2


def _cmd_check(directory: str) -> int:
    errors: list[str] = []
    kb = load_corpus(directory, errors)
    for message in errors:
        print(message, file=sys.stderr)
    if errors:
        print(f"{len(errors)} problem(s) found", file=sys.stderr)
        return 1
    print(
        f"ok: {len(kb.theories)} theories, {len(kb.problems)} problems, "
        f"{len(kb.methods)} methods, {len(kb.examples)} examples"
    )
    return 0


def _cmd_replay(transcript: str, update: bool) -> int:
    path = Path(transcript)
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except OSError as e:
        print(e, file=sys.stderr)
        return 1
    server = Server()
    entries = []
    for lineno, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            entry = json.loads(line)
        except ValueError as e:
            print(f"{path}:{lineno}: not JSON: {e}", file=sys.stderr)
            return 1
        response = server.dispatch(entry["request"])
        if update:
            entry["expect"] = response
            entries.append(entry)
            continue
        expected, actual = entry.get("expect"), response
        if canonical_json(expected) != canonical_json(actual):
            print(f"{path}:{lineno}: response diverges", file=sys.stderr)
            diff = difflib.unified_diff(
                json.dumps(expected, indent=2, sort_keys=True).splitlines(),
                json.dumps(actual, indent=2, sort_keys=True).splitlines(),
                fromfile="expected",
                tofile="actual",
                lineterm="",
            )
            for d in diff:
                print(d, file=sys.stderr)
            return 1
    if update:
        path.write_text(
            "".join(canonical_json(e) + "\n" for e in entries), encoding="utf-8"
        )
        print(f"updated {path} ({len(entries)} entries)")
    else:
        print(f"replayed {path}: all responses match")
    return 0


def _cmd_serve(port: Optional[int]) -> int:
    logging.basicConfig(stream=sys.stderr, level=logging.INFO, format="%(message)s")
    if port is not None:
        run_websocket(port=port)
    else:
        serve_stdio()
    return 0


def _cmd_render(text: str, pretty: bool) -> int:
    try:
        term = parse(text, FULL_SIGNATURE, DEFAULT_TABLE)
    except ParseError as e:
        print(e, file=sys.stderr)
        return 1
    print(render_pretty(term) if pretty else render_linear(term))
    return 0


# ---------------------------------------------------------------------------
# repl


_REPL_HELP = """\
commands (one per line):
  list                      show the available examples
  open <example-id>         start a specification for an example
  given/find/relate <text>  enter one item into that field
  rename <from> <to>        rename an identifier throughout the model
  check                     report the overall model status
  set <slot> <id>           set RTheory / RProblem / RMethod
  toggle <RProblem|RMethod> check or uncheck a reference box
  postcond                  show the instantiated post-condition
  start                     begin the solution phase
  propose                   show the next proposed step
  commit                    take the proposed step
  step <formula>            offer your own next formula
  finish                    run the numeric search and show the result
  render <term>             echo a term in linear notation
  lookup <op> <level>       explanation of an operator (school/academic)
  refine <problem> [term]   classify a formula against a problem subtree
  help                      this text
  quit                      leave"""


class _Repl:
    """Line-oriented client: ASCII only, one fact per line, no cursor work."""

    def __init__(self, out):
        self.server = Server()
        self.session: Optional[str] = None
        self._id = 0
        self._out = out

    def say(self, text: str):
        self._out.write(text.encode("ascii", "backslashreplace").decode("ascii") + "\n")

    def rpc(self, method: str, **params):
        self._id += 1
        if self.session is not None and "session" not in params:
            params["session"] = self.session
        response = self.server.dispatch({"id": self._id, "method": method, "params": params})
        assert response is not None
        if "error" in response:
            self.say(f"error: {response['error']['message']}")
            return None
        return response["result"]

    def show_calc(self, calc: list[dict], indent: int = 0):
        for node in calc:
            pad = "  " * indent
            kind = node["kind"]
            if kind == "formula":
                mark = "* " if node.get("detour") else ""
                just = node.get("justification") or {}
                by = just.get("text") or just.get("rule") or just.get("tactic") or ""
                suffix = f"    ({by})" if by else ""
                self.say(f"{pad}{mark}{node['formula']}{suffix}")
            elif kind == "result":
                self.say(f"{pad}result: {' '.join(node['equations'])}")
            elif kind == "specification":
                self.say(f"{pad}specification ({node.get('label', '')}) [collapsed]")
            else:
                if kind == "subcalc":
                    self.say(f"{pad}problem {node.get('label', '')}:")
                self.show_calc(node.get("children", []), indent + 1)

    def handle(self, line: str) -> bool:
        words = line.strip().split(None, 1)
        if not words:
            return True
        command, rest = words[0].lower(), words[1] if len(words) > 1 else ""
        if command in ("quit", "exit"):
            return False
        if command == "help":
            self.say(_REPL_HELP)
        elif command == "list":
            result = self.rpc("example/list")
            if result:
                for e in result["examples"]:
                    self.say(f"{e['id']}: {e['title']}")
        elif command == "open":
            result = self.rpc("example/open", id=rest.strip())
            if result:
                self.session = result["session"]
                self.say(f"opened {rest.strip()} (session {self.session})")
                self.say(result["template"]["statement"])
        elif command in ("given", "find", "relate"):
            result = self.rpc("model/input", field=command.capitalize(), text=rest)
            if result:
                self.say(f"feedback: {_feedback(result['feedback'])}")
        elif command == "rename":
            parts = rest.split()
            if len(parts) != 2:
                self.say("usage: rename <from> <to>")
                return True
            result = self.rpc("model/rename", **{"from": parts[0], "to": parts[1]})
            if result:
                self.say(f"feedback: {_feedback(result['feedback'])}")
        elif command == "check":
            result = self.rpc("model/check")
            if result:
                self.say(f"overall: {_feedback(result['overall'])}")
                for f, labels in result["missing"].items():
                    self.say(f"missing in {f}: {', '.join(labels)}")
                for w in result["where"]:
                    self.say(f"where {w['condition']}: {w['status']}")
        elif command == "set":
            parts = rest.split(None, 1)
            if len(parts) != 2:
                self.say("usage: set <slot> <id>")
                return True
            result = self.rpc("refs/set", slot=parts[0], id=parts[1].strip())
            if result:
                self.say(f"feedback: {_feedback(result['feedback'])}")
        elif command == "toggle":
            result = self.rpc("refs/toggle", which=rest.strip())
            if result:
                boxes = result["template"]["checkboxes"]
                self.say(f"RProblem={'x' if boxes['RProblem'] else 'o'} RMethod={'x' if boxes['RMethod'] else 'o'}")
                for item in result["template"]["fields"]["Given"]:
                    if item["source"] == "revealed":
                        self.say(f"revealed: {item['text']}")
        elif command == "postcond":
            result = self.rpc("postcond/show")
            if result:
                self.say(result["postcondition"]["linear"])
        elif command == "start":
            result = self.rpc("solve/start")
            if result:
                self.say(f"solving; interval {result['env']['interval']} for {result['env']['intervalVariable']}")
        elif command == "propose":
            result = self.rpc("solve/propose")
            if result:
                self.say(_proposal(result))
        elif command == "commit":
            proposal = self.rpc("solve/propose")
            if proposal is None:
                return True
            if proposal["finished"]:
                self.say("nothing to commit; use finish")
                return True
            result = self.rpc("solve/commit", tactic=proposal["tactic"])
            if result:
                self.say(result.get("formula", {}).get("linear", f"entered {proposal['tactic']['tactic']}"))
        elif command == "step":
            result = self.rpc("solve/inputStep", text=rest)
            if result:
                if result["accepted"]:
                    self.say(f"accepted ({result['matches']}): {result['formula']['linear']}")
                else:
                    self.say(f"rejected: {result['reason']}")
        elif command == "finish":
            result = self.rpc("solve/finish")
            if result:
                self.say("result: " + " ".join(e["linear"] for e in result["result"]))
                self.show_calc(result["calc"])
        elif command == "render":
            result = self.rpc("term/render", text=rest)
            if result:
                self.say(result["term"]["linear"])
        elif command == "lookup":
            parts = rest.split()
            if len(parts) != 2:
                self.say("usage: lookup <op> <school|academic>")
                return True
            result = self.rpc("knowledge/lookup", op=parts[0], level=parts[1])
            if result:
                if not result["entries"]:
                    self.say("no entry")
                for entry in result["entries"]:
                    self.say(entry)
        elif command == "refine":
            parts = rest.split(None, 1)
            if not parts:
                self.say("usage: refine <problem> [term]")
                return True
            kwargs = {"problem": parts[0]}
            if len(parts) > 1:
                kwargs["subject"] = parts[1]
            result = self.rpc("knowledge/refine", **kwargs)
            if result:
                for candidate in result["candidates"]:
                    verdicts = " ".join(
                        f"[{c['verdict']}] {c['condition']['linear']}"
                        for c in candidate["conditions"]
                    ) or "(no conditions)"
                    self.say(f"{candidate['problem']}: {verdicts}")
        else:
            self.say(f"unknown command {command!r}; try help")
        return True


def _feedback(fb: dict) -> str:
    kind = fb.get("kind", "?")
    labels = fb.get("labels")
    return f"{kind} ({', '.join(labels)})" if labels else kind


def _proposal(p: dict) -> str:
    if p["finished"]:
        return "finished: " + " ".join(e["linear"] for e in p["result"])
    tactic = p["tactic"]
    parts = [f"{k}={v}" for k, v in tactic.items() if k != "tactic"]
    line = f"propose {tactic['tactic']}" + (f" ({', '.join(parts)})" if parts else "")
    if "preview" in p:
        line += f" -> {p['preview']['linear']}"
    return line


def _cmd_repl(example: Optional[str]) -> int:
    repl = _Repl(sys.stdout)
    repl.say("mathtutor repl; type help for commands")
    if example:
        repl.handle(f"open {example}")
    for line in sys.stdin:
        if not repl.handle(line):
            break
    return 0


if __name__ == "__main__":
    sys.exit(main())
