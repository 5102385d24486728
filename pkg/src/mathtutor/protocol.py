"""Sessions over line-delimited JSON, on stdio or a WebSocket.

The envelope is JSON-RPC-shaped without adopting a protocol suite:
requests are {id, method, params}, answered exactly once by {id, result}
or {id, error:{code, message, data}}; a request without an id is a
notification and is never answered.  Responses are rendered with sorted
keys and compact separators, so the same request sequence produces
byte-identical payloads on either transport.

Error codes: -32700 unparsable request, -32601 unknown method, -32602
bad params; domain errors are 1xxx (1001 wrong phase, 1002 unknown
session, then per-failure codes below).

Every response that carries a term carries both renderings: "linear"
(the ASCII notation, for speech and editing) and "pretty" (markup).
"""

from __future__ import annotations

import json
import logging
import os
import sys
import threading
from dataclasses import dataclass
from typing import Callable, Optional

from . import solve as solve_mod
from . import specify
from .knowledge import KnowledgeBase, KnowledgeError, default_corpus, load_corpus
from .parse import ParseError, parse
from .render import render_linear, render_pretty
from .solve import SolveError, SolveState
from .specify import ModelState
from .terms import (
    DEFAULT_TABLE,
    FULL_SIGNATURE,
    Cursor,
    NotationTable,
    OutlineNode,
    PathError,
    Signature,
    Term,
    navigate,
    outline,
    subterm,
)

log = logging.getLogger("mathtutor.protocol")

KNOWLEDGE_DIR_ENV = "MAWEN_KNOWLEDGE_DIR"

PARSE_ERROR = -32700
UNKNOWN_METHOD = -32601
BAD_PARAMS = -32602
WRONG_PHASE = 1001
UNKNOWN_SESSION = 1002
UNKNOWN_ID = 1003
SYNTAX_ERROR = 1004
GUARD_UNSATISFIED = 1005
STUCK = 1006
NOT_APPLICABLE = 1007
NOT_TERMINATED = 1008
BAD_TACTIC = 1009

_SOLVE_CODES = {
    "guard-unsatisfied": GUARD_UNSATISFIED,
    "stuck": STUCK,
    "not-applicable": NOT_APPLICABLE,
    "not-terminated": NOT_TERMINATED,
    "bad-tactic": BAD_TACTIC,
}


class ProtocolError(Exception):
    def __init__(self, code: int, message: str, data: Optional[dict] = None):
        super().__init__(message)
        self.code = code
        self.data = data


def canonical_json(obj: object) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


@dataclass
class Session:
    id: str
    spec: ModelState
    phase: str = "specifying"  # specifying | solving | finished
    solve: Optional[SolveState] = None
    store_version: int = 1


class Server:
    """Dispatches requests against a shared read-only knowledge base.

    Sessions run concurrently; requests touching one session are
    serialized on its lock, so each session sees arrival order.
    """

    def __init__(self, kb: Optional[KnowledgeBase] = None):
        if kb is None:
            root = os.environ.get(KNOWLEDGE_DIR_ENV)
            kb = load_corpus(root) if root else default_corpus()
        self.kb = kb
        self.sessions: dict[str, Session] = {}
        self._counter = 0
        self._registry_lock = threading.Lock()
        self._locks: dict[str, threading.Lock] = {}

    # -- envelope ------------------------------------------------------------

    def dispatch_line(self, line: str) -> Optional[str]:
        try:
            request = json.loads(line)
            if not isinstance(request, dict):
                raise ValueError("request must be an object")
        except ValueError as e:
            return canonical_json(
                {"id": None, "error": {"code": PARSE_ERROR, "message": f"unparsable request: {e}"}}
            )
        response = self.dispatch(request)
        return None if response is None else canonical_json(response)

    def dispatch(self, request: dict) -> Optional[dict]:
        request_id = request.get("id")
        is_notification = "id" not in request
        try:
            result = self._route(request)
        except ProtocolError as e:
            if is_notification:
                log.warning("notification %s failed: %s", request.get("method"), e)
                return None
            error: dict = {"code": e.code, "message": str(e)}
            if e.data is not None:
                error["data"] = e.data
            return {"id": request_id, "error": error}
        if is_notification:
            return None
        return {"id": request_id, "result": result}

    def _route(self, request: dict) -> dict:
        method = request.get("method")
        params = request.get("params", {})
        if not isinstance(method, str) or not isinstance(params, dict):
            raise ProtocolError(BAD_PARAMS, "method must be a string and params an object")
        handler = _HANDLERS.get(method)
        if handler is None:
            raise ProtocolError(UNKNOWN_METHOD, f"unknown method {method!r}")
        sid = params.get("session")
        if sid is not None:
            lock = self._locks.get(sid)
            if lock is None:
                raise ProtocolError(UNKNOWN_SESSION, f"unknown session {sid!r}")
            with lock:
                return handler(self, params)
        return handler(self, params)

    # -- helpers -------------------------------------------------------------

    def _session(self, params: dict, phase: Optional[str] = None) -> Session:
        sid = params.get("session")
        session = self.sessions.get(sid)
        if session is None:
            raise ProtocolError(UNKNOWN_SESSION, f"unknown session {sid!r}")
        if phase is not None and session.phase != phase:
            raise ProtocolError(
                WRONG_PHASE,
                f"{session.phase} session cannot do this (needs {phase})",
            )
        return session

    def _str_param(self, params: dict, key: str) -> str:
        value = params.get(key)
        if not isinstance(value, str):
            raise ProtocolError(BAD_PARAMS, f"param {key!r} must be a string")
        return value

    def _int_param(self, params: dict, key: str, default: Optional[int] = None) -> int:
        value = params.get(key, default)
        if not isinstance(value, int) or isinstance(value, bool):
            raise ProtocolError(BAD_PARAMS, f"param {key!r} must be an integer")
        return value

    def _tools(self, params: dict) -> tuple[Signature, NotationTable]:
        """Signature/notation for term utilities: a session's theory, an
        explicit theory, or everything the engine knows."""
        sid = params.get("session")
        if sid is not None:
            theory = self._session(params).spec.references["RTheory"]
            return self.kb.signature(theory), self.kb.table(theory)
        theory = params.get("theory")
        if theory is not None:
            if not isinstance(theory, str) or theory not in self.kb.theories:
                raise ProtocolError(UNKNOWN_ID, f"unknown theory {theory!r}")
            return self.kb.signature(theory), self.kb.table(theory)
        return FULL_SIGNATURE, DEFAULT_TABLE

    def _parse(self, text: str, sig: Signature, table: NotationTable) -> Term:
        try:
            return parse(text, sig, table)
        except ParseError as e:
            raise ProtocolError(SYNTAX_ERROR, str(e)) from None

    def _payload(self, t: Term, table: NotationTable) -> dict:
        return {"linear": render_linear(t, table), "pretty": render_pretty(t, table)}

    def _session_table(self, session: Session) -> NotationTable:
        theory = session.spec.references["RTheory"]
        if theory in self.kb.theories:
            return self.kb.table(theory)
        return self.kb.master_table

    def _solve_state(self, session: Session) -> SolveState:
        if session.solve is None:
            raise ProtocolError(WRONG_PHASE, "no solution phase is open")
        return session.solve

    def _calc(self, session: Session) -> list[dict]:
        return solve_mod.serialize_calc(self._solve_state(session))


def _wrap_solve(fn: Callable[[], dict]) -> dict:
    try:
        return fn()
    except SolveError as e:
        code = _SOLVE_CODES.get(e.code, STUCK)
        raise ProtocolError(code, str(e), e.data or None) from None


# -- example / model -----------------------------------------------------


def _h_example_list(server: Server, params: dict) -> dict:
    return {
        "examples": [
            {"id": e.id, "title": e.title, "statement": e.statement}
            for e in server.kb.examples.values()
        ]
    }


def _h_example_open(server: Server, params: dict) -> dict:
    example_id = server._str_param(params, "id")
    try:
        example = server.kb.example(example_id)
    except KnowledgeError as e:
        raise ProtocolError(UNKNOWN_ID, str(e)) from None
    with server._registry_lock:
        server._counter += 1
        sid = f"s{server._counter}"
        session = Session(sid, specify.new_specification(server.kb, example))
        server.sessions[sid] = session
        server._locks[sid] = threading.Lock()
    return {"session": sid, "phase": session.phase, "template": specify.template_view(session.spec)}


def _h_model_input(server: Server, params: dict) -> dict:
    session = server._session(params, phase="specifying")
    field_name = server._str_param(params, "field")
    text = server._str_param(params, "text")
    if field_name not in specify.FIELDS:
        raise ProtocolError(BAD_PARAMS, f"field must be one of {specify.FIELDS}")
    feedback = specify.input_item(session.spec, field_name, text)
    return {"feedback": feedback.to_json(), "template": specify.template_view(session.spec)}


def _h_model_check(server: Server, params: dict) -> dict:
    session = server._session(params)
    overall, missing, where = specify.check_model(session.spec)
    return {
        "overall": overall.to_json(),
        "missing": {f: labels for f, labels in missing.items() if labels},
        "where": where,
        "template": specify.template_view(session.spec),
    }


def _h_model_rename(server: Server, params: dict) -> dict:
    session = server._session(params, phase="specifying")
    feedback = specify.rename_identifiers(
        session.spec,
        server._str_param(params, "from"),
        server._str_param(params, "to"),
    )
    return {"feedback": feedback.to_json(), "template": specify.template_view(session.spec)}


def _h_refs_set(server: Server, params: dict) -> dict:
    session = server._session(params, phase="specifying")
    feedback = specify.set_reference(
        session.spec, server._str_param(params, "slot"), server._str_param(params, "id")
    )
    return {"feedback": feedback.to_json(), "template": specify.template_view(session.spec)}


def _h_refs_toggle(server: Server, params: dict) -> dict:
    session = server._session(params, phase="specifying")
    which = server._str_param(params, "which")
    if which not in ("RProblem", "RMethod"):
        raise ProtocolError(BAD_PARAMS, "which must be RProblem or RMethod")
    specify.toggle_reference_checkbox(session.spec, which)
    return {"template": specify.template_view(session.spec)}


def _h_postcond_show(server: Server, params: dict) -> dict:
    session = server._session(params)
    term = specify.instantiate_postcondition(None, session.spec.variant)
    return {"postcondition": server._payload(term, server._session_table(session))}


# -- solving ---------------------------------------------------------------


def _h_solve_start(server: Server, params: dict) -> dict:
    session = server._session(params, phase="specifying")

    def go() -> dict:
        state = solve_mod.start_solve(server.kb, session.spec)
        session.solve = state
        session.phase = "solving"
        return {
            "phase": session.phase,
            "env": {
                "given": {k: str(v) for k, v in sorted(state.given.items())},
                "interval": state.lin(state.interval_term),
                "intervalVariable": state.interval_variable,
                "relations": [state.lin(r) for r in state.relations],
            },
            "calc": solve_mod.serialize_calc(state),
        }

    return _wrap_solve(go)


def _h_solve_propose(server: Server, params: dict) -> dict:
    session = server._session(params, phase="solving")
    state = server._solve_state(session)
    table = server._session_table(session)

    def go() -> dict:
        proposal = solve_mod.propose_next(state)
        if proposal.finished:
            return {
                "finished": True,
                "result": [server._payload(e, table) for e in proposal.result],
            }
        out: dict = {
            "finished": False,
            "tactic": solve_mod.tactic_to_json(proposal.tactic, state.lin),
        }
        if proposal.preview is not None:
            out["preview"] = server._payload(proposal.preview, table)
        return out

    return _wrap_solve(go)


def _h_solve_commit(server: Server, params: dict) -> dict:
    session = server._session(params, phase="solving")
    state = server._solve_state(session)
    table = server._session_table(session)
    tactic_data = params.get("tactic")
    if not isinstance(tactic_data, dict):
        raise ProtocolError(BAD_PARAMS, "param 'tactic' must be an object")
    sig = server.kb.signature(session.spec.references["RTheory"])

    def go() -> dict:
        tactic = solve_mod.tactic_from_json(
            tactic_data, lambda s: server._parse(s, sig, table)
        )
        node = solve_mod.commit_step(state, tactic)
        out = {"node": node.to_json(state.lin), "calc": solve_mod.serialize_calc(state)}
        if node.term is not None:
            out["formula"] = server._payload(node.term, table)
        return out

    return _wrap_solve(go)


def _h_solve_input_step(server: Server, params: dict) -> dict:
    session = server._session(params, phase="solving")
    state = server._solve_state(session)
    table = server._session_table(session)
    sig = server.kb.signature(session.spec.references["RTheory"])
    term = server._parse(server._str_param(params, "text"), sig, table)

    def go() -> dict:
        accepted, info, node = solve_mod.input_step(state, term)
        out = {"accepted": accepted, **info, "calc": solve_mod.serialize_calc(state)}
        if node is not None:
            out["node"] = node.to_json(state.lin)
            if node.term is not None:
                out["formula"] = server._payload(node.term, table)
        return out

    return _wrap_solve(go)


def _h_solve_finish(server: Server, params: dict) -> dict:
    session = server._session(params, phase="solving")
    state = server._solve_state(session)
    table = server._session_table(session)

    def go() -> dict:
        node = solve_mod.finish(state)
        session.phase = "finished"
        return {
            "phase": session.phase,
            "result": [server._payload(e, table) for e in node.equations],
            "calc": solve_mod.serialize_calc(state),
        }

    return _wrap_solve(go)


# -- term utilities ----------------------------------------------------------


def _h_term_render(server: Server, params: dict) -> dict:
    sig, table = server._tools(params)
    term = server._parse(server._str_param(params, "text"), sig, table)
    return {"term": server._payload(term, table)}


def _h_term_navigate(server: Server, params: dict) -> dict:
    sig, table = server._tools(params)
    term = server._parse(server._str_param(params, "text"), sig, table)
    raw_path = params.get("path", [])
    if not isinstance(raw_path, list):
        raise ProtocolError(BAD_PARAMS, "param 'path' must be a list of integers")
    move = server._str_param(params, "move")
    try:
        cursor = Cursor(term, tuple(int(i) for i in raw_path))
        cursor, boundary = navigate(cursor, move)
    except (PathError, ValueError, TypeError) as e:
        raise ProtocolError(BAD_PARAMS, str(e)) from None
    return {
        "path": list(cursor.at),
        "boundary": boundary,
        "focus": server._payload(subterm(term, cursor.at), table),
    }


def _outline_json(node: OutlineNode) -> dict:
    return {
        "path": list(node.path),
        "text": node.text,
        "childCount": node.child_count,
        "children": [_outline_json(c) for c in node.children],
    }


def _h_term_outline(server: Server, params: dict) -> dict:
    sig, table = server._tools(params)
    term = server._parse(server._str_param(params, "text"), sig, table)
    depth = server._int_param(params, "depth", 2)
    return {"outline": _outline_json(outline(term, depth, table))}


# -- knowledge ---------------------------------------------------------------


def _h_knowledge_lookup(server: Server, params: dict) -> dict:
    op = server._str_param(params, "op")
    level = server._str_param(params, "level")
    return {"entries": server.kb.lookup_semantics(op, level)}


def _h_knowledge_refine(server: Server, params: dict) -> dict:
    problem = server._str_param(params, "problem")
    sig, table = server._tools(params)
    subject = None
    if "subject" in params:
        subject = server._parse(server._str_param(params, "subject"), sig, table)
    env = {}
    if params.get("session") is not None:
        env = server._session(params).spec.given_env()
    try:
        rows = server.kb.refine_problem(problem, subject, env)
    except KnowledgeError as e:
        raise ProtocolError(UNKNOWN_ID, str(e)) from None
    verdict = {True: "true", False: "false", None: "undecided"}
    return {
        "candidates": [
            {
                "problem": pid,
                "conditions": [
                    {"condition": server._payload(c, server.kb.master_table), "verdict": verdict[v]}
                    for c, v in results
                ],
            }
            for pid, results in rows
        ]
    }


def _h_knowledge_outline(server: Server, params: dict) -> dict:
    kind = server._str_param(params, "kind")
    depth = server._int_param(params, "depth", 1)
    try:
        return {"outline": server.kb.outline_store(kind, depth)}
    except KnowledgeError as e:
        raise ProtocolError(BAD_PARAMS, str(e)) from None


def _h_session_close(server: Server, params: dict) -> dict:
    session = server._session(params)
    with server._registry_lock:
        server.sessions.pop(session.id, None)
    return {"closed": session.id}


_HANDLERS: dict[str, Callable[[Server, dict], dict]] = {
    "example/list": _h_example_list,
    "example/open": _h_example_open,
    "model/input": _h_model_input,
    "model/check": _h_model_check,
    "model/rename": _h_model_rename,
    "refs/set": _h_refs_set,
    "refs/toggle": _h_refs_toggle,
    "postcond/show": _h_postcond_show,
    "solve/start": _h_solve_start,
    "solve/propose": _h_solve_propose,
    "solve/commit": _h_solve_commit,
    "solve/inputStep": _h_solve_input_step,
    "solve/finish": _h_solve_finish,
    "term/render": _h_term_render,
    "term/navigate": _h_term_navigate,
    "term/outline": _h_term_outline,
    "knowledge/lookup": _h_knowledge_lookup,
    "knowledge/refine": _h_knowledge_refine,
    "knowledge/outline": _h_knowledge_outline,
    "session/close": _h_session_close,
}


# -- transports ----------------------------------------------------------


def serve_stdio(server: Optional[Server] = None, stdin=None, stdout=None) -> None:
    """One JSON document per line; responses on stdout, logs on stderr.

    Blank lines are ignored.  EOF ends the loop."""
    server = server or Server()
    stdin = stdin if stdin is not None else sys.stdin
    stdout = stdout if stdout is not None else sys.stdout
    for line in stdin:
        line = line.strip()
        if not line:
            continue
        response = server.dispatch_line(line)
        if response is not None:
            stdout.write(response + "\n")
            stdout.flush()


async def serve_websocket(server: Optional[Server] = None, host: str = "127.0.0.1", port: int = 8890):
    """One JSON document per text frame; same semantics as stdio."""
    import asyncio

    import websockets

    server = server or Server()

    async def handle(ws):
        async for message in ws:
            response = await asyncio.to_thread(server.dispatch_line, message)
            if response is not None:
                await ws.send(response)

    async with websockets.serve(handle, host, port):
        log.info("listening on ws://%s:%d", host, port)
        await asyncio.Event().wait()


def run_websocket(server: Optional[Server] = None, host: str = "127.0.0.1", port: int = 8890) -> None:
    import asyncio

    asyncio.run(serve_websocket(server, host, port))
