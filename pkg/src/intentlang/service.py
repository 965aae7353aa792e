"""Session management and the newline-delimited JSON wire protocol."""

from __future__ import annotations

import json
import os
import socketserver
import sys
import threading
from dataclasses import dataclass, field
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

from . import intents as it
from . import traces
from .skills import parse_skills, run_skill, typecheck_skill
from .skills.ast import Produced
from .skills.interp import SkillArgumentError
from .skills.parser import SkillParseError
from .step import safe_step
from .worlds import GameState, WorldError, load_world_file, state_digest

PROFILES = ("cli", "wasd", "birdseye", "hypertext", "farm")


@dataclass
class Session:
    id: str
    state: GameState
    trace: traces.Trace
    profile: str
    lock: threading.Lock = field(default_factory=threading.Lock)


def _ok(data: dict) -> dict:
    return {"ok": True, "data": data}


def _err(code: str, message: str) -> dict:
    return {"ok": False, "error": {"code": code, "message": message}}


class EngineService:
    """Dispatches protocol messages; sessions are isolated and each
    session's requests are serialized in arrival order."""

    def __init__(self, world_dir: str | None = None):
        self.world_dir = world_dir
        self.sessions: dict[str, Session] = {}
        self._lock = threading.Lock()
        self._counter = 0

    # -- plumbing ---------------------------------------------------------

    def handle_line(self, line: str) -> dict:
        try:
            msg = json.loads(line)
        except json.JSONDecodeError as exc:
            return _err("parse", f"malformed message: {exc}")
        if not isinstance(msg, dict) or "op" not in msg:
            return _err("parse", "message must be an object with an 'op'")
        return self.handle(msg)

    def handle(self, msg: dict) -> dict:
        op = msg.get("op")
        handler = getattr(self, f"op_{op}", None)
        if handler is None:
            return _err("unknown_op", f"unknown op {op!r}")
        if op == "new_session":
            return handler(msg)
        session = self.sessions.get(msg.get("session", ""))
        if session is None:
            return _err("no_session", "unknown or closed session")
        with session.lock:
            try:
                return handler(session, msg)
            except Exception as exc:  # per-message errors never kill the loop
                return _err("internal", f"{type(exc).__name__}: {exc}")

    def _resolve_world(self, name: str) -> str:
        if self.world_dir is not None:
            candidate = os.path.join(self.world_dir, name)
            if os.path.exists(candidate):
                return candidate
        return name

    # -- session ops -------------------------------------------------------

    def op_new_session(self, msg: dict) -> dict:
        profile = msg.get("profile", "cli")
        if profile not in PROFILES:
            return _err("bad_profile", f"profile must be one of {PROFILES}")
        try:
            state = load_world_file(self._resolve_world(msg["world"]))
        except KeyError:
            return _err("bad_request", "new_session needs a 'world'")
        except (OSError, WorldError) as exc:
            return _err("bad_world", str(exc))
        if "seed" in msg:
            state = state.replace(rng_seed=int(msg["seed"]))
        with self._lock:
            self._counter += 1
            session = Session(
                id=f"s{self._counter}",
                state=state,
                trace=traces.new_trace(state),
                profile=profile,
            )
            self.sessions[session.id] = session
        return _ok({
            "session": session.id,
            "world_ref": state.world.digest(),
            "digest": state_digest(state),
            "player_room": state.player_room,
        })

    def op_close_session(self, session: Session, msg: dict) -> dict:
        with self._lock:
            self.sessions.pop(session.id, None)
        return _ok({"closed": True})

    def op_get_state(self, session: Session, msg: dict) -> dict:
        state = session.state
        return _ok({
            "player_room": state.player_room,
            "day": state.day,
            "rooms": sorted(state.world.rooms),
            "start": state.world.start,
            "adjacency": sorted(
                [r, d, t] for (r, d), t in state.world.adjacency.items()),
            "locations": dict(sorted(state.locations.items())),
            "entities": dict(sorted(state.entities.items())),
            "inventory": state.inventory(),
            "selected": state.selected,
            "digest": state_digest(state),
        })

    def op_list_intents(self, session: Session, msg: dict) -> dict:
        choices = it.enumerate_choices(session.state)
        return _ok({
            "choices": [
                {"id": c.id, "label": c.label, "intent": it.pretty(c.intent)}
                for c in choices
            ]
        })

    # -- stepping ------------------------------------------------------------

    def _apply(self, session: Session, intent: it.CoreIntent) -> dict:
        result = safe_step(session.state, intent)
        session.trace = traces.record(session.trace, intent, result)
        session.state = result.next
        return {
            "index": len(session.trace.entries) - 1,
            "intent": it.pretty(intent),
            "verdict": result.resp.verdict,
            "message": result.resp.message,
            "payload": [[str(t), e] for t, e in result.resp.payload],
            "digest": state_digest(result.next),
        }

    def op_step(self, session: Session, msg: dict) -> dict:
        text = msg.get("intent", "")
        intent = it.parse_command_line(text)
        if isinstance(intent, it.ParseError):
            return _err("parse_error",
                        f"{intent.kind} at {intent.offset}: {intent.message}")
        return _ok(self._apply(session, intent))

    def op_choose(self, session: Session, msg: dict) -> dict:
        wanted = msg.get("choice", "")
        for choice in it.enumerate_choices(session.state):
            if choice.id == wanted:
                return _ok(self._apply(session, choice.intent))
        return _err("unknown_choice", f"no current choice {wanted!r}")

    def op_key(self, session: Session, msg: dict) -> dict:
        intent = it.map_key(msg.get("key", ""))
        if isinstance(intent, it.Unbound):
            return _ok({"ignored": True, "key": intent.key})
        return _ok(self._apply(session, intent))

    def op_click(self, session: Session, msg: dict) -> dict:
        target = msg.get("target", "")
        if target not in session.state.entities and \
                target not in session.state.world.rooms:
            return _err("bad_target", f"unknown click target {target!r}")
        elaborated = it.elaborate_click(session.state, target)
        if isinstance(elaborated, it.ClickRejected):
            return _ok({"rejected": elaborated.reason, "target": target})
        return _ok(self._apply(session, elaborated))

    # -- skills and traces -----------------------------------------------------

    def op_run_skill(self, session: Session, msg: dict) -> dict:
        try:
            defs = parse_skills(msg.get("source", ""))
        except SkillParseError as exc:
            return _err("skill_parse", str(exc))
        errors = typecheck_skill(defs, session.state.world)
        if errors:
            return _err("skill_type", "; ".join(str(e) for e in errors))
        try:
            state, outcome, skill_trace = run_skill(
                session.state, defs, msg.get("entry", ""),
                args=msg.get("args", {}),
                type_args=msg.get("type_args", {}),
                par_right_first=bool(msg.get("par_right_first", False)),
            )
        except SkillArgumentError as exc:
            return _err("skill_args", str(exc))
        session.state = state
        base = len(session.trace.entries)
        appended = tuple(
            traces.TraceEntry(base + n, e.intent, e.verdict, e.message,
                              e.digest)
            for n, e in enumerate(skill_trace.entries)
        )
        session.trace = traces.Trace(
            session.trace.world_ref, session.trace.seed,
            session.trace.entries + appended)
        if isinstance(outcome, Produced):
            data = {
                "outcome": "produced",
                "bindings": {
                    var: [str(t), e]
                    for var, (t, e) in outcome.bindings.items()
                },
            }
        else:
            data = {"outcome": "failed", "at": outcome.at,
                    "reason": outcome.reason}
        data["steps"] = len(skill_trace.entries)
        data["digest"] = state_digest(state)
        return _ok(data)

    def op_get_trace(self, session: Session, msg: dict) -> dict:
        trace = session.trace
        return _ok({
            "world_ref": trace.world_ref,
            "seed": trace.seed,
            "entries": [
                {
                    "i": e.index,
                    "intent": it.pretty(e.intent),
                    "verdict": e.verdict,
                    "message": e.message,
                    "digest": e.digest,
                }
                for e in trace.entries
            ],
        })


# ---------------------------------------------------------------------------
# Transports


def serve_stdio(service: EngineService, stdin=None, stdout=None) -> None:
    stdin = stdin or sys.stdin
    stdout = stdout or sys.stdout
    for line in stdin:
        if not line.strip():
            continue
        response = service.handle_line(line)
        stdout.write(json.dumps(response) + "\n")
        stdout.flush()


class _LineHandler(socketserver.StreamRequestHandler):
    def handle(self):
        while True:
            line = self.rfile.readline()
            if not line:
                break
            text = line.decode("utf-8", errors="replace").strip()
            if not text:
                continue
            response = self.server.service.handle_line(text)
            self.wfile.write((json.dumps(response) + "\n").encode("utf-8"))


class TCPServer(socketserver.ThreadingTCPServer):
    allow_reuse_address = True
    daemon_threads = True

    def __init__(self, address, service: EngineService):
        super().__init__(address, _LineHandler)
        self.service = service


class _HTTPHandler(BaseHTTPRequestHandler):
    def _respond(self, payload: dict, status: int = 200) -> None:
        blob = json.dumps(payload).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(blob)))
        self.send_header("Access-Control-Allow-Origin", "*")
        self.send_header("Access-Control-Allow-Headers", "Content-Type")
        self.end_headers()
        self.wfile.write(blob)

    def do_OPTIONS(self):
        self._respond({"ok": True, "data": {}})

    def do_POST(self):
        length = int(self.headers.get("Content-Length", 0))
        body = self.rfile.read(length).decode("utf-8")
        self._respond(self.server.service.handle_line(body))

    def log_message(self, *args):
        pass


class HTTPServer(ThreadingHTTPServer):
    daemon_threads = True

    def __init__(self, address, service: EngineService):
        super().__init__(address, _HTTPHandler)
        self.service = service


def serve(world_dir: str | None, listen: str | None = None,
          http: bool = False) -> None:
    """Run the service until interrupted: stdio when no address is given,
    else line-delimited TCP, or single-message-per-request HTTP."""
    service = EngineService(world_dir)
    if listen is None:
        serve_stdio(service)
        return
    host, _, port = listen.rpartition(":")
    address = (host or "127.0.0.1", int(port))
    server_cls = HTTPServer if http else TCPServer
    with server_cls(address, service) as server:
        actual = server.server_address
        print(f"listening on {actual[0]}:{actual[1]}", flush=True)
        server.serve_forever()
