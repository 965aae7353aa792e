import json
import socket
import threading

import pytest

import intentlang as il
from intentlang.service import EngineService, TCPServer


@pytest.fixture
def svc():
    return EngineService()


def _new(svc, world="move_take.world", profile="hypertext", seed=0):
    reply = svc.handle({
        "op": "new_session",
        "world": il.data_path(world),
        "profile": profile,
        "seed": seed,
    })
    assert reply["ok"], reply
    return reply["data"]["session"]


class TestSessionOps:
    def test_new_session_then_list_intents(self, svc):
        sid = _new(svc)
        reply = svc.handle({"op": "list_intents", "session": sid})
        ids = [c["id"] for c in reply["data"]["choices"]]
        assert ids == [
            "go_east_from_lab", "go_south_from_lab", "go_west_from_lab",
            "take_flask_from_lab",
        ]

    def test_step_take_twice(self, svc):
        sid = _new(svc)
        first = svc.handle({"op": "step", "session": sid,
                            "intent": "take flask"})
        again = svc.handle({"op": "step", "session": sid,
                            "intent": "take flask"})
        assert first["data"]["verdict"] == "success"
        assert again["data"]["verdict"] == "failure"

    def test_unknown_op_leaves_state_alone(self, svc):
        sid = _new(svc)
        before = svc.handle({"op": "get_state", "session": sid})
        reply = svc.handle({"op": "frobnicate", "session": sid})
        assert not reply["ok"]
        assert reply["error"]["code"] == "unknown_op"
        after = svc.handle({"op": "get_state", "session": sid})
        assert before["data"]["digest"] == after["data"]["digest"]

    def test_malformed_line_answered(self, svc):
        reply = svc.handle_line("{nope")
        assert not reply["ok"]
        assert reply["error"]["code"] == "parse"

    def test_parse_error_reported(self, svc):
        sid = _new(svc)
        reply = svc.handle({"op": "step", "session": sid, "intent": "take"})
        assert not reply["ok"]
        assert reply["error"]["code"] == "parse_error"

    def test_close_session(self, svc):
        sid = _new(svc)
        svc.handle({"op": "close_session", "session": sid})
        reply = svc.handle({"op": "get_state", "session": sid})
        assert not reply["ok"]
        assert reply["error"]["code"] == "no_session"

    def test_choose_by_id(self, svc):
        sid = _new(svc)
        reply = svc.handle({"op": "choose", "session": sid,
                            "choice": "take_flask_from_lab"})
        assert reply["data"]["verdict"] == "success"
        stale = svc.handle({"op": "choose", "session": sid,
                            "choice": "take_flask_from_lab"})
        assert not stale["ok"]
        assert stale["error"]["code"] == "unknown_choice"

    def test_click_elaboration(self, svc):
        sid = _new(svc, profile="birdseye")
        reply = svc.handle({"op": "click", "session": sid,
                            "target": "library"})
        assert reply["data"]["intent"] == "move south"
        rejected = svc.handle({"op": "click", "session": sid,
                               "target": "quarters"})
        assert rejected["data"]["rejected"] == "out-of-range"

    def test_key_mapping(self, svc):
        sid = _new(svc, profile="wasd")
        reply = svc.handle({"op": "key", "session": sid, "key": "e"})
        assert reply["data"]["verdict"] == "success"  # collect the flask
        ignored = svc.handle({"op": "key", "session": sid, "key": "q"})
        assert ignored["data"] == {"ignored": True, "key": "q"}

    def test_run_skill_over_protocol(self, svc):
        sid = _new(svc, world="farm.world", profile="farm", seed=42)
        with open(il.data_path("farm_library.skills")) as fh:
            source = fh.read()
        reply = svc.handle({
            "op": "run_skill", "session": sid, "source": source,
            "entry": "grow_crop", "args": {"s": "plot_1", "w": "can_1"},
            "type_args": {"t": "parsnip"},
        })
        assert reply["ok"], reply
        assert reply["data"]["outcome"] == "produced"
        assert reply["data"]["bindings"]["result"][0] == "crop(parsnip)"
        trace = svc.handle({"op": "get_trace", "session": sid})
        assert len(trace["data"]["entries"]) == reply["data"]["steps"]


class TestProtocolProperties:
    SCRIPT = [
        {"op": "list_intents"},
        {"op": "step", "intent": "move north"},
        {"op": "step", "intent": "take flask"},
        {"op": "step", "intent": "move south"},
        {"op": "list_intents"},
        {"op": "get_state"},
        {"op": "get_trace"},
    ]

    def _run_script(self, svc, sid):
        out = []
        for msg in self.SCRIPT:
            out.append(json.dumps(
                svc.handle({**msg, "session": sid}), sort_keys=True))
        return out

    def test_deterministic_responses(self):
        a = EngineService()
        b = EngineService()
        ra = self._run_script(a, _new(a))
        rb = self._run_script(b, _new(b))
        assert ra == rb

    def test_session_isolation(self):
        serial = EngineService()
        s1 = _new(serial)
        r1 = self._run_script(serial, s1)
        s2 = _new(serial)
        r2 = self._run_script(serial, s2)

        interleaved = EngineService()
        t1, t2 = _new(interleaved), _new(interleaved)
        i1, i2 = [], []
        for msg in self.SCRIPT:
            i1.append(json.dumps(
                interleaved.handle({**msg, "session": t1}), sort_keys=True))
            i2.append(json.dumps(
                interleaved.handle({**msg, "session": t2}), sort_keys=True))
        assert [x.replace(s1, t1) for x in r1] == i1
        assert [x.replace(s2, t2) for x in r2] == i2

    def test_every_step_lands_in_trace_and_replays(self, svc):
        sid = _new(svc, world="farm.world", profile="farm", seed=5)
        commands = ["select rod_1", "move_near water_1", "apply water_1",
                    "wait", "apply water_1", "select hoe"]
        for command in commands:
            svc.handle({"op": "step", "session": sid, "intent": command})
        got = svc.handle({"op": "get_trace", "session": sid})["data"]
        assert [e["intent"] for e in got["entries"]] == commands
        lines = [json.dumps({"world_ref": got["world_ref"],
                             "seed": got["seed"]})]
        lines += [json.dumps(e) for e in got["entries"]]
        trace = il.from_jsonl("\n".join(lines))
        fresh = il.load_world_file(il.data_path("farm.world"))
        assert il.replay(fresh, trace).exact


class TestTCPTransport:
    def test_line_protocol_roundtrip(self):
        service = EngineService()
        server = TCPServer(("127.0.0.1", 0), service)
        thread = threading.Thread(target=server.serve_forever, daemon=True)
        thread.start()
        try:
            host, port = server.server_address
            with socket.create_connection((host, port), timeout=5) as conn:
                fh = conn.makefile("rw", encoding="utf-8")
                msgs = [
                    {"op": "new_session",
                     "world": il.data_path("move_take.world"),
                     "profile": "cli", "seed": 0},
                ]
                fh.write(json.dumps(msgs[0]) + "\n")
                fh.flush()
                opened = json.loads(fh.readline())
                assert opened["ok"]
                sid = opened["data"]["session"]
                fh.write(json.dumps({"op": "step", "session": sid,
                                     "intent": "take flask"}) + "\n")
                fh.flush()
                stepped = json.loads(fh.readline())
                assert stepped["data"]["verdict"] == "success"
                fh.write("???\n")
                fh.flush()
                bad = json.loads(fh.readline())
                assert not bad["ok"]
        finally:
            server.shutdown()
            server.server_close()
