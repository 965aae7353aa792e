import random

import pytest
import intentlang as il
from intentlang import intents as it
from intentlang import traces
from intentlang.intents import candidate_intents


def _paper_trace(g0):
    trace = traces.new_trace(g0)
    state = g0
    for command in ("go north", "take flask", "go south"):
        intent = il.parse_command_line(command)
        result = il.safe_step(state, intent)
        trace = traces.record(trace, intent, result)
        state = result.next
    return trace, state


class TestRecord:
    def test_session_transcript_as_data(self, g0):
        trace, _ = _paper_trace(g0)
        got = [(it.pretty(e.intent), e.verdict) for e in trace.entries]
        assert got == [
            ("move north", "failure"),
            ("take flask", "success"),
            ("move south", "success"),
        ]

    def test_empty_trace(self, g0):
        assert traces.new_trace(g0).entries == ()

    def test_indices_contiguous(self, g0):
        rng = random.Random(5)
        trace = traces.new_trace(g0)
        state = g0
        for _ in range(1000):
            intent = rng.choice(candidate_intents(state))
            result = il.safe_step(state, intent)
            trace = traces.record(trace, intent, result)
            state = result.next
        assert [e.index for e in trace.entries] == list(range(1000))


class TestReplay:
    def test_recorded_session_replays_exact(self, g0):
        trace, _ = _paper_trace(g0)
        assert traces.replay(g0, trace).exact

    def test_moved_item_diverges(self, g0, move_take_doc):
        trace, _ = _paper_trace(g0)
        import copy

        doc = copy.deepcopy(move_take_doc)
        for ent in doc["entities"]:
            if ent["name"] == "flask":
                ent["room"] = "courtyard"
        moved = il.load_world(doc)
        # digest of the altered world differs: replay refuses the mismatch
        with pytest.raises(ValueError):
            traces.replay(moved, trace)
        # force the header through to observe divergence at the take step
        forged = traces.Trace(moved.world.digest(), trace.seed, trace.entries)
        outcome = traces.replay(moved, forged)
        assert not outcome.exact
        assert outcome.diverged_at == 1

    def test_empty_trace_replays_exact(self, g0):
        assert traces.replay(g0, traces.new_trace(g0)).exact

    def test_random_sessions_replay_exact(self, g0, farm0):
        rng = random.Random(99)
        for base in (g0, farm0):
            for _ in range(20):
                state = base
                trace = traces.new_trace(base)
                for _ in range(30):
                    intent = rng.choice(candidate_intents(state))
                    result = il.safe_step(state, intent)
                    trace = traces.record(trace, intent, result)
                    state = result.next
                assert traces.replay(base, trace).exact


class TestSerialization:
    def test_roundtrip_paper_trace(self, g0):
        trace, _ = _paper_trace(g0)
        assert traces.from_jsonl(traces.to_jsonl(trace)) == trace

    def test_roundtrip_random_traces(self, farm0):
        rng = random.Random(4)
        state = farm0
        trace = traces.new_trace(farm0)
        for _ in range(60):
            intent = rng.choice(candidate_intents(state))
            result = il.safe_step(state, intent)
            trace = traces.record(trace, intent, result)
            state = result.next
        assert traces.from_jsonl(traces.to_jsonl(trace)) == trace

    def test_malformed_file_rejected(self):
        with pytest.raises(traces.TraceFormatError):
            traces.from_jsonl("not json\n")
        with pytest.raises(traces.TraceFormatError):
            traces.from_jsonl("")


class TestPatternParsing:
    def test_gap_rules(self):
        with pytest.raises(traces.PatternError):
            traces.parse_pattern("... ; ...")
        with pytest.raises(traces.PatternError):
            traces.parse_pattern("")

    def test_unknown_verb_offset(self):
        with pytest.raises(traces.PatternError) as info:
            traces.parse_pattern("take flask ; frob x")
        assert info.value.offset == len("take flask ; ")

    def test_verdict_aliases(self):
        pattern = traces.parse_pattern("move _ => fail")
        assert pattern.steps[0].verdict == "failure"
        pattern = traces.parse_pattern("take flask => ok")
        assert pattern.steps[0].verdict == "success"


class TestQuery:
    def test_failure_move(self, g0):
        trace, _ = _paper_trace(g0)
        spans = traces.query(trace, traces.parse_pattern("move _ => failure"))
        assert spans == [(0, 0)]

    def test_gap_pattern(self, g0):
        trace, _ = _paper_trace(g0)
        pattern = traces.parse_pattern("take flask ; ... ; move south")
        assert traces.query(trace, pattern) == [(1, 2)]

    def test_absent_verb(self, g0):
        trace, _ = _paper_trace(g0)
        assert traces.query(trace, traces.parse_pattern("collect")) == []

    def test_single_wildcard_matches_each_entry_once(self, g0):
        trace, _ = _paper_trace(g0)
        spans = traces.query(trace, traces.parse_pattern("_"))
        assert spans == [(0, 0), (1, 1), (2, 2)]

    def test_spans_are_sorted_nonoverlapping_in_bounds(self, farm0):
        rng = random.Random(12)
        state = farm0
        trace = traces.new_trace(farm0)
        for _ in range(80):
            intent = rng.choice(candidate_intents(state))
            result = il.safe_step(state, intent)
            trace = traces.record(trace, intent, result)
            state = result.next
        for text in ("_ ; _", "select _ ; ... ; apply _", "wait => ok",
                     "_ => fail"):
            spans = traces.query(trace, traces.parse_pattern(text))
            last_end = -1
            for start, end in spans:
                assert 0 <= start <= end < len(trace.entries)
                assert start > last_end
                last_end = end

    def test_gap_is_nongreedy_leftmost(self, g0):
        trace, _ = _paper_trace(g0)
        # "anything ... anything" should pair (0,1), leaving (2,) unmatched
        pattern = traces.parse_pattern("_ ; ... ; _")
        assert traces.query(trace, pattern) == [(0, 1)]
