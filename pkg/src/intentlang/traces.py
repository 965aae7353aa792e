"""Play traces: structured logs of (intent, response, digest) triples with
deterministic replay and sequence-pattern queries."""

from __future__ import annotations

import json
from dataclasses import dataclass

from . import intents as it
from .step import StepResult, safe_step
from .worlds import GameState, initial_state, state_digest


class TraceFormatError(ValueError):
    pass


class PatternError(ValueError):
    def __init__(self, message: str, offset: int):
        super().__init__(message)
        self.offset = offset


@dataclass(frozen=True)
class TraceEntry:
    index: int
    intent: it.CoreIntent
    verdict: str
    message: str
    digest: str  # state digest after the step


@dataclass(frozen=True)
class Trace:
    world_ref: str  # digest of the world document
    seed: int
    entries: tuple[TraceEntry, ...] = ()


def new_trace(state: GameState) -> Trace:
    return Trace(world_ref=state.world.digest(), seed=state.rng_seed)


def record(trace: Trace, intent: it.CoreIntent, result: StepResult) -> Trace:
    entry = TraceEntry(
        index=len(trace.entries),
        intent=intent,
        verdict=result.resp.verdict,
        message=result.resp.message,
        digest=state_digest(result.next),
    )
    return Trace(trace.world_ref, trace.seed, trace.entries + (entry,))


# ---------------------------------------------------------------------------
# Serialization: JSON Lines, one header line then one line per entry


def to_jsonl(trace: Trace) -> str:
    lines = [json.dumps({"world_ref": trace.world_ref, "seed": trace.seed})]
    for e in trace.entries:
        lines.append(json.dumps({
            "i": e.index,
            "intent": it.pretty(e.intent),
            "verdict": e.verdict,
            "message": e.message,
            "digest": e.digest,
        }))
    return "\n".join(lines) + "\n"


def from_jsonl(text: str) -> Trace:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise TraceFormatError("empty trace file")
    try:
        header = json.loads(lines[0])
        entries = []
        for n, line in enumerate(lines[1:]):
            raw = json.loads(line)
            intent = it.parse_command_line(raw["intent"])
            if isinstance(intent, it.ParseError):
                raise TraceFormatError(
                    f"line {n + 2}: bad intent {raw['intent']!r}")
            entries.append(TraceEntry(
                index=raw["i"],
                intent=intent,
                verdict=raw["verdict"],
                message=raw["message"],
                digest=raw["digest"],
            ))
    except (json.JSONDecodeError, KeyError, TypeError) as exc:
        raise TraceFormatError(f"malformed trace file: {exc}") from exc
    for n, e in enumerate(entries):
        if e.index != n:
            raise TraceFormatError(f"entry indices not contiguous at {n}")
    return Trace(header["world_ref"], header["seed"], tuple(entries))


# ---------------------------------------------------------------------------
# Replay


@dataclass(frozen=True)
class ReplayOutcome:
    exact: bool
    diverged_at: int | None = None
    expected: str | None = None
    got: str | None = None

    def describe(self) -> str:
        if self.exact:
            return "exact"
        return (f"diverged at {self.diverged_at}: expected {self.expected}, "
                f"got {self.got}")


def replay(fresh: GameState, trace: Trace) -> ReplayOutcome:
    """Re-step a trace from a freshly loaded world; exact iff every entry's
    verdict and digest match. A verdict mismatch names the divergence point
    in preference to digest drift, which it usually explains."""
    if fresh.world.digest() != trace.world_ref:
        raise ValueError("trace was recorded against a different world")
    state = initial_state(fresh.world, seed=trace.seed)
    digest_mismatch: ReplayOutcome | None = None
    for e in trace.entries:
        result = safe_step(state, e.intent)
        got = (result.resp.verdict, state_digest(result.next))
        if got[0] != e.verdict:
            return ReplayOutcome(False, e.index,
                                 expected=e.verdict, got=got[0])
        if got[1] != e.digest and digest_mismatch is None:
            digest_mismatch = ReplayOutcome(
                False, e.index,
                expected=f"digest {e.digest[:12]}",
                got=f"digest {got[1][:12]}")
        state = result.next
    return digest_mismatch or ReplayOutcome(True)


# ---------------------------------------------------------------------------
# Pattern queries


GAP = "..."


@dataclass(frozen=True)
class StepPattern:
    verb: str | None  # None matches any verb
    args: tuple[str, ...] | None  # None matches any argument list
    verdict: str | None  # None matches either verdict


@dataclass(frozen=True)
class TracePattern:
    steps: tuple  # StepPattern or GAP markers


_VERDICTS = {"ok": "success", "success": "success",
             "fail": "failure", "failure": "failure"}


def parse_pattern(text: str) -> TracePattern:
    """Parse `take flask => ok ; ... ; move _ => fail` style patterns."""
    steps: list = []
    offset = 0
    chunks = text.split(";")
    for chunk in chunks:
        stripped = chunk.strip()
        at = offset + (len(chunk) - len(chunk.lstrip()))
        offset += len(chunk) + 1
        if not stripped:
            raise PatternError("empty pattern step", at)
        if stripped == GAP:
            if steps and steps[-1] == GAP:
                raise PatternError("adjacent '...' gaps", at)
            steps.append(GAP)
            continue
        if "=>" in stripped:
            head, _, verdict_text = stripped.partition("=>")
            verdict_text = verdict_text.strip()
            if verdict_text not in _VERDICTS:
                raise PatternError(
                    f"bad verdict {verdict_text!r}", at + len(head) + 2)
            verdict = _VERDICTS[verdict_text]
        else:
            head, verdict = stripped, None
        tokens = head.split()
        if not tokens:
            raise PatternError("pattern step lacks a verb", at)
        verb = tokens[0]
        if verb == "go":
            verb = "move"
        if verb != "_" and verb not in {
                "move", "take", "collect", "wait", "select", "apply",
                "inquire", "move_near", "move_offscreen"}:
            raise PatternError(f"unknown verb {verb!r}", at)
        args = tuple(tokens[1:]) if len(tokens) > 1 else None
        steps.append(StepPattern(verb if verb != "_" else None, args, verdict))
    if not steps:
        raise PatternError("empty pattern", 0)
    return TracePattern(tuple(steps))


def _entry_matches(entry: TraceEntry, pat: StepPattern) -> bool:
    if pat.verb is not None and it.verb_of(entry.intent) != pat.verb:
        return False
    if pat.args is not None:
        actual = it.args_of(entry.intent)
        if len(actual) != len(pat.args):
            return False
        for want, got in zip(pat.args, actual):
            if want != "_" and want != got:
                return False
    if pat.verdict is not None and entry.verdict != pat.verdict:
        return False
    return True


def query(trace: Trace, pattern: TracePattern) -> list[tuple[int, int]]:
    """All non-overlapping leftmost matches as (start, end) index spans."""
    entries = trace.entries
    spans: list[tuple[int, int]] = []
    i = 0
    while i < len(entries):
        end = _match_from(entries, i, pattern.steps)
        if end is not None:
            spans.append((i, end))
            i = end + 1
        else:
            i += 1
    return spans


def _match_from(entries: tuple[TraceEntry, ...], start: int,
                steps: tuple) -> int | None:
    """Shortest match of `steps` anchored at `start`; end index inclusive."""

    def go(pos: int, k: int) -> int | None:
        if k == len(steps):
            return pos - 1 if pos > start else start - 1
        step_pat = steps[k]
        if step_pat == GAP:
            for skip in range(len(entries) - pos + 1):
                end = go(pos + skip, k + 1)
                if end is not None:
                    return end
            return None
        if pos >= len(entries) or not _entry_matches(entries[pos], step_pat):
            return None
        return go(pos + 1, k + 1)

    end = go(start, 0)
    if end is None or end < start:
        # a pattern of only gaps matches nothing; demand one real entry
        return None
    return end
