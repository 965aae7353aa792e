"""Interactive play loops for each surface interface."""

from __future__ import annotations

import sys

from . import intents as it
from . import traces
from .step import format_response, safe_step
from .worlds import GameState


def run_repl(state: GameState, profile: str = "cli", inp=None, out=None,
             seed: int | None = None) -> traces.Trace:
    """Read player input line by line until EOF or :quit.

    Every executed step prints a PLAYER/GAME transcript pair followed by
    the formatted response. Meta commands: :quit, :trace, :save <file>.
    """
    inp = inp or sys.stdin
    out = out or sys.stdout
    if seed is not None:
        state = state.replace(rng_seed=seed)
    trace = traces.new_trace(state)

    def emit(line: str) -> None:
        out.write(line + "\n")
        out.flush()

    if profile == "hypertext":
        _print_choices(state, emit)
    elif profile == "wasd":
        emit("keys: w/a/s/d move, e collects; :quit leaves")

    for raw in inp:
        line = raw.strip()
        if not line:
            continue
        if line == ":quit":
            break
        if line == ":trace":
            for entry in trace.entries:
                emit(f"{entry.index}: {it.pretty(entry.intent)} "
                     f"-> {entry.verdict}")
            continue
        if line.startswith(":save"):
            parts = line.split(None, 1)
            if len(parts) != 2:
                emit("usage: :save <file>")
                continue
            with open(parts[1], "w", encoding="utf-8") as fh:
                fh.write(traces.to_jsonl(trace))
            emit(f"saved {len(trace.entries)} entries to {parts[1]}")
            continue

        intent, echo = _elaborate(state, profile, line, emit)
        if intent is None:
            continue
        result = safe_step(state, intent)
        trace = traces.record(trace, intent, result)
        state = result.next
        emit(f"PLAYER: {echo}")
        emit(f"GAME: {result.resp.verdict}")
        emit(format_response(result.resp))
        if profile == "hypertext":
            _print_choices(state, emit)
    return trace


def _elaborate(state: GameState, profile: str, line: str, emit
               ) -> tuple[it.CoreIntent | None, str]:
    if profile in ("cli", "farm"):
        intent = it.parse_command_line(line)
        if isinstance(intent, it.ParseError):
            emit(f"parse error at {intent.offset}: {intent.message}")
            return None, line
        return intent, line
    if profile == "hypertext":
        choices = it.enumerate_choices(state)
        try:
            index = int(line)
        except ValueError:
            emit("enter a link number")
            return None, line
        if not 1 <= index <= len(choices):
            emit(f"choose 1..{len(choices)}")
            return None, line
        chosen = choices[index - 1]
        return chosen.intent, chosen.id
    if profile == "wasd":
        intent = it.map_key(line.split()[0])
        if isinstance(intent, it.Unbound):
            return None, line  # unbound keys are silently ignored
        return intent, it.pretty(intent)
    if profile == "birdseye":
        if line not in state.entities and line not in state.world.rooms:
            emit(f"unknown target {line!r}")
            return None, line
        elaborated = it.elaborate_click(state, line)
        if isinstance(elaborated, it.ClickRejected):
            emit(f"click rejected ({elaborated.reason})")
            return None, line
        return elaborated, f"click {line}"
    emit(f"unknown profile {profile!r}")
    return None, line


def _print_choices(state: GameState, emit) -> None:
    choices = it.enumerate_choices(state)
    if not choices:
        emit("no actions available")
        return
    for n, choice in enumerate(choices, start=1):
        emit(f"{n}) {choice.id}")
