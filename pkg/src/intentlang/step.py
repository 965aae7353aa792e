"""The game-step relation as a total, deterministic function, plus the
exhaustive totality checker."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from . import intents as it
from .resources import ResourceType
from .worlds import (
    GameState,
    HoldsItem,
    PlayerNear,
    UndeclaredName,
    holds,
    player_move,
    player_take,
    state_digest,
)

Payload = tuple[tuple[ResourceType, str], ...]

MSG_TAKEN = "Taken."
MSG_NO_WAY = "You can't go that way."
MSG_ALREADY_HELD = "You already have it."
MSG_NOT_HERE = "There is nothing like that here."
MSG_NOT_PORTABLE = "You can't take that."
MSG_EMPTY_ROOM = "There is nothing here to take."
MSG_NO_EFFECT = "Nothing happens."


@dataclass(frozen=True)
class Response:
    """The game's formal reply: a verdict, typed resources, and a message."""

    verdict: str  # "success" | "failure"
    payload: Payload = ()
    message: str = ""

    def __post_init__(self):
        assert self.verdict in ("success", "failure")
        assert self.message, "responses carry a display message"
        assert not (self.verdict == "failure" and self.payload)


@dataclass(frozen=True)
class StepResult:
    next: GameState
    resp: Response


def success(state: GameState, message: str, payload: Payload = ()) -> StepResult:
    return StepResult(state, Response("success", payload, message))


def failure(state: GameState, message: str) -> StepResult:
    # Failure never changes the state: callers pass the input state through.
    return StepResult(state, Response("failure", (), message))


def format_response(resp: Response) -> str:
    """Single stable line for trace logs and the REPL."""
    tag = "ok" if resp.verdict == "success" else "fail"
    line = f"{tag}: {resp.message}"
    if resp.payload:
        line += " [" + ", ".join(str(t) for t, _ in resp.payload) + "]"
    return line


def step(state: GameState, intent: it.CoreIntent) -> StepResult:
    """Apply one player intent. Exactly one rule fires per (state, intent);
    undeclared identifiers are engine errors, not failure responses."""
    match intent:
        case it.Move(d) | it.MoveOffscreen(d):
            return _step_move(state, d)
        case it.Take(o):
            return _step_take(state, o)
        case it.Collect():
            return _step_collect(state)
        case _:
            from . import farm

            if state.world.is_farm:
                return farm.step_farm(state, intent)
            return failure(state, MSG_NO_EFFECT)


def _step_move(state: GameState, direction: str) -> StepResult:
    if direction not in ("north", "south", "east", "west"):
        raise UndeclaredName(f"undeclared direction {direction!r}")
    if (state.player_room, direction) not in state.world.adjacency:
        return failure(state, MSG_NO_WAY)
    nxt = player_move(state, direction)
    return success(nxt, f"You go {direction}.")


def _step_take(state: GameState, entity: str) -> StepResult:
    if entity not in state.entities:
        raise UndeclaredName(f"undeclared entity {entity!r}")
    if state.entities[entity] != "item":
        return failure(state, MSG_NOT_PORTABLE)
    if holds(state, HoldsItem(entity)):
        return failure(state, MSG_ALREADY_HELD)
    if not holds(state, PlayerNear(entity)):
        return failure(state, MSG_NOT_HERE)
    return success(player_take(state, entity), MSG_TAKEN)


def _step_collect(state: GameState) -> StepResult:
    items = [
        n for n in state.entities_in(state.player_room)
        if state.entities[n] == "item"
    ]
    if not items:
        return failure(state, MSG_EMPTY_ROOM)
    for name in items:  # already lexicographic
        state = player_take(state, name)
    return success(state, f"Taken: {', '.join(items)}.")


def safe_step(state: GameState, intent: it.CoreIntent) -> StepResult:
    """Like step, but undeclared nouns answer with a failure response.

    Surface interfaces admit parseable-but-meaningless nouns; sessions must
    respond rather than crash.
    """
    for arg in it.args_of(intent):
        if arg in ("north", "south", "east", "west"):
            continue
        if arg not in state.entities:
            return failure(state, f"You don't see any '{arg}' here.")
    return step(state, intent)


# ---------------------------------------------------------------------------
# Totality checking


@dataclass
class TotalityReport:
    states: int = 0
    pairs: int = 0
    undefined: list[dict] = field(default_factory=list)
    truncated: bool = False

    @property
    def ok(self) -> bool:
        return not self.undefined

    def to_json(self) -> str:
        return json.dumps(
            {
                "states": self.states,
                "pairs": self.pairs,
                "undefined": self.undefined,
                "truncated": self.truncated,
            },
            indent=2,
        )


def check_totality(initial: GameState, max_states: int = 10_000,
                   max_day: int | None = None) -> TotalityReport:
    """BFS the reachable states, applying every well-formed profile intent
    in each; report any (state, intent) pair the engine leaves undefined."""
    report = TotalityReport()
    seen = {state_digest(initial)}
    frontier = [initial]
    while frontier:
        state = frontier.pop(0)
        report.states += 1
        expand = True
        if max_day is not None and state.day >= max_day:
            expand = False
            report.truncated = True
        for intent in it.candidate_intents(state):
            report.pairs += 1
            try:
                result = step(state, intent)
            except Exception as exc:
                report.undefined.append(
                    {
                        "state": state_digest(state),
                        "intent": it.pretty(intent),
                        "error": f"{type(exc).__name__}: {exc}",
                    }
                )
                continue
            if not expand:
                continue
            digest = state_digest(result.next)
            if digest not in seen:
                if len(seen) >= max_states:
                    report.truncated = True
                    continue
                seen.add(digest)
                frontier.append(result.next)
    return report
