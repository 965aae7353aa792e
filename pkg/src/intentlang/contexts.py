"""Contexts abstracting game states, the typing judgment over intents,
context succession, and the progress checker."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from . import farm
from . import intents as it
from .step import step
from .worlds import (
    DIRECTIONS,
    Adjacent,
    At,
    GameState,
    HoldsItem,
    PlayerIn,
    Selected,
    WorldDef,
    state_digest,
)


@dataclass(frozen=True)
class Applicable:
    """Rule-table side condition: some tool rule covers (tool, target)."""

    tool: str
    target: str

    def __str__(self) -> str:
        return f"applicable({self.tool}, {self.target})"


@dataclass(frozen=True)
class FarmWorld:
    def __str__(self) -> str:
        return "farm_world"


@dataclass(frozen=True)
class Context:
    """A finite set of propositions abstracting a game state.

    Static facts are the adjacency map; fluents describe player position,
    entity placement, possession, and (farm worlds) the selection. The
    immutable world definition rides along as the ambient signature the
    farm premise table consults.
    """

    static: frozenset[Adjacent]
    fluents: frozenset
    world: WorldDef = field(compare=False, repr=False)

    def player_room(self) -> str:
        for f in self.fluents:
            if isinstance(f, PlayerIn):
                return f.room
        raise ValueError("context lacks a playerIn fact")


@dataclass(frozen=True)
class Ok:
    pass


@dataclass(frozen=True)
class IllTyped:
    rule: str
    missing: tuple  # nonempty tuple of unsatisfied premises


TypingVerdict = Ok | IllTyped


def abstract(state: GameState) -> Context:
    """The canonical full-precision context of a state; G : abstract(G)
    holds by construction."""
    static = frozenset(
        Adjacent(r, d, t) for (r, d), t in state.world.adjacency.items())
    fluents: set = {PlayerIn(state.player_room)}
    for name, loc in state.locations.items():
        if loc == "inventory":
            fluents.add(HoldsItem(name))
        else:
            fluents.add(At(name, loc))
    if state.selected is not None:
        fluents.add(Selected(state.selected))
    return Context(static, frozenset(fluents), state.world)


def validate_context(ctx: Context) -> bool:
    player = [f for f in ctx.fluents if isinstance(f, PlayerIn)]
    if len(player) != 1:
        return False
    placed: set[str] = set()
    for f in ctx.fluents:
        if isinstance(f, (At, HoldsItem)):
            name = f.entity
            if name in placed:
                return False
            placed.add(name)
    exits: set[tuple[str, str]] = set()
    for f in ctx.static:
        key = (f.room, f.direction)
        if key in exits:
            return False
        exits.add(key)
    for f in ctx.fluents:
        if isinstance(f, Selected) and HoldsItem(f.entity) not in ctx.fluents:
            return False
    return True


def context_succeeds(ctx: Context, successor: Context) -> bool:
    """Succession preserves static facts exactly; fluents move freely."""
    return successor.static == ctx.static and validate_context(successor)


# ---------------------------------------------------------------------------
# Typing rules


def _room_of(ctx: Context, entity: str) -> str | None:
    for f in ctx.fluents:
        if isinstance(f, At) and f.entity == entity:
            return f.room
    return None


def _rule_move(ctx: Context, direction: str) -> TypingVerdict:
    room = ctx.player_room()
    for f in ctx.static:
        if f.room == room and f.direction == direction:
            return Ok()
    return IllTyped("move", (Adjacent(room, direction, "_"),))


def _rule_take(ctx: Context, entity: str) -> TypingVerdict:
    room = ctx.player_room()
    if At(entity, room) in ctx.fluents:
        return Ok()
    return IllTyped("take", (At(entity, room),))


def _rule_collect(ctx: Context) -> TypingVerdict:
    room = ctx.player_room()
    for f in ctx.fluents:
        if isinstance(f, At) and f.room == room:
            kind = _kind(ctx, f.entity)
            if kind == "item":
                return Ok()
    return IllTyped("collect", (At("_", room),))


def _kind(ctx: Context, entity: str) -> str | None:
    kind = ctx.world.entities.get(entity)
    if kind is None:
        kind = farm.species_kind(ctx.world, farm.species_of(entity))
    return kind


def _rule_select(ctx: Context, entity: str) -> TypingVerdict:
    if not ctx.world.is_farm:
        return IllTyped("select", (FarmWorld(),))
    if HoldsItem(entity) in ctx.fluents:
        return Ok()
    return IllTyped("select", (HoldsItem(entity),))


def _selected(ctx: Context) -> str | None:
    for f in ctx.fluents:
        if isinstance(f, Selected):
            return f.entity
    return None


def _rule_apply(ctx: Context, entity: str) -> TypingVerdict:
    if not ctx.world.is_farm:
        return IllTyped("apply", (FarmWorld(),))
    room = ctx.player_room()
    missing: list = []
    if At(entity, room) not in ctx.fluents:
        missing.append(At(entity, room))
    tool = _selected(ctx)
    if tool is None:
        missing.append(Selected("_"))
    if missing:
        return IllTyped("apply", tuple(missing))
    rules = ctx.world.farm_rules
    for tool_type in farm.possible_resources(ctx.world, tool):
        for target_type in farm.possible_resources(ctx.world, entity):
            if tool_type.name == farm.ROD and target_type.name == farm.WATER:
                continue
            if farm.find_tool_row(rules, tool_type, target_type) is None:
                side = Applicable(str(tool_type), str(target_type))
                return IllTyped("apply", (side,))
    return Ok()


def _rule_inquire(ctx: Context, entity: str) -> TypingVerdict:
    if not ctx.world.is_farm:
        return IllTyped("inquire", (FarmWorld(),))
    room = ctx.player_room()
    if At(entity, room) in ctx.fluents:
        return Ok()
    return IllTyped("inquire", (At(entity, room),))


def _rule_move_near(ctx: Context, entity: str) -> TypingVerdict:
    if not ctx.world.is_farm:
        return IllTyped("move_near", (FarmWorld(),))
    room = ctx.player_room()
    if HoldsItem(entity) in ctx.fluents:
        return Ok()
    loc = _room_of(ctx, entity)
    if loc is not None:
        if loc == room:
            return Ok()
        for f in ctx.static:
            if f.room == room and f.target == loc:
                return Ok()
    return IllTyped("move_near", (At(entity, room),))


def _rule_wait(ctx: Context) -> TypingVerdict:
    if not ctx.world.is_farm:
        return IllTyped("wait", (FarmWorld(),))
    return Ok()


# Registry keyed by intent class; tests may swap rules in to build broken
# worlds for negative controls.
TYPING_RULES = {
    it.Move: lambda ctx, i: _rule_move(ctx, i.direction),
    it.MoveOffscreen: lambda ctx, i: _rule_move(ctx, i.direction),
    it.Take: lambda ctx, i: _rule_take(ctx, i.entity),
    it.Collect: lambda ctx, i: _rule_collect(ctx),
    it.Select: lambda ctx, i: _rule_select(ctx, i.entity),
    it.Apply: lambda ctx, i: _rule_apply(ctx, i.entity),
    it.Inquire: lambda ctx, i: _rule_inquire(ctx, i.entity),
    it.MoveNear: lambda ctx, i: _rule_move_near(ctx, i.entity),
    it.Wait: lambda ctx, i: _rule_wait(ctx),
}


def typecheck(ctx: Context, intent: it.CoreIntent) -> TypingVerdict:
    """Decide whether an intent is meaningful in a context. Premises are
    read off the context (plus the immutable rule signature), never a
    concrete state; undeclared names come out ill-typed, not as errors."""
    if isinstance(intent, (it.Move, it.MoveOffscreen)) and \
            intent.direction not in DIRECTIONS:
        room = ctx.player_room()
        return IllTyped("move", (Adjacent(room, intent.direction, "_"),))
    rule = TYPING_RULES[type(intent)]
    return rule(ctx, intent)


# ---------------------------------------------------------------------------
# Progress checking


@dataclass
class ProgressReport:
    states: int = 0
    pairs: int = 0  # well-typed (state, intent) pairs checked
    violations: list[dict] = field(default_factory=list)
    truncated: bool = False

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_json(self) -> str:
        return json.dumps(
            {
                "states": self.states,
                "pairs": self.pairs,
                "violations": self.violations,
                "truncated": self.truncated,
            },
            indent=2,
        )


def check_progress(initial: GameState, max_states: int = 10_000,
                   max_day: int | None = None) -> ProgressReport:
    """Verify over the reachable states that every well-typed intent steps
    to success without engine error and that the successor context
    succeeds the original."""
    report = ProgressReport()
    seen = {state_digest(initial)}
    frontier = [initial]
    while frontier:
        state = frontier.pop(0)
        report.states += 1
        ctx = abstract(state)
        expand = True
        if max_day is not None and state.day >= max_day:
            expand = False
            report.truncated = True
        for intent in it.candidate_intents(state):
            well_typed = isinstance(typecheck(ctx, intent), Ok)
            if well_typed:
                report.pairs += 1
            try:
                result = step(state, intent)
            except Exception as exc:
                if well_typed:
                    report.violations.append(_violation(
                        state, intent, f"engine error: {exc}"))
                continue
            if well_typed:
                if result.resp.verdict != "success":
                    report.violations.append(_violation(
                        state, intent, "well-typed intent failed"))
                if not context_succeeds(ctx, abstract(result.next)):
                    report.violations.append(_violation(
                        state, intent, "context succession violated"))
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


def _violation(state: GameState, intent: it.CoreIntent, kind: str) -> dict:
    return {
        "state": state_digest(state),
        "intent": it.pretty(intent),
        "kind": kind,
    }
