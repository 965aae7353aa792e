"""The core intent language and the four surface interfaces that
elaborate into it."""

from __future__ import annotations

import re
from dataclasses import dataclass

from .worlds import DIRECTIONS, Direction, EntityName, GameState, RoomId


# ---------------------------------------------------------------------------
# Core intents


@dataclass(frozen=True)
class Move:
    direction: Direction


@dataclass(frozen=True)
class Take:
    entity: EntityName


@dataclass(frozen=True)
class Collect:
    pass


@dataclass(frozen=True)
class Select:
    entity: EntityName


@dataclass(frozen=True)
class Apply:
    entity: EntityName


@dataclass(frozen=True)
class Inquire:
    entity: EntityName


@dataclass(frozen=True)
class MoveNear:
    entity: EntityName


@dataclass(frozen=True)
class MoveOffscreen:
    direction: Direction


@dataclass(frozen=True)
class Wait:
    pass


CoreIntent = (
    Move | Take | Collect | Select | Apply | Inquire | MoveNear
    | MoveOffscreen | Wait
)

# Verb sets exposed by a world's interface profile.
MOVE_TAKE_VERBS = (Move, Take)
FARM_VERBS = (Select, Apply, Inquire, MoveNear, MoveOffscreen, Wait)


def profile_verbs(state: GameState) -> tuple[type, ...]:
    return FARM_VERBS if state.world.is_farm else MOVE_TAKE_VERBS


def pretty(intent: CoreIntent) -> str:
    """Canonical lowercase command form, used in traces and on the wire."""
    match intent:
        case Move(d):
            return f"move {d}"
        case Take(o):
            return f"take {o}"
        case Collect():
            return "collect"
        case Select(o):
            return f"select {o}"
        case Apply(o):
            return f"apply {o}"
        case Inquire(o):
            return f"inquire {o}"
        case MoveNear(o):
            return f"move_near {o}"
        case MoveOffscreen(d):
            return f"move_offscreen {d}"
        case Wait():
            return "wait"
    raise TypeError(f"not an intent: {intent!r}")


def verb_of(intent: CoreIntent) -> str:
    return pretty(intent).split(" ", 1)[0]


def args_of(intent: CoreIntent) -> tuple[str, ...]:
    parts = pretty(intent).split(" ")
    return tuple(parts[1:])


# ---------------------------------------------------------------------------
# Command-line surface


@dataclass(frozen=True)
class ParseError:
    kind: str  # UnknownVerb | MissingArgument | ExtraTokens | BadArgument
    offset: int
    message: str


_IDENT_RE = re.compile(r"^[a-z_][a-z0-9_]*$")

# verb -> (constructor, argument shape)
_COMMANDS: dict[str, tuple[type, str]] = {
    "move": (Move, "direction"),
    "go": (Move, "direction"),
    "take": (Take, "entity"),
    "collect": (Collect, "none"),
    "wait": (Wait, "none"),
    "select": (Select, "entity"),
    "apply": (Apply, "entity"),
    "inquire": (Inquire, "entity"),
    "move_near": (MoveNear, "entity"),
    "move_offscreen": (MoveOffscreen, "direction"),
}


def parse_command_line(text: str) -> CoreIntent | ParseError:
    """Parse free-form typed text into a core intent.

    Total over strings: every input yields an intent or a located error.
    Nouns are not checked against any world; ill-typedness is contextual.
    """
    tokens = [(m.group(0).lower(), m.start()) for m in re.finditer(r"\S+", text)]
    if not tokens:
        return ParseError("MissingArgument", 0, "empty command")
    verb, verb_off = tokens[0]
    if verb not in _COMMANDS:
        return ParseError("UnknownVerb", verb_off, f"unknown verb {verb!r}")
    ctor, shape = _COMMANDS[verb]
    if shape == "none":
        if len(tokens) > 1:
            return ParseError(
                "ExtraTokens", tokens[1][1],
                f"{verb!r} takes no argument")
        return ctor()
    if len(tokens) < 2:
        return ParseError(
            "MissingArgument", verb_off + len(verb),
            f"{verb!r} needs an argument")
    if len(tokens) > 2:
        return ParseError("ExtraTokens", tokens[2][1], "too many arguments")
    arg, arg_off = tokens[1]
    if shape == "direction":
        if arg not in DIRECTIONS:
            return ParseError(
                "BadArgument", arg_off, f"{arg!r} is not a direction")
        return ctor(arg)
    # entity argument: any identifier that is not a reserved direction word
    if arg in DIRECTIONS or not _IDENT_RE.match(arg):
        return ParseError("BadArgument", arg_off, f"{arg!r} is not a noun")
    return ctor(arg)


# ---------------------------------------------------------------------------
# WASD+ surface


@dataclass(frozen=True)
class Unbound:
    key: str


_KEYMAP: dict[str, CoreIntent] = {
    "w": Move("north"), "up": Move("north"), "↑": Move("north"),
    "s": Move("south"), "down": Move("south"), "↓": Move("south"),
    "d": Move("east"), "right": Move("east"), "→": Move("east"),
    "a": Move("west"), "left": Move("west"), "←": Move("west"),
    "e": Collect(),
}


def map_key(key: str) -> CoreIntent | Unbound:
    """Directional keys move; E collects. Anything else is ignored."""
    return _KEYMAP.get(key.lower(), Unbound(key))


# ---------------------------------------------------------------------------
# Bird's-eye surface


@dataclass(frozen=True)
class ClickRejected:
    reason: str  # "no-op" | "out-of-range"
    target: str


def elaborate_click(state: GameState, target: EntityName | RoomId
                    ) -> CoreIntent | ClickRejected:
    """Resolve a click on a room or entity into a move or take intent.

    Clicks only do something to items in the player's room and to rooms
    adjacent to it; everything else is rejected without stepping.
    """
    if target in state.world.rooms:
        if target == state.player_room:
            return ClickRejected("no-op", target)
        for direction in DIRECTIONS:
            if state.world.adjacency.get((state.player_room, direction)) == target:
                return Move(direction)
        return ClickRejected("out-of-range", target)
    if target not in state.entities:
        from .worlds import UndeclaredName

        raise UndeclaredName(f"undeclared click target {target!r}")
    if (state.entities[target] == "item"
            and state.locations[target] == state.player_room):
        return Take(target)
    return ClickRejected("out-of-range", target)


# ---------------------------------------------------------------------------
# Hypertext surface


@dataclass(frozen=True)
class Choice:
    id: str
    label: str
    intent: CoreIntent


_CHOICE_VERB = {"move": "go", "move_offscreen": "move_offscreen"}


def choice_id(intent: CoreIntent, room: RoomId) -> str:
    verb = verb_of(intent)
    verb = _CHOICE_VERB.get(verb, verb)
    parts = [verb, *args_of(intent), "from", room]
    return "_".join(parts)


def enumerate_choices(state: GameState) -> list[Choice]:
    """Every well-typed intent of the world's profile, as stable links.

    The link list is exactly the set of intents the type system accepts
    in the abstraction of this state, so every link leads somewhere.
    """
    from .contexts import Ok, abstract, typecheck

    ctx = abstract(state)
    choices = []
    for intent in candidate_intents(state):
        if isinstance(typecheck(ctx, intent), Ok):
            choices.append(
                Choice(choice_id(intent, state.player_room), pretty(intent), intent))
    choices.sort(key=lambda c: c.id)
    return choices


def candidate_intents(state: GameState) -> list[CoreIntent]:
    """All well-formed intents over declared names, per the world profile."""
    names = sorted(state.entities)
    out: list[CoreIntent] = []
    for verb in profile_verbs(state):
        if verb in (Move, MoveOffscreen):
            out.extend(verb(d) for d in DIRECTIONS)
        elif verb in (Collect, Wait):
            out.append(verb())
        else:
            out.extend(verb(n) for n in names)
    return out
