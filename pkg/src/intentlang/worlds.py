"""Concrete game worlds: rooms, entities, adjacency, and the partial
semantic functions that transform states."""

from __future__ import annotations

import dataclasses
import hashlib
import json
import re
from dataclasses import dataclass, field
from typing import Any, Iterator

RoomId = str
EntityName = str
Direction = str

DIRECTIONS: tuple[Direction, ...] = ("north", "south", "east", "west")
ENTITY_KINDS: tuple[str, ...] = ("item", "fixture", "npc", "opening")
INVENTORY = "inventory"

_IDENT_RE = re.compile(r"^[a-z_][a-z0-9_]*$")

# Counter-based 64-bit generator (splitmix-style): the i-th draw is a pure
# function of (seed, i), so replay never depends on hidden generator state.
_MASK = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15


def rng_value(seed: int, index: int) -> int:
    z = (seed + (index + 1) * _GAMMA) & _MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


class WorldError(ValueError):
    """Malformed or inconsistent world-definition document."""

    def __init__(self, message: str, where: str = "document"):
        super().__init__(f"{where}: {message}")
        self.where = where


class UndefinedApplication(RuntimeError):
    """A partial semantic function was applied outside its precondition.

    This is an engine bug surface, distinct from a game-level failure
    response; step rules must guard before calling.
    """


class UndeclaredName(RuntimeError):
    """An identifier in a proposition or intent is not declared."""


# ---------------------------------------------------------------------------
# Propositions


@dataclass(frozen=True)
class PlayerIn:
    room: RoomId

    def __str__(self) -> str:
        return f"playerIn({self.room})"


@dataclass(frozen=True)
class At:
    entity: EntityName
    room: RoomId

    def __str__(self) -> str:
        return f"at({self.entity}, {self.room})"


@dataclass(frozen=True)
class PlayerNear:
    entity: EntityName

    def __str__(self) -> str:
        return f"playerNear({self.entity})"


@dataclass(frozen=True)
class HoldsItem:
    entity: EntityName

    def __str__(self) -> str:
        return f"holds_item({self.entity})"


@dataclass(frozen=True)
class Adjacent:
    room: RoomId
    direction: Direction
    target: RoomId

    def __str__(self) -> str:
        return f"adjacent({self.room}, {self.direction}, {self.target})"


@dataclass(frozen=True)
class Selected:
    """Farm-world fluent: the named inventory item is in hand."""

    entity: EntityName

    def __str__(self) -> str:
        return f"selected({self.entity})"


@dataclass(frozen=True)
class Not:
    prop: "Atom"

    def __str__(self) -> str:
        return f"not({self.prop})"


Atom = PlayerIn | At | PlayerNear | HoldsItem | Adjacent | Selected
Proposition = Atom | Not


# ---------------------------------------------------------------------------
# States


@dataclass(frozen=True)
class GrowthState:
    """Growth bookkeeping for a planted crop entity."""

    crop: str
    days_watered: int = 0
    harvestable: bool = False
    watered_today: bool = False

    @property
    def stage(self) -> str:
        if self.harvestable:
            return "harvestable"
        return "planted" if self.days_watered == 0 else "growing"


@dataclass(frozen=True)
class WorldDef:
    """Validated world definition; immutable template for initial states."""

    rooms: tuple[RoomId, ...]
    adjacency: dict[tuple[RoomId, Direction], RoomId]
    entities: dict[EntityName, str]  # name -> kind
    start: RoomId
    seed: int
    farm_rules: Any  # farm.FarmRules | None
    doc: dict

    @property
    def is_farm(self) -> bool:
        return self.farm_rules is not None

    def digest(self) -> str:
        blob = json.dumps(self.doc, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode("utf-8")).hexdigest()


@dataclass(frozen=True)
class GameState:
    """Immutable concrete world state; every operation returns a new value."""

    world: WorldDef = field(compare=False, repr=False)
    entities: dict[EntityName, str]  # name -> kind, grows with drops
    locations: dict[EntityName, str]  # name -> room or INVENTORY
    player_room: RoomId
    day: int
    rng_seed: int
    rng_counter: int
    selected: EntityName | None
    growth: dict[EntityName, GrowthState]

    def replace(self, **changes) -> "GameState":
        return dataclasses.replace(self, **changes)

    def inventory(self) -> list[EntityName]:
        return sorted(n for n, loc in self.locations.items() if loc == INVENTORY)

    def entities_in(self, room: RoomId) -> list[EntityName]:
        return sorted(n for n, loc in self.locations.items() if loc == room)

    def draw(self) -> tuple[int, "GameState"]:
        """One 64-bit draw; advances the counter by exactly one."""
        value = rng_value(self.rng_seed, self.rng_counter)
        return value, self.replace(rng_counter=self.rng_counter + 1)


def initial_state(world: WorldDef, seed: int | None = None) -> GameState:
    locations = {name: room for name, (kind, room) in _iter_decls(world.doc)}
    return GameState(
        world=world,
        entities=dict(world.entities),
        locations=locations,
        player_room=world.start,
        day=0,
        rng_seed=world.seed if seed is None else seed,
        rng_counter=0,
        selected=None,
        growth={},
    )


def _iter_decls(doc: dict) -> Iterator[tuple[str, tuple[str, str]]]:
    for ent in doc["entities"]:
        yield ent["name"], (ent["kind"], ent["room"])


# ---------------------------------------------------------------------------
# Loading


_DOC_KEYS = {"rooms", "adjacency", "entities", "start", "seed", "farm_rules"}


def load_world(doc: dict) -> GameState:
    """Validate a world-definition document and build its initial state."""
    if not isinstance(doc, dict):
        raise WorldError("world document must be a JSON object")
    unknown = set(doc) - _DOC_KEYS
    if unknown:
        raise WorldError(f"unknown keys: {sorted(unknown)}")
    for key in ("rooms", "adjacency", "entities", "start"):
        if key not in doc:
            raise WorldError(f"missing key {key!r}")

    rooms = doc["rooms"]
    if not isinstance(rooms, list) or not rooms:
        raise WorldError("rooms must be a nonempty array", "rooms")
    seen: set[str] = set()
    for i, room in enumerate(rooms):
        _check_ident(room, f"rooms[{i}]")
        if room in seen:
            raise WorldError(f"duplicate room {room!r}", f"rooms[{i}]")
        seen.add(room)
    room_set = set(rooms)

    adjacency: dict[tuple[str, str], str] = {}
    for i, triple in enumerate(doc["adjacency"]):
        where = f"adjacency[{i}]"
        if not (isinstance(triple, list) and len(triple) == 3):
            raise WorldError("expected [from, direction, to]", where)
        src, direction, dst = triple
        if src not in room_set:
            raise WorldError(f"dangling room reference {src!r}", where)
        if dst not in room_set:
            raise WorldError(f"dangling room reference {dst!r}", where)
        if direction not in DIRECTIONS:
            raise WorldError(f"bad direction {direction!r}", where)
        if (src, direction) in adjacency:
            raise WorldError(f"duplicate exit {src!r} {direction}", where)
        adjacency[(src, direction)] = dst

    entities: dict[str, str] = {}
    for i, ent in enumerate(doc["entities"]):
        where = f"entities[{i}]"
        if not isinstance(ent, dict) or set(ent) != {"name", "kind", "room"}:
            raise WorldError("expected {name, kind, room}", where)
        _check_ident(ent["name"], where)
        if ent["name"] in entities:
            raise WorldError(f"duplicate entity {ent['name']!r}", where)
        if ent["kind"] not in ENTITY_KINDS:
            raise WorldError(f"bad kind {ent['kind']!r}", where)
        loc = ent["room"]
        if loc != INVENTORY and loc not in room_set:
            raise WorldError(f"dangling room reference {loc!r}", where)
        entities[ent["name"]] = ent["kind"]

    start = doc["start"]
    if start not in room_set:
        raise WorldError(f"player start room {start!r} undeclared", "start")
    seed = doc.get("seed", 0)
    if not isinstance(seed, int):
        raise WorldError("seed must be an integer", "seed")

    farm_rules = None
    if "farm_rules" in doc:
        from . import farm

        farm_rules = farm.parse_farm_rules(doc["farm_rules"], entities)

    world = WorldDef(
        rooms=tuple(rooms),
        adjacency=adjacency,
        entities=entities,
        start=start,
        seed=seed,
        farm_rules=farm_rules,
        doc=doc,
    )
    return initial_state(world)


def load_world_file(path: str) -> GameState:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise WorldError(f"invalid JSON: {exc}", path) from exc
    return load_world(doc)


def _check_ident(name: object, where: str) -> None:
    if not isinstance(name, str) or not _IDENT_RE.match(name):
        raise WorldError(f"bad identifier {name!r}", where)
    # Reserved words would break canonical-form parsing and the
    # inventory sentinel.
    if name in DIRECTIONS or name == INVENTORY:
        raise WorldError(f"reserved identifier {name!r}", where)


# ---------------------------------------------------------------------------
# The proposition judgment


def holds(state: GameState, prop: Proposition) -> bool:
    """Decide whether a proposition is true of a concrete state."""
    match prop:
        case Not(inner):
            return not holds(state, inner)
        case PlayerIn(room):
            _require_room(state, room)
            return state.player_room == room
        case At(entity, room):
            _require_entity(state, entity)
            _require_room(state, room)
            return state.locations[entity] == room
        case PlayerNear(entity):
            _require_entity(state, entity)
            return state.locations[entity] == state.player_room
        case HoldsItem(entity):
            _require_entity(state, entity)
            return state.locations[entity] == INVENTORY
        case Adjacent(room, direction, target):
            _require_room(state, room)
            _require_room(state, target)
            return state.world.adjacency.get((room, direction)) == target
        case Selected(entity):
            _require_entity(state, entity)
            return state.selected == entity
    raise UndeclaredName(f"unknown proposition {prop!r}")


def _require_room(state: GameState, room: str) -> None:
    if room not in state.world.rooms:
        raise UndeclaredName(f"undeclared room {room!r}")


def _require_entity(state: GameState, entity: str) -> None:
    if entity not in state.entities:
        raise UndeclaredName(f"undeclared entity {entity!r}")


# ---------------------------------------------------------------------------
# Partial semantic functions


def player_take(state: GameState, entity: EntityName) -> GameState:
    """Move a nearby, unheld item into the inventory (partial)."""
    _require_entity(state, entity)
    if state.entities[entity] != "item":
        raise UndefinedApplication(f"{entity} is not portable")
    if not holds(state, PlayerNear(entity)):
        raise UndefinedApplication(f"{entity} is not near the player")
    if holds(state, HoldsItem(entity)):
        raise UndefinedApplication(f"{entity} is already held")
    locations = dict(state.locations)
    locations[entity] = INVENTORY
    return state.replace(locations=locations)


def player_move(state: GameState, direction: Direction) -> GameState:
    """Move the player through a declared exit (partial)."""
    if direction not in DIRECTIONS:
        raise UndeclaredName(f"undeclared direction {direction!r}")
    target = state.world.adjacency.get((state.player_room, direction))
    if target is None:
        raise UndefinedApplication(
            f"no exit {direction} from {state.player_room}")
    return state.replace(player_room=target)


# ---------------------------------------------------------------------------
# Digests


def state_digest(state: GameState) -> str:
    """SHA-256 over a canonical serialization; equal states share digests."""
    canonical = {
        "rooms": sorted(state.world.rooms),
        "adjacency": sorted(
            [r, d, t] for (r, d), t in state.world.adjacency.items()
        ),
        "entities": sorted(state.entities.items()),
        "locations": sorted(state.locations.items()),
        "player_room": state.player_room,
        "day": state.day,
        "rng": [state.rng_seed, state.rng_counter],
        "selected": state.selected,
        "growth": {
            name: [g.crop, g.days_watered, g.harvestable, g.watered_today]
            for name, g in sorted(state.growth.items())
        },
    }
    blob = json.dumps(canonical, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()
