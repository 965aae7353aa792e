"""Farm-world rules: tool applications, inquiry, growth, day advancement,
and seeded fishing."""

from __future__ import annotations

import re
from dataclasses import dataclass

from . import intents as it
from .resources import (
    ResourceType,
    ResourceTypeError,
    SumType,
    TypeCon,
    members,
    parse_type,
    substitute,
)
from .step import StepResult, failure, success
from .worlds import (
    DIRECTIONS,
    INVENTORY,
    GameState,
    GrowthState,
    UndeclaredName,
    WorldDef,
    WorldError,
)

MSG_NO_SELECTION = "Nothing is selected."
MSG_CANT_REACH = "You can't reach that."
MSG_NO_EFFECT = "That has no effect."
MSG_NOT_IN_BAG = "You don't have that."
MSG_WONT_OPEN = "It won't open."
MSG_NEW_DAY = "A new day dawns."

_SPECIES_RE = re.compile(r"^(.*?)(?:_\d+)?$")

ROD = "rod"
WATER = "water"
FISH_TYPE = SumType((TypeCon("fish"), TypeCon("trash")))


def species_of(name: str) -> str:
    """Entity species: the name with any trailing numeric suffix removed."""
    return _SPECIES_RE.match(name).group(1)


@dataclass(frozen=True)
class ToolRow:
    """One extraction/transformation rule of the tool table.

    Types may mention the croptype variable `t`, bound by matching the
    concrete tool and target resource types.
    """

    tool: ResourceType
    target: ResourceType
    produces: ResourceType
    replacement: str | None = None  # species, optionally parameterized "(t)"
    drop: str | None = None  # species of a fresh inventory item
    consumes_tool: bool = False
    consumes_target: bool = False
    waters: bool = False
    plants: bool = False


@dataclass(frozen=True)
class FarmRules:
    tools: tuple[ToolRow, ...]
    growth_days: dict[str, int]
    fish_num: int
    fish_den: int
    shop: dict[str, int]
    species_kind: dict[str, str]
    species_resource: dict[str, ResourceType]
    doors: dict[str, str]  # opening entity name -> room
    dialogue: dict[str, str]  # npc species -> line


_RULE_KEYS = {"tools", "growth_days", "fish_probability", "shop",
              "species", "doors", "dialogue"}
_ROW_KEYS = {"tool", "target", "produces", "replacement", "drop",
             "consumes_tool", "consumes_target", "waters", "plants"}


def parse_farm_rules(block: dict, entities: dict[str, str]) -> FarmRules:
    if not isinstance(block, dict):
        raise WorldError("farm_rules must be an object", "farm_rules")
    unknown = set(block) - _RULE_KEYS
    if unknown:
        raise WorldError(f"unknown keys: {sorted(unknown)}", "farm_rules")

    growth_days = block.get("growth_days", {})
    for crop, days in growth_days.items():
        if not isinstance(days, int) or days < 1:
            raise WorldError(
                f"growth_days[{crop!r}] must be a positive integer",
                "farm_rules.growth_days")

    num, den = _parse_probability(block.get("fish_probability", "0/1"))

    species_kind: dict[str, str] = {}
    species_resource: dict[str, ResourceType] = {}
    for spec_name, info in block.get("species", {}).items():
        where = f"farm_rules.species[{spec_name!r}]"
        if not isinstance(info, dict) or set(info) - {"kind", "resource"}:
            raise WorldError("expected {kind?, resource?}", where)
        if "kind" in info:
            species_kind[spec_name] = info["kind"]
        if "resource" in info:
            try:
                species_resource[spec_name] = parse_type(info["resource"])
            except ResourceTypeError as exc:
                raise WorldError(str(exc), where) from exc

    # Declared entities pin species kinds; declarations must not conflict.
    for name, kind in entities.items():
        spec_name = species_of(name)
        prior = species_kind.get(spec_name)
        if prior is not None and prior != kind:
            raise WorldError(
                f"species {spec_name!r} declared both {prior} and {kind}",
                "farm_rules.species")
        species_kind[spec_name] = kind

    rows = []
    keyed: set[tuple[str, str]] = set()
    for i, raw in enumerate(block.get("tools", [])):
        where = f"farm_rules.tools[{i}]"
        if not isinstance(raw, dict) or set(raw) - _ROW_KEYS:
            raise WorldError("bad tool row", where)
        try:
            row = ToolRow(
                tool=parse_type(raw["tool"]),
                target=parse_type(raw["target"]),
                produces=parse_type(raw["produces"]),
                replacement=raw.get("replacement"),
                drop=raw.get("drop"),
                consumes_tool=raw.get("consumes_tool", False),
                consumes_target=raw.get("consumes_target", False),
                waters=raw.get("waters", False),
                plants=raw.get("plants", False),
            )
        except (KeyError, ResourceTypeError) as exc:
            raise WorldError(f"bad tool row: {exc}", where) from exc
        for tm in members(row.tool):
            for gm in members(row.target):
                key = (tm.name, gm.name)
                if key in keyed:
                    raise WorldError(
                        f"duplicate tool rule for {key}", where)
                keyed.add(key)
        rows.append(row)

    doors = dict(block.get("doors", {}))
    for door, room in doors.items():
        if door not in entities or entities[door] != "opening":
            raise WorldError(f"door {door!r} is not a declared opening",
                             "farm_rules.doors")
    for name, kind in entities.items():
        if kind == "opening" and name not in doors:
            raise WorldError(f"opening {name!r} has no door target",
                             "farm_rules.doors")

    rules = FarmRules(
        tools=tuple(rows),
        growth_days=dict(growth_days),
        fish_num=num,
        fish_den=den,
        shop=dict(block.get("shop", {})),
        species_kind=species_kind,
        species_resource=species_resource,
        doors=doors,
        dialogue=dict(block.get("dialogue", {})),
    )

    # Species created at runtime by rows and harvesting need known kinds.
    for row in rows:
        for spec_name in (row.replacement, row.drop):
            if spec_name is None:
                continue
            base = spec_name.replace("(t)", "")
            if "(t)" in spec_name:
                for crop in growth_days:
                    _require_kind(rules, f"{base}_{crop}")
            else:
                _require_kind(rules, base)
    for crop in growth_days:
        _require_kind(rules, f"{crop}_crop")
    if any(str(t) == WATER for t in species_resource.values()):
        _require_kind(rules, "fish")
        _require_kind(rules, "trash")
    return rules


def _require_kind(rules: FarmRules, spec_name: str) -> None:
    if spec_name not in rules.species_kind:
        raise WorldError(f"species {spec_name!r} has no declared kind",
                         "farm_rules.species")


def _parse_probability(text: object) -> tuple[int, int]:
    where = "farm_rules.fish_probability"
    if not isinstance(text, str):
        raise WorldError("probability must be a 'p/q' string", where)
    parts = text.split("/")
    try:
        if len(parts) == 1:
            num, den = int(parts[0]), 1
        elif len(parts) == 2:
            num, den = int(parts[0]), int(parts[1])
        else:
            raise ValueError(text)
    except ValueError as exc:
        raise WorldError(f"bad probability {text!r}", where) from exc
    if den <= 0 or not 0 <= num <= den:
        raise WorldError(f"probability {text!r} outside [0, 1]", where)
    return num, den


# ---------------------------------------------------------------------------
# Entity resource typing


def entity_resource(state: GameState, name: str) -> TypeCon:
    """The current resource type of a concrete entity."""
    growth = state.growth.get(name)
    if growth is not None:
        con = "planted" if growth.stage == "planted" else "growing"
        return TypeCon(con, growth.crop)
    return species_resource(state.world, species_of(name))


def species_resource(world: WorldDef, spec_name: str) -> TypeCon:
    rules = world.farm_rules
    if rules is not None:
        declared = rules.species_resource.get(spec_name)
        if declared is not None:
            if isinstance(declared, SumType):
                raise WorldError(
                    f"species {spec_name!r} resource must not be a sum")
            return declared
    return TypeCon(spec_name)


def possible_resources(world: WorldDef, name: str) -> tuple[TypeCon, ...]:
    """Resource types an entity of this name can have, judging only from
    its species (growth stage is invisible to the type system)."""
    spec_name = species_of(name)
    if world.is_farm:
        for crop in world.farm_rules.growth_days:
            if spec_name == f"planted_{crop}":
                return (TypeCon("planted", crop), TypeCon("growing", crop))
    return (species_resource(world, spec_name),)


def entity_kind(state: GameState, name: str) -> str:
    return state.entities[name]


def species_kind(world: WorldDef, spec_name: str) -> str | None:
    if world.farm_rules is not None:
        return world.farm_rules.species_kind.get(spec_name)
    candidates = {k for n, k in world.entities.items()
                  if species_of(n) == spec_name}
    return candidates.pop() if len(candidates) == 1 else None


# ---------------------------------------------------------------------------
# Tool table lookup


def find_tool_row(rules: FarmRules, tool: TypeCon, target: TypeCon
                  ) -> tuple[ToolRow, dict[str, str]] | None:
    for row in rules.tools:
        binding: dict[str, str] = {}
        if _match_member(tool, row.tool, binding) and \
                _match_member(target, row.target, binding):
            return row, binding
    return None


def _match_member(concrete: TypeCon, pattern: ResourceType,
                  binding: dict[str, str]) -> bool:
    for pm in members(pattern):
        if pm.name != concrete.name:
            continue
        if pm.param is None and concrete.param is None:
            return True
        if pm.param is None or concrete.param is None:
            continue
        if pm.param == "t":
            if binding.get("t", concrete.param) == concrete.param:
                binding["t"] = concrete.param
                return True
        elif pm.param == concrete.param:
            return True
    return False


def resolve_reference(state: GameState, name: str,
                      qual: str | None = None) -> str | None:
    """Resolve a skill-level entity reference to a concrete entity.

    Bare names match, in order: an exact entity name, a species, or a
    resource constructor. `name(qual)` matches by resource type when the
    qualifier is a croptype, otherwise as the compound species
    `<qual>_<name>`. Nearer entities win (inventory, then the player's
    room, then adjacent rooms), lexicographically within a tier.
    """
    croptypes = (set(state.world.farm_rules.growth_days)
                 if state.world.is_farm else set())
    if qual is None:
        if name in state.entities:
            return name
        candidates = [n for n in state.entities if species_of(n) == name]
        if not candidates:
            candidates = [
                n for n in state.entities
                if entity_resource(state, n).name == name
            ]
    elif qual in croptypes:
        wanted = TypeCon(name, qual)
        candidates = [
            n for n in state.entities if entity_resource(state, n) == wanted
        ]
    else:
        return resolve_reference(state, f"{qual}_{name}")
    if not candidates:
        return None

    def tier(entity: str) -> int:
        loc = state.locations[entity]
        if loc == INVENTORY:
            return 0
        if loc == state.player_room:
            return 1
        for direction in DIRECTIONS:
            if state.world.adjacency.get(
                    (state.player_room, direction)) == loc:
                return 2
        return 3

    return min(candidates, key=lambda n: (tier(n), n))


def fresh_name(state: GameState, spec_name: str) -> str:
    pattern = re.compile(re.escape(spec_name) + r"_(\d+)$")
    top = 0
    for name in state.entities:
        m = pattern.match(name)
        if m:
            top = max(top, int(m.group(1)))
    return f"{spec_name}_{top + 1}"


def _spawn(state: GameState, spec_name: str, location: str,
           growth: GrowthState | None = None) -> tuple[GameState, str]:
    name = fresh_name(state, spec_name)
    kind = state.world.farm_rules.species_kind[spec_name]
    entities = dict(state.entities)
    entities[name] = kind
    locations = dict(state.locations)
    locations[name] = location
    growth_map = state.growth
    if growth is not None:
        growth_map = dict(growth_map)
        growth_map[name] = growth
    return state.replace(entities=entities, locations=locations,
                         growth=growth_map), name


def _remove(state: GameState, name: str) -> GameState:
    entities = dict(state.entities)
    del entities[name]
    locations = dict(state.locations)
    del locations[name]
    growth = state.growth
    if name in growth:
        growth = dict(growth)
        del growth[name]
    selected = state.selected if state.selected != name else None
    return state.replace(entities=entities, locations=locations,
                         growth=growth, selected=selected)


# ---------------------------------------------------------------------------
# The farm rule table


def step_farm(state: GameState, intent: it.CoreIntent) -> StepResult:
    match intent:
        case it.Select(o):
            return _farm_select(state, o)
        case it.Apply(o):
            return _farm_apply(state, o)
        case it.Inquire(o):
            return _farm_inquire(state, o)
        case it.MoveNear(o):
            return _farm_move_near(state, o)
        case it.Wait():
            return success(advance_day(state), MSG_NEW_DAY)
    raise UndeclaredName(f"no farm rule for {intent!r}")


def _require(state: GameState, name: str) -> None:
    if name not in state.entities:
        raise UndeclaredName(f"undeclared entity {name!r}")


def _farm_select(state: GameState, name: str) -> StepResult:
    _require(state, name)
    if state.locations[name] != INVENTORY:
        return failure(state, MSG_NOT_IN_BAG)
    nxt = state.replace(selected=name)
    payload = ((entity_resource(state, name), name),)
    return success(nxt, f"You select the {name}.", payload)


def _farm_apply(state: GameState, name: str) -> StepResult:
    _require(state, name)
    tool = state.selected
    if tool is None:
        return failure(state, MSG_NO_SELECTION)
    if state.locations[name] != state.player_room:
        return failure(state, MSG_CANT_REACH)
    tool_type = entity_resource(state, tool)
    target_type = entity_resource(state, name)
    if tool_type.name == ROD and target_type.name == WATER:
        return try_fish(state)
    found = find_tool_row(state.world.farm_rules, tool_type, target_type)
    if found is None:
        return failure(state, MSG_NO_EFFECT)
    row, binding = found
    produced = substitute(row.produces, binding)

    nxt = state
    salient = name
    if row.waters:
        growth = dict(nxt.growth)
        growth[name] = GrowthState(
            crop=growth[name].crop,
            days_watered=growth[name].days_watered,
            harvestable=growth[name].harvestable,
            watered_today=True,
        )
        nxt = nxt.replace(growth=growth)
        message = f"You water the {name}."
    elif row.replacement is not None:
        room = nxt.locations[name]
        nxt = _remove(nxt, name)
        spec_name = row.replacement.replace("(t)", "")
        growth = None
        if row.plants:
            crop = binding["t"]
            spec_name = f"{spec_name}_{crop}"
            growth = GrowthState(crop=crop)
        nxt, salient = _spawn(nxt, spec_name, room, growth)
        message = f"It becomes {salient}."
    elif row.drop is not None:
        nxt = _remove(nxt, name) if row.consumes_target else nxt
        nxt, salient = _spawn(nxt, row.drop, INVENTORY)
        message = f"You got {salient}."
    else:
        if row.consumes_target:
            nxt = _remove(nxt, name)
        message = f"You apply the {tool}."
    if row.consumes_tool:
        nxt = _remove(nxt, tool)
    payload = ((produced, salient),)
    return success(nxt, message, payload)


def _farm_inquire(state: GameState, name: str) -> StepResult:
    _require(state, name)
    loc = state.locations[name]
    kind = state.entities[name]
    spec_name = species_of(name)
    rules = state.world.farm_rules
    if loc == INVENTORY:
        payload = ((entity_resource(state, name), name),)
        return success(state, "You already have it.", payload)
    if loc != state.player_room:
        return failure(state, MSG_CANT_REACH)
    if kind == "npc":
        line = rules.dialogue.get(spec_name, "Hello.")
        return success(state, f"{name} says: {line}")
    if kind == "opening":
        target = rules.doors.get(name)
        if target is None:
            return failure(state, MSG_WONT_OPEN)
        nxt = state.replace(player_room=target)
        return success(nxt, f"You enter the {target}.")
    if kind == "item":
        locations = dict(state.locations)
        locations[name] = INVENTORY
        nxt = state.replace(locations=locations)
        payload = ((entity_resource(state, name), name),)
        return success(nxt, "Taken.", payload)
    # fixtures: growing crops answer harvest attempts, the rest describe
    growth = state.growth.get(name)
    if growth is not None:
        if growth.harvestable:
            room = state.locations[name]
            nxt = _remove(state, name)
            nxt, crop_item = _spawn(nxt, f"{growth.crop}_crop", INVENTORY)
            payload = ((TypeCon("crop", growth.crop), crop_item),)
            return success(nxt, "Harvested.", payload)
        payload = ((TypeCon("growing", growth.crop), name),)
        return success(state, "Not ready yet.", payload)
    return success(state, f"You see the {name}.")


def _farm_move_near(state: GameState, name: str) -> StepResult:
    _require(state, name)
    loc = state.locations[name]
    if loc == INVENTORY:
        return success(state, "It is with you.")
    if loc == state.player_room:
        return success(state, f"You move near the {name}.")
    for direction in DIRECTIONS:
        if state.world.adjacency.get((state.player_room, direction)) == loc:
            nxt = state.replace(player_room=loc)
            return success(nxt, f"You move near the {name}.")
    return failure(state, MSG_CANT_REACH)


# ---------------------------------------------------------------------------
# Day advancement and fishing


def advance_day(state: GameState) -> GameState:
    """Advance the day counter; watered crops grow, watering resets."""
    rules = state.world.farm_rules
    growth = {}
    for name, g in state.growth.items():
        if g.watered_today:
            days = g.days_watered + 1
            growth[name] = GrowthState(
                crop=g.crop,
                days_watered=days,
                harvestable=days >= rules.growth_days[g.crop],
                watered_today=False,
            )
        else:
            growth[name] = GrowthState(
                crop=g.crop,
                days_watered=g.days_watered,
                harvestable=g.harvestable,
                watered_today=False,
            )
    return state.replace(day=state.day + 1, growth=growth)


def try_fish(state: GameState) -> StepResult:
    """One cast: always tugs, lands a fish or trash by one seeded draw."""
    rules = state.world.farm_rules
    rod = state.selected
    if rod is None or entity_resource(state, rod).name != ROD:
        return failure(state, "You need the rod in hand.")
    has_water = any(
        entity_resource(state, n).name == WATER
        for n in state.entities_in(state.player_room)
    )
    if not has_water:
        return failure(state, "There is no water here.")
    value, nxt = state.draw()
    is_fish = value * rules.fish_den < rules.fish_num * (1 << 64)
    spec_name = "fish" if is_fish else "trash"
    nxt, caught = _spawn(nxt, spec_name, INVENTORY)
    payload = ((TypeCon(spec_name), caught),)
    message = "Something tugs... a fish!" if is_fish else \
        "Something tugs... just trash."
    return success(nxt, message, payload)
