"""Player intent languages over declarative game worlds.

Surface interfaces (command line, WASD+, bird's-eye clicks, hypertext
links) elaborate into one core intent language, executed by a small-step
game relation, typechecked against state-derived contexts, logged as
replayable traces, and composed into resource-typed skills.
"""

from importlib import resources as _resources

from .contexts import (
    Context,
    IllTyped,
    Ok,
    abstract,
    check_progress,
    context_succeeds,
    typecheck,
)
from .intents import (
    Choice,
    ClickRejected,
    CoreIntent,
    ParseError,
    Unbound,
    elaborate_click,
    enumerate_choices,
    map_key,
    parse_command_line,
    pretty,
)
from .step import (
    Response,
    StepResult,
    check_totality,
    format_response,
    safe_step,
    step,
)
from .traces import (
    Trace,
    TraceEntry,
    from_jsonl,
    new_trace,
    parse_pattern,
    query,
    record,
    replay,
    to_jsonl,
)
from .worlds import (
    GameState,
    UndeclaredName,
    UndefinedApplication,
    WorldDef,
    WorldError,
    holds,
    initial_state,
    load_world,
    load_world_file,
    player_move,
    player_take,
    state_digest,
)

__version__ = "0.1.0"


def data_path(name: str) -> str:
    """Path to a packaged world or skill file, e.g. `move_take.world`."""
    return str(_resources.files(__package__).joinpath("data", name))


__all__ = [
    "Choice",
    "ClickRejected",
    "Context",
    "CoreIntent",
    "GameState",
    "IllTyped",
    "Ok",
    "ParseError",
    "Response",
    "StepResult",
    "Trace",
    "TraceEntry",
    "Unbound",
    "UndeclaredName",
    "UndefinedApplication",
    "WorldDef",
    "WorldError",
    "abstract",
    "check_progress",
    "check_totality",
    "context_succeeds",
    "data_path",
    "elaborate_click",
    "enumerate_choices",
    "format_response",
    "from_jsonl",
    "holds",
    "initial_state",
    "load_world",
    "load_world_file",
    "map_key",
    "new_trace",
    "parse_command_line",
    "parse_pattern",
    "player_move",
    "player_take",
    "pretty",
    "query",
    "record",
    "replay",
    "safe_step",
    "state_digest",
    "step",
    "to_jsonl",
    "typecheck",
]
