"""Command-line application: play, serve, check, run-skill, trace.

Exit codes: 0 ok, 1 check violations or failed outcome, 2 usage errors.
"""

from __future__ import annotations

import argparse
import re
import sys

from . import repl, service, traces
from .contexts import check_progress
from .skills import parse_skills, run_skill, typecheck_skill
from .skills.ast import Produced
from .skills.interp import SkillArgumentError
from .skills.parser import SkillParseError
from .step import check_totality
from .worlds import GameState, WorldError, load_world_file

USAGE_EXIT = 2


def _load(path: str) -> GameState:
    try:
        return load_world_file(path)
    except FileNotFoundError:
        print(f"error: no such world file: {path}", file=sys.stderr)
        raise SystemExit(USAGE_EXIT)
    except WorldError as exc:
        print(f"error: {exc}", file=sys.stderr)
        raise SystemExit(USAGE_EXIT)


def cmd_play(args) -> int:
    state = _load(args.world)
    repl.run_repl(state, profile=args.profile, seed=args.seed)
    return 0


def cmd_serve(args) -> int:
    service.serve(args.world_dir, listen=args.listen, http=args.http)
    return 0


def cmd_check(args) -> int:
    state = _load(args.world)
    if args.seed is not None:
        state = state.replace(rng_seed=args.seed)
    if args.kind == "totality":
        report = check_totality(state, max_states=args.max_states,
                                max_day=args.max_day)
    else:
        report = check_progress(state, max_states=args.max_states,
                                max_day=args.max_day)
    print(report.to_json())
    return 0 if report.ok else 1


def cmd_run_skill(args) -> int:
    state = _load(args.world)
    if args.seed is not None:
        state = state.replace(rng_seed=args.seed)
    try:
        with open(args.skills, "r", encoding="utf-8") as fh:
            source = fh.read()
    except FileNotFoundError:
        print(f"error: no such skill file: {args.skills}", file=sys.stderr)
        return USAGE_EXIT
    try:
        defs = parse_skills(source)
    except SkillParseError as exc:
        print(f"error: {args.skills}:{exc}", file=sys.stderr)
        return USAGE_EXIT
    errors = typecheck_skill(defs, state.world)
    if errors:
        for err in errors:
            print(f"error: {args.skills}:{err}", file=sys.stderr)
        return 1

    entry, type_args = _parse_entry(args.entry, defs)
    skill_args = {}
    for pair in args.arg or []:
        var, _, entity = pair.partition("=")
        if not entity:
            print(f"error: --arg needs var=entity, got {pair!r}",
                  file=sys.stderr)
            return USAGE_EXIT
        skill_args[var] = entity
    try:
        final, outcome, trace = run_skill(
            state, defs, entry, skill_args, type_args=type_args,
            par_right_first=(args.par_order == "right"))
    except SkillArgumentError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_EXIT
    for entry_row in trace.entries:
        from .intents import pretty

        print(f"{entry_row.index}: {pretty(entry_row.intent)} "
              f"-> {entry_row.verdict}: {entry_row.message}")
    if isinstance(outcome, Produced):
        shown = {var: [str(t), e] for var, (t, e) in outcome.bindings.items()}
        print(f"produced: {shown}")
        return 0
    print(f"failed at {outcome.at}: {outcome.reason}")
    return 1


def _parse_entry(text: str, defs) -> tuple[str, dict[str, str]]:
    m = re.match(r"^([a-z_][a-z0-9_]*)(?:\[([a-z0-9_,\s]+)\])?$", text)
    if m is None:
        print(f"error: bad entry {text!r}", file=sys.stderr)
        raise SystemExit(USAGE_EXIT)
    name = m.group(1)
    if m.group(2) is None:
        return name, {}
    values = [v.strip() for v in m.group(2).split(",")]
    for d in defs:
        if d.name == name:
            if len(values) != len(d.typarams):
                print(f"error: {name} takes {len(d.typarams)} type "
                      f"arguments", file=sys.stderr)
                raise SystemExit(USAGE_EXIT)
            return name, dict(zip(d.typarams, values))
    return name, {}


def cmd_trace_query(args) -> int:
    trace = _read_trace(args.trace)
    try:
        pattern = traces.parse_pattern(args.pattern)
    except traces.PatternError as exc:
        print(f"error: bad pattern: {exc}", file=sys.stderr)
        print(f"  {args.pattern}", file=sys.stderr)
        print(f"  {' ' * exc.offset}^", file=sys.stderr)
        return USAGE_EXIT
    for start, end in traces.query(trace, pattern):
        print(f"{start}..{end}")
    return 0


def cmd_trace_replay(args) -> int:
    trace = _read_trace(args.trace)
    state = _load(args.world)
    try:
        outcome = traces.replay(state, trace)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_EXIT
    print(outcome.describe())
    return 0 if outcome.exact else 1


def _read_trace(path: str) -> traces.Trace:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return traces.from_jsonl(fh.read())
    except FileNotFoundError:
        print(f"error: no such trace file: {path}", file=sys.stderr)
        raise SystemExit(USAGE_EXIT)
    except traces.TraceFormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        raise SystemExit(USAGE_EXIT)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="intentlang",
        description="Play, serve, check, and script intent-language worlds.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_play = sub.add_parser("play", help="interactive session")
    p_play.add_argument("--world", required=True)
    p_play.add_argument("--profile", default="cli",
                        choices=service.PROFILES)
    p_play.add_argument("--seed", type=int, default=None)
    p_play.set_defaults(func=cmd_play)

    p_serve = sub.add_parser("serve", help="run the protocol service")
    p_serve.add_argument("--world-dir", default=None)
    p_serve.add_argument("--listen", default=None,
                         help="host:port (omit for stdio)")
    p_serve.add_argument("--http", action="store_true",
                         help="HTTP mode instead of line-delimited TCP")
    p_serve.set_defaults(func=cmd_serve)

    p_check = sub.add_parser("check", help="totality / progress reports")
    p_check.add_argument("--world", required=True)
    group = p_check.add_mutually_exclusive_group(required=True)
    group.add_argument("--totality", dest="kind", action="store_const",
                       const="totality")
    group.add_argument("--progress", dest="kind", action="store_const",
                       const="progress")
    p_check.add_argument("--max-states", type=int, default=10_000)
    p_check.add_argument("--max-day", type=int, default=None)
    p_check.add_argument("--seed", type=int, default=None)
    p_check.set_defaults(func=cmd_check)

    p_skill = sub.add_parser("run-skill", help="run a skill program")
    p_skill.add_argument("--world", required=True)
    p_skill.add_argument("--skills", required=True)
    p_skill.add_argument("--entry", required=True,
                         help="name or name[croptype,...]")
    p_skill.add_argument("--arg", action="append", metavar="VAR=ENTITY")
    p_skill.add_argument("--seed", type=int, default=None)
    p_skill.add_argument("--par-order", choices=("left", "right"),
                         default="left")
    p_skill.set_defaults(func=cmd_run_skill)

    p_trace = sub.add_parser("trace", help="trace queries and replay")
    trace_sub = p_trace.add_subparsers(dest="trace_command", required=True)
    p_query = trace_sub.add_parser("query")
    p_query.add_argument("trace")
    p_query.add_argument("pattern")
    p_query.set_defaults(func=cmd_trace_query)
    p_replay = trace_sub.add_parser("replay")
    p_replay.add_argument("trace")
    p_replay.add_argument("--world", required=True)
    p_replay.set_defaults(func=cmd_trace_replay)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
