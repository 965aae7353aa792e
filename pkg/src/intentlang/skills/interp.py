"""Big-step interpreter running skills as programs of core intents."""

from __future__ import annotations

from dataclasses import dataclass

from .. import farm
from .. import intents as it
from ..resources import ResourceType, members, substitute, unify
from ..step import step
from ..traces import Trace, new_trace, record
from ..worlds import GameState
from .ast import (
    Call,
    Case,
    DoRecv,
    Expr,
    Fail,
    Failed,
    Outcome,
    Par,
    Prim,
    Produced,
    Ref,
    Seq,
    SkillDef,
    Var,
    WaitDay,
)

DEFAULT_DEPTH_LIMIT = 10_000


class SkillRuntimeError(RuntimeError):
    """Engine invariant violation: unreachable if typechecking is sound."""


class SkillArgumentError(ValueError):
    """Bad entry-point arguments (missing entity, wrong resource type)."""


class _Failure(Exception):
    def __init__(self, at: str, reason: str):
        super().__init__(f"{at}: {reason}")
        self.at = at
        self.reason = reason


Value = list[tuple[ResourceType, str]]  # payload-style bindings


@dataclass
class _Runner:
    state: GameState
    defs: dict[str, SkillDef]
    trace: Trace
    depth_limit: int
    par_right_first: bool
    depth: int = 0

    # -- primitive steps -------------------------------------------------

    def do_step(self, intent: it.CoreIntent) -> Value:
        result = step(self.state, intent)
        self.trace = record(self.trace, intent, result)
        self.state = result.next
        if result.resp.verdict != "success":
            raise _Failure(it.pretty(intent), result.resp.message)
        return list(result.resp.payload)

    def resolve(self, verb: str, ref: Ref, env: dict,
                tbind: dict[str, str]) -> str:
        if ref.qual is None and ref.name in env:
            return env[ref.name][1]
        qual = tbind.get(ref.qual, ref.qual) if ref.qual else None
        entity = farm.resolve_reference(self.state, ref.name, qual)
        if entity is None:
            shown = ref.name if qual is None else f"{ref.name}({qual})"
            raise _Failure(f"{verb} {shown}", "no such entity")
        return entity

    def eval(self, e: Expr, env: dict, tbind: dict[str, str]) -> Value:
        match e:
            case Prim(verb, ref):
                if verb in ("move", "move_offscreen"):
                    ctor = it.Move if verb == "move" else it.MoveOffscreen
                    return self.do_step(ctor(ref.name))
                if verb == "collect":
                    return self.do_step(it.Collect())
                entity = self.resolve(verb, ref, env, tbind)
                ctor = {
                    "select": it.Select,
                    "apply": it.Apply,
                    "inquire": it.Inquire,
                    "move_near": it.MoveNear,
                    "take": it.Take,
                }[verb]
                return self.do_step(ctor(entity))
            case WaitDay():
                return self.do_step(it.Wait())
            case Var(name):
                if name not in env:
                    raise SkillRuntimeError(f"unbound variable {name!r}")
                return [env[name]]
            case Seq(first, rest):
                self.eval(first, env, tbind)
                return self.eval(rest, env, tbind)
            case Par(left, right):
                if self.par_right_first:
                    right_val = self.eval(right, env, tbind)
                    left_val = self.eval(left, env, tbind)
                else:
                    left_val = self.eval(left, env, tbind)
                    right_val = self.eval(right, env, tbind)
                return left_val + right_val
            case Call(name, args):
                return self.call(e, env, tbind)
            case DoRecv(action, pattern, body):
                value = self.eval(action, env, tbind)
                if len(value) != len(pattern):
                    raise SkillRuntimeError(
                        f"recv pattern arity {len(pattern)} does not match "
                        f"payload arity {len(value)}")
                env2 = dict(env)
                for bind, (got_type, entity) in zip(pattern, value):
                    wanted = substitute(bind.typ, tbind)
                    if not set(members(got_type)) <= set(members(wanted)):
                        raise SkillRuntimeError(
                            f"payload {got_type} does not match pattern "
                            f"{bind.var}: {wanted}")
                    env2[bind.var] = (got_type, entity)
                return self.eval(body, env2, tbind)
            case Case(scrutinee, branches):
                if scrutinee not in env:
                    raise SkillRuntimeError(
                        f"unbound case scrutinee {scrutinee!r}")
                got_type, entity = env[scrutinee]
                for branch in branches:
                    wanted = substitute(branch.typ, tbind)
                    if set(members(got_type)) <= set(members(wanted)):
                        env2 = dict(env)
                        env2[branch.var] = (got_type, entity)
                        return self.eval(branch.body, env2, tbind)
                raise SkillRuntimeError(
                    f"no case branch matches payload type {got_type}")
            case Fail():
                raise _Failure("fail", "explicit failure")
        raise TypeError(f"unexpected expression {e!r}")

    def call(self, call: Call, env: dict, tbind: dict[str, str]) -> Value:
        callee = self.defs.get(call.name)
        if callee is None:
            raise SkillRuntimeError(f"unknown action {call.name!r}")
        self.depth += 1
        if self.depth > self.depth_limit:
            raise SkillRuntimeError(
                f"call depth limit {self.depth_limit} exceeded")
        try:
            n_ty, n_val = len(callee.typarams), len(callee.params)
            binding: dict[str, str] = {}
            if len(call.args) == n_ty + n_val:
                for tv, arg in zip(callee.typarams, call.args[:n_ty]):
                    binding[tv] = tbind.get(arg, arg)
                val_args = call.args[n_ty:]
            elif len(call.args) == n_val:
                val_args = call.args
            else:
                raise SkillRuntimeError(
                    f"bad arity calling {call.name!r}")
            env2: dict = {}
            tvars = set(callee.typarams)
            for arg, (pvar, ptyp) in zip(val_args, callee.params):
                if arg in env:
                    got_type, entity = env[arg]
                else:
                    entity = farm.resolve_reference(self.state, arg)
                    if entity is None:
                        raise _Failure(arg, "no such entity")
                    got_type = farm.entity_resource(self.state, entity)
                if not unify(got_type, ptyp, tvars, binding):
                    raise SkillRuntimeError(
                        f"argument {arg!r} of type {got_type} does not "
                        f"match {pvar}: {ptyp}")
                env2[pvar] = (got_type, entity)
            return self.eval(callee.body, env2, binding)
        finally:
            self.depth -= 1


def run_skill(state: GameState, defs: list[SkillDef], entry: str,
              args: dict[str, str] | None = None,
              type_args: dict[str, str] | None = None,
              depth_limit: int = DEFAULT_DEPTH_LIMIT,
              par_right_first: bool = False,
              ) -> tuple[GameState, Outcome, Trace]:
    """Run a named skill against the engine.

    Returns the final state, the outcome, and the trace of every engine
    step taken. On failure the final state is the state just before the
    failing primitive (failed steps never change state).
    """
    defs_map = {d.name: d for d in defs}
    if entry not in defs_map:
        raise SkillArgumentError(f"unknown entry skill {entry!r}")
    d = defs_map[entry]
    args = dict(args or {})
    tbind = dict(type_args or {})
    for tv in tbind:
        if tv not in d.typarams:
            raise SkillArgumentError(f"{entry} has no type parameter {tv!r}")
    env: dict = {}
    tvars = set(d.typarams)
    for pvar, ptyp in d.params:
        if pvar not in args:
            raise SkillArgumentError(f"missing argument {pvar!r}")
        entity = args.pop(pvar)
        if entity not in state.entities:
            raise SkillArgumentError(f"no entity {entity!r} in this world")
        got_type = farm.entity_resource(state, entity)
        if not unify(got_type, substitute(ptyp, tbind), tvars, tbind):
            raise SkillArgumentError(
                f"{pvar}={entity} has type {got_type}, expected {ptyp}")
        env[pvar] = (got_type, entity)
    if args:
        raise SkillArgumentError(f"unknown arguments {sorted(args)}")
    missing = [tv for tv in d.typarams if tv not in tbind]
    if missing:
        raise SkillArgumentError(
            f"type arguments {missing} neither given nor inferable")

    runner = _Runner(
        state=state,
        defs=defs_map,
        trace=new_trace(state),
        depth_limit=depth_limit,
        par_right_first=par_right_first,
    )
    try:
        value = runner.eval(d.body, env, tbind)
    except _Failure as fail:
        return runner.state, Failed(fail.at, fail.reason), runner.trace
    if not value:
        bindings: dict = {}
    elif len(value) == 1:
        bindings = {"result": value[0]}
    else:
        bindings = {f"result_{i + 1}": v for i, v in enumerate(value)}
    return runner.state, Produced(bindings), runner.trace
