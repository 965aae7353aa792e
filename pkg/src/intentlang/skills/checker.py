"""Resource typechecking of skills against a world's signature.

Checks that every primitive's resource needs are in scope, that case
analyses cover their sums, that do/recv patterns match declared
productions, that parallel operands touch disjoint bindings, and that
bodies produce their declared return types.
"""

from __future__ import annotations

from dataclasses import dataclass

from .. import farm
from ..resources import (
    ResourceType,
    SumType,
    TypeCon,
    free_params,
    make_type,
    members,
    substitute,
    unify,
)
from ..worlds import DIRECTIONS, WorldDef
from .ast import (
    Call,
    Case,
    DoRecv,
    Expr,
    Fail,
    Par,
    Pos,
    Prim,
    Ref,
    Seq,
    SkillDef,
    Var,
    WaitDay,
)

BOTTOM = object()  # production of `fail`: compatible with every type
Prod = tuple  # tuple[ResourceType, ...] or BOTTOM

SEL_SAME = ("same",)
SEL_UNKNOWN = ("unknown",)


@dataclass(frozen=True)
class SkillError:
    kind: str
    message: str
    pos: Pos

    def __str__(self) -> str:
        return f"{self.pos[0]}:{self.pos[1]}: {self.kind}: {self.message}"


class WorldSig:
    """Immutable resource signature of a world: which species and resource
    constructors exist, their kinds, and the tool rule table."""

    def __init__(self, world: WorldDef):
        self.world = world
        self.is_farm = world.is_farm
        rules = world.farm_rules
        self.croptypes = set(rules.growth_days) if rules else set()
        self.species_kind: dict[str, str] = {}
        self.species_type: dict[str, ResourceType] = {}
        species = {farm.species_of(n) for n in world.entities}
        if rules:
            species |= set(rules.species_kind)
        for spec_name in species:
            kind = farm.species_kind(world, spec_name)
            if kind is not None:
                self.species_kind[spec_name] = kind
            grown = self._growth_sum(spec_name)
            self.species_type[spec_name] = (
                grown if grown is not None
                else farm.species_resource(world, spec_name))
        self.con_kinds: dict[str, set[str]] = {}
        for spec_name, typ in self.species_type.items():
            kind = self.species_kind.get(spec_name)
            for m in members(typ):
                self.con_kinds.setdefault(m.name, set())
                if kind is not None:
                    self.con_kinds[m.name].add(kind)
        for extra in ("planted", "growing", "crop"):
            self.con_kinds.setdefault(extra, {"fixture"})
        self.con_kinds["crop"] = {"item"}

    def _growth_sum(self, spec_name: str) -> ResourceType | None:
        for crop in self.croptypes:
            if spec_name == f"planted_{crop}":
                return SumType((TypeCon("planted", crop),
                                TypeCon("growing", crop)))
        return None

    def constructor_known(self, name: str) -> bool:
        return name in self.con_kinds

    def constructor_parameterized(self, name: str) -> bool:
        if name in ("planted", "growing", "crop", "seeds"):
            return True
        return any(
            m.param is not None
            for t in self.species_type.values()
            for m in members(t)
            if m.name == name
        )


def world_signature(world: WorldDef) -> WorldSig:
    return WorldSig(world)


@dataclass
class _DefInfo:
    prod: object  # Prod or BOTTOM
    exit_sel: tuple


class _Checker:
    def __init__(self, defs: list[SkillDef], sig: WorldSig):
        self.defs = {d.name: d for d in defs}
        self.sig = sig
        self.errors: list[SkillError] = []
        self.memo: dict[str, _DefInfo] = {}
        self.in_progress: set[str] = set()

    def error(self, kind: str, message: str, pos: Pos) -> None:
        self.errors.append(SkillError(kind, message, pos))

    # -- definitions ----------------------------------------------------

    def check_all(self) -> None:
        for name in self.defs:
            self.def_info(name)

    def def_info(self, name: str) -> _DefInfo:
        if name in self.memo:
            return self.memo[name]
        d = self.defs[name]
        if name in self.in_progress:
            if d.ret is None:
                self.error("RecursionNeedsAnnotation",
                           f"recursive skill {name!r} needs a return "
                           "annotation", d.pos)
                return _DefInfo(BOTTOM, SEL_UNKNOWN)
            return _DefInfo((d.ret,), SEL_UNKNOWN)
        self.in_progress.add(name)
        info = self._check_def(d)
        self.in_progress.discard(name)
        self.memo[name] = info
        return info

    def _check_def(self, d: SkillDef) -> _DefInfo:
        tvars = set(d.typarams)
        for tv in d.typarams:
            if tv in self.sig.croptypes:
                self.error("UnboundTypeParam",
                           f"type parameter {tv!r} shadows a croptype", d.pos)
        env: dict[str, ResourceType] = {}
        for var, typ in d.params:
            self._check_type(typ, tvars, d.pos)
            if var in env:
                self.error("DuplicateVar", f"duplicate parameter {var!r}",
                           d.pos)
            env[var] = typ
        if d.ret is not None:
            self._check_type(d.ret, tvars, d.pos)
        prod, _sel = self.check_expr(d.body, env, SEL_SAME, tvars)
        if d.ret is not None and prod is not BOTTOM:
            if len(prod) != 1 or not self._fits(prod[0], d.ret):
                got = ", ".join(str(p) for p in prod) or "nothing"
                self.error("TypeMismatch",
                           f"{d.name!r} declares {d.ret} but produces {got}",
                           d.pos)
        if d.ret is not None:
            return _DefInfo((d.ret,), SEL_UNKNOWN)
        return _DefInfo(prod, SEL_UNKNOWN)

    def _fits(self, got: ResourceType, want: ResourceType) -> bool:
        want_members = set(members(want))
        return all(m in want_members for m in members(got))

    def _check_type(self, typ: ResourceType, tvars: set[str],
                    pos: Pos) -> None:
        for p in free_params(typ):
            if p not in tvars and p not in self.sig.croptypes:
                self.error("UnboundTypeParam",
                           f"type parameter {p!r} is unbound", pos)

    # -- expressions ----------------------------------------------------

    def check_expr(self, e: Expr, env: dict, sel: tuple,
                   tvars: set[str]) -> tuple[object, tuple]:
        """Returns (production, selection-after)."""
        match e:
            case Var(name, pos=pos):
                if name not in env:
                    self.error("UnboundResource",
                               f"unbound resource variable {name!r}", pos)
                    return BOTTOM, sel
                return (env[name],), sel
            case Prim():
                return self._check_prim(e, env, sel, tvars)
            case Seq(first, rest):
                _, sel = self.check_expr(first, env, sel, tvars)
                return self.check_expr(rest, env, sel, tvars)
            case Par(left, right, pos=pos):
                shared = self._free_vars(left, env) & self._free_vars(right, env)
                if shared:
                    self.error("OverlappingPar",
                               f"parallel operands share {sorted(shared)}",
                               pos)
                lp, sel = self.check_expr(left, env, sel, tvars)
                rp, sel = self.check_expr(right, env, sel, tvars)
                if lp is BOTTOM or rp is BOTTOM:
                    return BOTTOM, sel
                return lp + rp, sel
            case Call():
                return self._check_call(e, env, sel, tvars)
            case DoRecv(action, pattern, body, pos=pos):
                prod, sel = self.check_expr(action, env, sel, tvars)
                env2 = dict(env)
                if prod is not BOTTOM:
                    if len(prod) != len(pattern):
                        self.error(
                            "TypeMismatch",
                            f"recv pattern binds {len(pattern)} but the "
                            f"action produces {len(prod)}", pos)
                    for bind, got in zip(pattern, prod):
                        self._check_type(bind.typ, tvars, bind.pos)
                        if set(members(bind.typ)) != set(members(got)):
                            self.error(
                                "TypeMismatch",
                                f"recv binds {bind.var}: {bind.typ} but the "
                                f"action produces {got}", bind.pos)
                        env2[bind.var] = bind.typ
                else:
                    for bind in pattern:
                        env2[bind.var] = bind.typ
                return self.check_expr(body, env2, sel, tvars)
            case Case(scrutinee, branches, pos=pos):
                return self._check_case(e, env, sel, tvars)
            case Fail():
                return BOTTOM, sel
            case WaitDay():
                return (), sel
        raise TypeError(f"unexpected expression {e!r}")

    def _check_case(self, e: Case, env: dict, sel: tuple,
                    tvars: set[str]) -> tuple[object, tuple]:
        if e.scrutinee not in env:
            self.error("UnboundResource",
                       f"unbound case scrutinee {e.scrutinee!r}", e.pos)
            return BOTTOM, sel
        scrutinee_members = set(members(env[e.scrutinee]))
        covered: set[TypeCon] = set()
        prods: list[object] = []
        sels: list[tuple] = []
        for branch in e.branches:
            self._check_type(branch.typ, tvars, branch.pos)
            branch_members = set(members(branch.typ))
            if not branch_members <= scrutinee_members:
                self.error(
                    "TypeMismatch",
                    f"branch {branch.var}: {branch.typ} is not part of "
                    f"{env[e.scrutinee]}", branch.pos)
            covered |= branch_members
            env2 = dict(env)
            env2[branch.var] = branch.typ
            prod, bsel = self.check_expr(branch.body, env2, sel, tvars)
            prods.append(prod)
            sels.append(bsel)
        missing = scrutinee_members - covered
        if missing:
            shown = " + ".join(sorted(str(m) for m in missing))
            self.error("NonExhaustiveCase",
                       f"case does not cover {shown}", e.pos)
        return self._join(prods, e.pos), self._join_sel(sels)

    def _join(self, prods: list[object], pos: Pos) -> object:
        real = [p for p in prods if p is not BOTTOM]
        if not real:
            return BOTTOM
        arity = len(real[0])
        if any(len(p) != arity for p in real):
            self.error("TypeMismatch", "branches produce different shapes",
                       pos)
            return BOTTOM
        if arity == 0:
            return ()
        joined = []
        for i in range(arity):
            cons: list[TypeCon] = []
            for p in real:
                cons.extend(members(p[i]))
            joined.append(make_type(tuple(cons)))
        return tuple(joined)

    def _join_sel(self, sels: list[tuple]) -> tuple:
        uniq = {s for s in sels}
        return sels[0] if len(uniq) == 1 else SEL_UNKNOWN

    # -- primitives -----------------------------------------------------

    def _ref_type(self, ref: Ref, env: dict, tvars: set[str]
                  ) -> ResourceType | None:
        if ref.name in env:
            if ref.qual is not None:
                self.error("TypeMismatch",
                           f"variable {ref.name!r} takes no qualifier",
                           ref.pos)
            return env[ref.name]
        if ref.qual is not None:
            if (ref.qual in tvars or ref.qual in self.sig.croptypes) \
                    and self.sig.constructor_known(ref.name):
                return TypeCon(ref.name, ref.qual)
            compound = f"{ref.qual}_{ref.name}"
            if compound in self.sig.species_type:
                return self.sig.species_type[compound]
            self.error("UnboundResource",
                       f"unknown reference {ref}", ref.pos)
            return None
        if ref.name in self.sig.species_type:
            return self.sig.species_type[ref.name]
        if self.sig.constructor_known(ref.name):
            if self.sig.constructor_parameterized(ref.name):
                return TypeCon(ref.name, "_")
            return TypeCon(ref.name)
        self.error("UnboundResource",
                   f"unknown reference {ref.name!r}", ref.pos)
        return None

    def _check_prim(self, e: Prim, env: dict, sel: tuple,
                    tvars: set[str]) -> tuple[object, tuple]:
        if e.verb in ("move", "move_offscreen"):
            if e.ref is None or e.ref.name not in DIRECTIONS or e.ref.qual:
                self.error("TypeMismatch",
                           f"{e.verb} needs a direction", e.pos)
            return (), sel
        if e.verb == "collect":
            return (), sel
        typ = self._ref_type(e.ref, env, tvars)
        if typ is None:
            return BOTTOM, sel
        if e.verb == "select":
            return (typ,), ("set", typ)
        if e.verb == "move_near":
            return (), sel
        if e.verb == "take":
            return (), sel
        if e.verb == "inquire":
            return self._inquire_prod(typ, e.pos), sel
        if e.verb == "apply":
            return self._apply_prod(typ, sel, e.pos), sel
        raise TypeError(f"unexpected verb {e.verb!r}")

    def _inquire_prod(self, target: ResourceType, pos: Pos) -> object:
        prods: list[ResourceType] = []
        for m in members(target):
            if m.name in ("planted", "growing"):
                prods.append(SumType((TypeCon("crop", m.param),
                                      TypeCon("growing", m.param))))
            elif self.sig.con_kinds.get(m.name) == {"item"}:
                prods.append(m)
            else:
                prods.append(None)
        distinct = {str(p) for p in prods}
        if len(distinct) > 1:
            self.error("TypeMismatch",
                       f"inquire on {target} has mixed productions", pos)
            return BOTTOM
        return () if prods[0] is None else (prods[0],)

    def _apply_prod(self, target: ResourceType, sel: tuple,
                    pos: Pos) -> object:
        if sel == SEL_SAME or sel == SEL_UNKNOWN:
            self.error("TypeMismatch",
                       "apply needs a selected tool in scope", pos)
            return BOTTOM
        tool = sel[1]
        if not self.sig.is_farm:
            self.error("TypeMismatch", "apply needs a farm world", pos)
            return BOTTOM
        produces: list[str] = []
        prod_types: list[ResourceType] = []
        for tm in members(tool):
            for gm in members(target):
                if tm.name == farm.ROD and gm.name == farm.WATER:
                    prod = farm.FISH_TYPE
                else:
                    found = farm.find_tool_row(
                        self.sig.world.farm_rules, tm, gm)
                    if found is None:
                        self.error(
                            "TypeMismatch",
                            f"no rule applies {tm} to {gm}", pos)
                        return BOTTOM
                    row, binding = found
                    prod = substitute(row.produces, binding)
                produces.append(str(prod))
                prod_types.append(prod)
        if len(set(produces)) > 1:
            self.error("TypeMismatch",
                       f"applying {tool} to {target} is ambiguous", pos)
            return BOTTOM
        return (prod_types[0],)

    # -- calls ------------------------------------------------------------

    def _check_call(self, e: Call, env: dict, sel: tuple,
                    tvars: set[str]) -> tuple[object, tuple]:
        callee = self.defs.get(e.name)
        if callee is None:
            self.error("UnknownAction", f"unknown action {e.name!r}", e.pos)
            return BOTTOM, sel
        n_ty, n_val = len(callee.typarams), len(callee.params)
        binding: dict[str, str] = {}
        if len(e.args) == n_ty + n_val:
            ty_args, val_args = e.args[:n_ty], e.args[n_ty:]
            for tv, arg in zip(callee.typarams, ty_args):
                if arg not in tvars and arg not in self.sig.croptypes:
                    self.error("UnboundTypeParam",
                               f"{arg!r} is not a croptype or bound type "
                               "parameter", e.pos)
                binding[tv] = arg
        elif len(e.args) == n_val:
            val_args = e.args
        else:
            self.error("ArityMismatch",
                       f"{e.name} expects {n_val} arguments "
                       f"(or {n_ty + n_val} with type arguments), "
                       f"got {len(e.args)}", e.pos)
            return BOTTOM, sel
        callee_tvars = set(callee.typarams)
        for arg, (pvar, ptyp) in zip(val_args, callee.params):
            arg_type = self._ref_type(Ref(arg, pos=e.pos), env, tvars)
            if arg_type is None:
                continue
            if not unify(arg_type, ptyp, callee_tvars, binding):
                self.error("TypeMismatch",
                           f"argument {arg!r}: expected {ptyp}, "
                           f"got {arg_type}", e.pos)
        info = self.def_info(e.name)
        prod = info.prod
        if prod is not BOTTOM:
            needed = set()
            for p in prod:
                needed |= free_params(p) & callee_tvars
            if needed - set(binding):
                self.error("TypeMismatch",
                           "cannot infer type arguments "
                           f"{sorted(needed - set(binding))} for {e.name}",
                           e.pos)
            prod = tuple(substitute(p, binding) for p in prod)
        # Calls may reselect internally; selection is unknown afterwards.
        return prod, SEL_UNKNOWN

    # -- free variables ----------------------------------------------------

    def _free_vars(self, e: Expr, env: dict) -> set[str]:
        out: set[str] = set()

        def walk(node: Expr, bound: set[str]) -> None:
            match node:
                case Var(name):
                    if name in env and name not in bound:
                        out.add(name)
                case Prim(_, ref):
                    if ref is not None and ref.name in env \
                            and ref.name not in bound:
                        out.add(ref.name)
                case Seq(a, b):
                    walk(a, bound)
                    walk(b, bound)
                case Par(a, b):
                    walk(a, bound)
                    walk(b, bound)
                case Call(_, args):
                    for a in args:
                        if a in env and a not in bound:
                            out.add(a)
                case DoRecv(action, pattern, body):
                    walk(action, bound)
                    walk(body, bound | {p.var for p in pattern})
                case Case(scrutinee, branches):
                    if scrutinee in env and scrutinee not in bound:
                        out.add(scrutinee)
                    for br in branches:
                        walk(br.body, bound | {br.var})
                case Fail() | WaitDay():
                    pass

        walk(e, set())
        return out


def typecheck_skill(defs: list[SkillDef], world: WorldDef) -> list[SkillError]:
    """Check definitions against a world signature; empty list means ok."""
    checker = _Checker(defs, world_signature(world))
    checker.check_all()
    return checker.errors
