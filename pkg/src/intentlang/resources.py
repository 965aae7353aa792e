"""Resource types: atoms like `pickaxe`, parameterized constructors like
`seeds(parsnip)`, and sums like `crop(t) + growing(t)`."""

from __future__ import annotations

import re
from dataclasses import dataclass

_ATOM_RE = re.compile(r"^([a-z_][a-z0-9_]*)(?:\(([a-z_][a-z0-9_]*)\))?$")


class ResourceTypeError(ValueError):
    pass


@dataclass(frozen=True)
class TypeCon:
    """A single constructor, optionally applied to a croptype parameter.

    The parameter is a bare identifier: either a croptype constant
    (e.g. `parsnip`) or a type variable bound by an enclosing binder.
    """

    name: str
    param: str | None = None

    def __str__(self) -> str:
        if self.param is None:
            return self.name
        return f"{self.name}({self.param})"


@dataclass(frozen=True)
class SumType:
    members: tuple[TypeCon, ...]

    def __str__(self) -> str:
        return " + ".join(str(m) for m in self.members)


ResourceType = TypeCon | SumType


def parse_type(text: str) -> ResourceType:
    """Parse `a`, `a(x)`, or a `+`-separated sum of those."""
    parts = [p.strip() for p in text.split("+")]
    members = []
    for part in parts:
        m = _ATOM_RE.match(part)
        if m is None:
            raise ResourceTypeError(f"malformed resource type: {part!r}")
        members.append(TypeCon(m.group(1), m.group(2)))
    if len(members) == 1:
        return members[0]
    if len(set(members)) != len(members):
        raise ResourceTypeError(f"duplicate sum member in {text!r}")
    return SumType(tuple(members))


def members(t: ResourceType) -> tuple[TypeCon, ...]:
    return t.members if isinstance(t, SumType) else (t,)


def make_type(cons: tuple[TypeCon, ...]) -> ResourceType:
    uniq: list[TypeCon] = []
    for c in cons:
        if c not in uniq:
            uniq.append(c)
    return uniq[0] if len(uniq) == 1 else SumType(tuple(uniq))


def substitute(t: ResourceType, binding: dict[str, str]) -> ResourceType:
    subst = tuple(
        TypeCon(m.name, binding.get(m.param, m.param) if m.param else None)
        for m in members(t)
    )
    return make_type(subst)


def free_params(t: ResourceType) -> set[str]:
    return {m.param for m in members(t) if m.param is not None}


def is_subtype(sub: ResourceType, sup: ResourceType) -> bool:
    """Width subtyping on sums: every member of `sub` appears in `sup`."""
    return set(members(sub)) <= set(members(sup))


def unify(arg: ResourceType, param: ResourceType, type_vars: set[str],
          binding: dict[str, str]) -> bool:
    """Match a concrete-ish argument type against a parameter type,
    extending `binding` for variables in `type_vars`.

    Each member of `arg` must match some member of `param` by constructor
    name; parameters unify one way (param side may bind variables).
    """
    for am in members(arg):
        ok = False
        for pm in members(param):
            if am.name != pm.name:
                continue
            if pm.param is None and am.param is None:
                ok = True
                break
            if pm.param is None or am.param is None:
                continue
            if pm.param in type_vars:
                bound = binding.get(pm.param)
                if bound is None:
                    binding[pm.param] = am.param
                    ok = True
                    break
                if bound == am.param:
                    ok = True
                    break
            elif pm.param == am.param or am.param in type_vars:
                # `am.param in type_vars` covers checking a body against a
                # declared return type inside the same binder scope.
                ok = True
                break
        if not ok:
            return False
    return True
