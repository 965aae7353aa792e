"""Abstract syntax of the resource-typed skill language."""

from __future__ import annotations

from dataclasses import dataclass, field

from ..resources import ResourceType

Pos = tuple[int, int]  # (line, column), 1-based


@dataclass(frozen=True)
class Ref:
    """An entity reference: a variable, a species, a typed reference like
    `seeds(t)`, or a compound like `door(shop)`."""

    name: str
    qual: str | None = None
    pos: Pos = field(default=(0, 0), compare=False)

    def __str__(self) -> str:
        return self.name if self.qual is None else f"{self.name}({self.qual})"


@dataclass(frozen=True)
class Prim:
    verb: str  # select | apply | inquire | move_near | move_offscreen | take | move | collect
    ref: Ref | None
    pos: Pos = field(default=(0, 0), compare=False)


@dataclass(frozen=True)
class Seq:
    first: "Expr"
    rest: "Expr"


@dataclass(frozen=True)
class Par:
    left: "Expr"
    right: "Expr"
    pos: Pos = field(default=(0, 0), compare=False)


@dataclass(frozen=True)
class Call:
    name: str
    args: tuple[str, ...]
    pos: Pos = field(default=(0, 0), compare=False)


@dataclass(frozen=True)
class Var:
    name: str
    pos: Pos = field(default=(0, 0), compare=False)


@dataclass(frozen=True)
class PatBind:
    var: str
    typ: ResourceType
    pos: Pos = field(default=(0, 0), compare=False)


@dataclass(frozen=True)
class DoRecv:
    action: "Expr"
    pattern: tuple[PatBind, ...]
    body: "Expr"
    pos: Pos = field(default=(0, 0), compare=False)


@dataclass(frozen=True)
class Branch:
    var: str
    typ: ResourceType
    body: "Expr"
    pos: Pos = field(default=(0, 0), compare=False)


@dataclass(frozen=True)
class Case:
    scrutinee: str
    branches: tuple[Branch, ...]
    pos: Pos = field(default=(0, 0), compare=False)


@dataclass(frozen=True)
class Fail:
    pos: Pos = field(default=(0, 0), compare=False)


@dataclass(frozen=True)
class WaitDay:
    pos: Pos = field(default=(0, 0), compare=False)


Expr = Prim | Seq | Par | Call | Var | DoRecv | Case | Fail | WaitDay


@dataclass(frozen=True)
class SkillDef:
    name: str
    typarams: tuple[str, ...]
    params: tuple[tuple[str, ResourceType], ...]
    ret: ResourceType | None
    body: Expr
    pos: Pos = field(default=(0, 0), compare=False)


@dataclass(frozen=True)
class Produced:
    bindings: dict  # var -> (ResourceType, entity name)


@dataclass(frozen=True)
class Failed:
    at: str  # canonical intent text, or "fail"
    reason: str


Outcome = Produced | Failed
