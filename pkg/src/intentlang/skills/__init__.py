"""The resource-typed skill language: parser, checker, and interpreter."""

from .ast import Expr, Failed, Outcome, Produced, SkillDef
from .checker import SkillError, typecheck_skill, world_signature
from .interp import (
    DEFAULT_DEPTH_LIMIT,
    SkillArgumentError,
    SkillRuntimeError,
    run_skill,
)
from .parser import SkillParseError, parse_skills

__all__ = [
    "DEFAULT_DEPTH_LIMIT",
    "Expr",
    "Failed",
    "Outcome",
    "Produced",
    "SkillArgumentError",
    "SkillDef",
    "SkillError",
    "SkillParseError",
    "SkillRuntimeError",
    "parse_skills",
    "run_skill",
    "typecheck_skill",
    "world_signature",
]
