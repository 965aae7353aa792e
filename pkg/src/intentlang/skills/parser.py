"""Concrete grammar of skill files.

Definitions look like:

    action mine(p: pickaxe, r: rock) = select p; move_near r; apply r
    : mineral

`action` and `fun` are synonyms; `;` sequences (right-associative) and
`||` binds tighter; `do e recv <pat>. e` binds response payloads;
`case v of x: T => e | ...` analyzes sum-typed bindings. The return
annotation may sit before `=` or after the body.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from ..resources import ResourceType, TypeCon, make_type
from .ast import (
    Branch,
    Call,
    Case,
    DoRecv,
    Expr,
    Fail,
    Par,
    PatBind,
    Pos,
    Prim,
    Ref,
    Seq,
    SkillDef,
    Var,
    WaitDay,
)

PRIM_VERBS = ("select", "apply", "inquire", "move_near", "move_offscreen",
              "take", "move", "collect")
KEYWORDS = {"action", "fun", "do", "recv", "case", "of", "fail", "wait",
            "croptype", *PRIM_VERBS}


class SkillParseError(SyntaxError):
    def __init__(self, message: str, pos: Pos):
        super().__init__(f"{pos[0]}:{pos[1]}: {message}")
        self.pos = pos


@dataclass(frozen=True)
class Token:
    kind: str  # ident | punct | eof
    text: str
    pos: Pos


_TOKEN_RE = re.compile(
    r"(?P<ws>\s+)"
    r"|(?P<comment>--[^\n]*)"
    r"|(?P<ident>[a-z_][a-z0-9_]*)"
    r"|(?P<punct>\|\||=>|[=;|().,:<>\[\]+])"
)


def tokenize(source: str) -> list[Token]:
    tokens: list[Token] = []
    line, col = 1, 1
    i = 0
    while i < len(source):
        m = _TOKEN_RE.match(source, i)
        if m is None:
            raise SkillParseError(f"stray character {source[i]!r}", (line, col))
        text = m.group(0)
        if m.lastgroup == "ident":
            tokens.append(Token("ident", text, (line, col)))
        elif m.lastgroup == "punct":
            tokens.append(Token("punct", text, (line, col)))
        newlines = text.count("\n")
        if newlines:
            line += newlines
            col = len(text) - text.rfind("\n")
        else:
            col += len(text)
        i = m.end()
    tokens.append(Token("eof", "", (line, col)))
    return tokens


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.i = 0

    def peek(self, ahead: int = 0) -> Token:
        return self.tokens[min(self.i + ahead, len(self.tokens) - 1)]

    def next(self) -> Token:
        tok = self.tokens[self.i]
        if tok.kind != "eof":
            self.i += 1
        return tok

    def expect(self, text: str) -> Token:
        tok = self.next()
        if tok.text != text:
            raise SkillParseError(
                f"expected {text!r}, found {tok.text or 'end of input'!r}",
                tok.pos)
        return tok

    def ident(self, what: str = "identifier") -> Token:
        tok = self.next()
        if tok.kind != "ident":
            raise SkillParseError(
                f"expected {what}, found {tok.text or 'end of input'!r}",
                tok.pos)
        return tok

    # -- definitions --------------------------------------------------

    def parse_file(self) -> list[SkillDef]:
        defs: list[SkillDef] = []
        names: set[str] = set()
        while self.peek().kind != "eof":
            tok = self.peek()
            if tok.text not in ("action", "fun"):
                raise SkillParseError(
                    f"expected 'action' or 'fun', found {tok.text!r}", tok.pos)
            d = self.parse_def()
            if d.name in names:
                raise SkillParseError(f"duplicate action name {d.name!r}",
                                      d.pos)
            names.add(d.name)
            defs.append(d)
        return defs

    def parse_def(self) -> SkillDef:
        start = self.next()  # action | fun
        name = self.ident("action name")
        if name.text in KEYWORDS:
            raise SkillParseError(f"{name.text!r} is reserved", name.pos)
        typarams: list[str] = []
        if self.peek().text == "[":
            self.next()
            while True:
                tv = self.ident("type parameter")
                typarams.append(tv.text)
                if self.peek().text == ":":
                    self.next()
                    self.expect("croptype")
                if self.peek().text == ",":
                    self.next()
                    continue
                break
            self.expect("]")
        params: list[tuple[str, ResourceType]] = []
        if self.peek().text == "(":
            self.next()
            while self.peek().text != ")":
                pv = self.ident("parameter name")
                self.expect(":")
                params.append((pv.text, self.parse_type()))
                if self.peek().text == ",":
                    self.next()
                    continue
                break
            self.expect(")")
        ret: ResourceType | None = None
        if self.peek().text == ":":
            self.next()
            ret = self.parse_type()
        self.expect("=")
        body = self.parse_seq()
        if self.peek().text == ":":
            colon = self.next()
            if ret is not None:
                raise SkillParseError("duplicate return annotation", colon.pos)
            ret = self.parse_type()
        return SkillDef(name.text, tuple(typarams), tuple(params), ret, body,
                        pos=start.pos)

    # -- types ---------------------------------------------------------

    def parse_type(self) -> ResourceType:
        cons = [self.parse_type_atom()]
        while self.peek().text == "+":
            self.next()
            cons.append(self.parse_type_atom())
        if len(set(cons)) != len(cons):
            raise SkillParseError("duplicate sum member", self.peek().pos)
        return make_type(tuple(cons))

    def parse_type_atom(self) -> TypeCon:
        name = self.ident("type")
        param = None
        if self.peek().text == "(":
            self.next()
            param = self.ident("type parameter").text
            self.expect(")")
        return TypeCon(name.text, param)

    # -- expressions ----------------------------------------------------

    def parse_seq(self) -> Expr:
        left = self.parse_par()
        if self.peek().text == ";":
            self.next()
            return Seq(left, self.parse_seq())
        return left

    def parse_par(self) -> Expr:
        left = self.parse_app()
        while self.peek().text == "||":
            pos = self.next().pos
            left = Par(left, self.parse_app(), pos=pos)
        return left

    def parse_app(self) -> Expr:
        tok = self.peek()
        if tok.text == "do":
            self.next()
            action = self.parse_seq()
            self.expect("recv")
            pattern = self.parse_pattern()
            self.expect(".")
            body = self.parse_seq()
            return DoRecv(action, pattern, body, pos=tok.pos)
        if tok.text == "case":
            self.next()
            scrutinee = self.ident("case scrutinee")
            self.expect("of")
            branches = [self.parse_branch()]
            while self.peek().text == "|":
                self.next()
                branches.append(self.parse_branch())
            return Case(scrutinee.text, tuple(branches), pos=tok.pos)
        if tok.text == "fail":
            self.next()
            return Fail(pos=tok.pos)
        if tok.text == "wait":
            self.next()
            self.expect("(")
            self.expect("day")
            self.expect(")")
            return WaitDay(pos=tok.pos)
        if tok.text in PRIM_VERBS:
            self.next()
            if tok.text == "collect":
                return Prim("collect", None, pos=tok.pos)
            return Prim(tok.text, self.parse_ref(), pos=tok.pos)
        if tok.kind == "ident" and tok.text not in KEYWORDS:
            self.next()
            if self.peek().text == "(":
                self.next()
                args: list[str] = []
                while self.peek().text != ")":
                    args.append(self.ident("argument").text)
                    if self.peek().text == ",":
                        self.next()
                        continue
                    break
                self.expect(")")
                return Call(tok.text, tuple(args), pos=tok.pos)
            return Var(tok.text, pos=tok.pos)
        raise SkillParseError(
            f"expected an expression, found {tok.text or 'end of input'!r}",
            tok.pos)

    def parse_ref(self) -> Ref:
        name = self.ident("entity reference")
        qual = None
        if self.peek().text == "(":
            self.next()
            qual = self.ident("reference qualifier").text
            self.expect(")")
        return Ref(name.text, qual, pos=name.pos)

    def parse_branch(self) -> Branch:
        var = self.ident("branch binder")
        self.expect(":")
        typ = self.parse_type()
        self.expect("=>")
        body = self.parse_seq()
        return Branch(var.text, typ, body, pos=var.pos)

    def parse_pattern(self) -> tuple[PatBind, ...]:
        self.expect("<")
        binds: list[PatBind] = []
        while True:
            var = self.ident("pattern variable")
            self.expect(":")
            binds.append(PatBind(var.text, self.parse_type(), pos=var.pos))
            if self.peek().text == ",":
                self.next()
                continue
            break
        self.expect(">")
        seen: set[str] = set()
        for b in binds:
            if b.var in seen:
                raise SkillParseError(f"duplicate pattern variable {b.var!r}",
                                      b.pos)
            seen.add(b.var)
        return tuple(binds)


def parse_skills(source: str) -> list[SkillDef]:
    """Parse a skill file into definitions; raises SkillParseError with a
    line/column position on malformed input."""
    return _Parser(tokenize(source)).parse_file()
