"""Surface abstract syntax and the recursive-descent parser.

Precedence, tightest first: application, `*`, `->` (right-associative),
`a = b in T`. Binders `(x : A) -> B`, `{x : A} -> B`, and `(x : A) * B` are
recognized by lookahead at the position where the corresponding operator may
start; `(t : A)` elsewhere is an ascription.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

from .diagnostics import ErrorCode, SourceSpan, fail
from .lexer import Token, tokenize


def _span():
    return field(default=None, compare=False, repr=False)


class STerm:
    __slots__ = ()


@dataclass(frozen=True, slots=True)
class SName(STerm):
    name: str
    levels: Optional[tuple[Union[int, str], ...]] = None
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True, slots=True)
class SAt(STerm):
    """An `@name` head: fully explicit reference, no implicit solving."""

    name: str
    levels: Optional[tuple[Union[int, str], ...]] = None
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True, slots=True)
class SType(STerm):
    level: Union[int, str]
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True, slots=True)
class SPi(STerm):
    binder: Optional[str]
    domain: STerm
    codomain: STerm
    implicit: bool = False
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True, slots=True)
class SSigma(STerm):
    binder: Optional[str]
    first: STerm
    second: STerm
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True, slots=True)
class SLambda(STerm):
    binders: tuple[str, ...]
    body: STerm
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True, slots=True)
class SApp(STerm):
    fn: STerm
    arg: STerm
    braced: bool = False
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True, slots=True)
class SPair(STerm):
    fst: STerm
    snd: STerm
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True, slots=True)
class SId(STerm):
    type: STerm
    lhs: STerm
    rhs: STerm
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True, slots=True)
class SAscribe(STerm):
    term: STerm
    annotation: STerm
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True, slots=True)
class SHole(STerm):
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True, slots=True)
class DCtor:
    kind: str  # "point" or "path"
    name: str
    type: STerm
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True, slots=True)
class DDef:
    name: str
    univars: tuple[str, ...]
    annotation: Optional[STerm]
    body: STerm
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True, slots=True)
class DAxiom:
    name: str
    univars: tuple[str, ...]
    annotation: STerm
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True, slots=True)
class DHit:
    name: str
    univars: tuple[str, ...]
    params: tuple[tuple[str, STerm], ...]
    ctors: tuple[DCtor, ...]
    span: Optional[SourceSpan] = _span()


Decl = Union[DDef, DAxiom, DHit]


@dataclass(frozen=True, slots=True)
class Module:
    decls: tuple[Decl, ...]


_ATOM_START = frozenset({"name", "Type", "(", "_", "@", "\\"})
_ARG_START = frozenset({"name", "Type", "(", "_", "@"})


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.index = 0

    def peek(self, offset: int = 0) -> Token:
        i = min(self.index + offset, len(self.tokens) - 1)
        return self.tokens[i]

    def advance(self) -> Token:
        tok = self.tokens[self.index]
        if tok.kind != "eof":
            self.index += 1
        return tok

    def expect(self, kind: str) -> Token:
        tok = self.peek()
        if tok.kind != kind:
            found = tok.text if tok.kind != "eof" else "end of input"
            fail(ErrorCode.PARSE, f"expected {kind!r}, found {found!r}", tok.span)
        return self.advance()

    # ----- terms ----------------------------------------------------------

    def parse_term(self) -> STerm:
        lhs = self.parse_arrow()
        if self.peek().kind == "=":
            span = self.advance().span
            rhs = self.parse_arrow()
            self.expect("in")
            ty = self.parse_arrow()
            return SId(ty, lhs, rhs, span=span)
        return lhs

    def parse_arrow(self) -> STerm:
        binder = self._try_binder("->")
        if binder is not None:
            name, domain, implicit, span = binder
            return SPi(name, domain, self.parse_arrow(), implicit, span=span)
        t = self.parse_prod()
        if self.peek().kind == "->":
            span = self.advance().span
            return SPi(None, t, self.parse_arrow(), False, span=span)
        return t

    def parse_prod(self) -> STerm:
        binder = self._try_binder("*")
        if binder is not None:
            name, first, _implicit, span = binder
            return SSigma(name, first, self.parse_prod(), span=span)
        t = self.parse_app()
        if self.peek().kind == "*":
            span = self.advance().span
            return SSigma(None, t, self.parse_prod(), span=span)
        return t

    def _try_binder(self, after: str):
        """Parse `(x : A)` or `{x : A}` followed by the operator `after`;
        on any other continuation, rewind and report no binder. Implicit
        binders exist only for `->` and commit once the braces match."""
        open_tok = self.peek()
        if open_tok.kind not in ("(", "{"):
            return None
        implicit = open_tok.kind == "{"
        if implicit and after != "->":
            return None
        if self.peek(1).kind not in ("name", "_") or self.peek(2).kind != ":":
            return None
        saved = self.index
        self.advance()
        name = self.advance().text
        self.advance()
        domain = self.parse_term()
        close = ")" if not implicit else "}"
        if self.peek().kind != close:
            if implicit:
                self.expect(close)
            self.index = saved
            return None
        self.advance()
        if self.peek().kind != after:
            if implicit:
                self.expect(after)
            self.index = saved
            return None
        op = self.advance()
        return name, domain, implicit, op.span

    def parse_app(self) -> STerm:
        t = self.parse_atom()
        while True:
            kind = self.peek().kind
            if kind in _ARG_START:
                arg = self.parse_atom()
                t = SApp(t, arg, braced=False, span=arg.span)
            elif kind == "{":
                span = self.advance().span
                if self.peek().kind == "_":
                    hole = self.advance()
                    arg: STerm = SHole(span=hole.span)
                else:
                    arg = self.parse_term()
                self.expect("}")
                t = SApp(t, arg, braced=True, span=span)
            else:
                return t

    def parse_atom(self) -> STerm:
        tok = self.peek()
        if tok.kind == "name":
            self.advance()
            return SName(tok.text, self._maybe_levels(), span=tok.span)
        if tok.kind == "@":
            self.advance()
            name = self.expect("name")
            return SAt(name.text, self._maybe_levels(), span=tok.span)
        if tok.kind == "Type":
            self.advance()
            level = self.peek()
            if level.kind == "number":
                self.advance()
                return SType(int(level.text), span=tok.span)
            if level.kind == "name":
                self.advance()
                return SType(level.text, span=tok.span)
            fail(ErrorCode.PARSE, "expected a universe level after 'Type'",
                 level.span)
        if tok.kind == "_":
            self.advance()
            return SHole(span=tok.span)
        if tok.kind == "\\":
            self.advance()
            binders = []
            while self.peek().kind in ("name", "_"):
                binders.append(self.advance().text)
            if not binders:
                fail(ErrorCode.PARSE, "expected a binder after '\\'",
                     self.peek().span)
            self.expect(".")
            body = self.parse_term()
            return SLambda(tuple(binders), body, span=tok.span)
        if tok.kind == "(":
            self.advance()
            t = self.parse_term()
            if self.peek().kind == ":":
                self.advance()
                ann = self.parse_term()
                self.expect(")")
                return SAscribe(t, ann, span=tok.span)
            if self.peek().kind == ",":
                parts = [t]
                while self.peek().kind == ",":
                    self.advance()
                    parts.append(self.parse_term())
                self.expect(")")
                t = parts[-1]
                for part in reversed(parts[:-1]):
                    t = SPair(part, t, span=tok.span)
                return t
            self.expect(")")
            return t
        if tok.kind == "number":
            fail(ErrorCode.PARSE, "numbers appear only as universe levels",
                 tok.span)
        found = tok.text if tok.kind != "eof" else "end of input"
        fail(ErrorCode.PARSE, f"expected a term, found {found!r}", tok.span)

    def _maybe_levels(self) -> Optional[tuple[Union[int, str], ...]]:
        if self.peek().kind != "[":
            return None
        self.advance()
        levels: list[Union[int, str]] = []
        while self.peek().kind in ("number", "name"):
            tok = self.advance()
            levels.append(int(tok.text) if tok.kind == "number" else tok.text)
        if not levels:
            fail(ErrorCode.PARSE, "expected universe levels inside '[ ]'",
                 self.peek().span)
        self.expect("]")
        return tuple(levels)

    # ----- declarations ---------------------------------------------------

    def parse_univars(self) -> tuple[str, ...]:
        if self.peek().kind != "[":
            return ()
        self.advance()
        names = []
        while self.peek().kind == "name":
            names.append(self.advance().text)
        if not names:
            fail(ErrorCode.PARSE, "expected universe variable names inside '[ ]'",
                 self.peek().span)
        self.expect("]")
        return tuple(names)

    def parse_decl(self) -> Decl:
        tok = self.peek()
        if tok.kind == "def":
            self.advance()
            name = self.expect("name")
            univars = self.parse_univars()
            annotation = None
            if self.peek().kind == ":":
                self.advance()
                annotation = self.parse_term()
            self.expect(":=")
            body = self.parse_term()
            return DDef(name.text, univars, annotation, body, span=name.span)
        if tok.kind == "axiom":
            self.advance()
            name = self.expect("name")
            univars = self.parse_univars()
            self.expect(":")
            annotation = self.parse_term()
            return DAxiom(name.text, univars, annotation, span=name.span)
        if tok.kind == "hit":
            self.advance()
            name = self.expect("name")
            univars = self.parse_univars()
            params = []
            while self.peek().kind == "(":
                self.advance()
                pname = self.expect("name")
                self.expect(":")
                ptype = self.parse_term()
                self.expect(")")
                params.append((pname.text, ptype))
            self.expect("where")
            ctors = []
            while True:
                if self.peek().kind == "|":
                    self.advance()
                kind = self.peek().kind
                if kind not in ("point", "path"):
                    break
                ckind = self.advance()
                cname = self.expect("name")
                self.expect(":")
                ctype = self.parse_term()
                ctors.append(DCtor(ckind.kind, cname.text, ctype, span=cname.span))
            return DHit(name.text, univars, tuple(params), tuple(ctors),
                        span=name.span)
        found = tok.text if tok.kind != "eof" else "end of input"
        fail(ErrorCode.PARSE, f"expected a declaration, found {found!r}", tok.span)

    def parse_module(self) -> Module:
        decls = []
        while self.peek().kind != "eof":
            decls.append(self.parse_decl())
        return Module(tuple(decls))


def parse_module(source: str, filename: str = "<input>") -> Module:
    """Parse a whole `.hott` source text into surface declarations."""
    return _Parser(tokenize(source, filename)).parse_module()


def parse_term(source: str, filename: str = "<input>") -> STerm:
    """Parse a single term; the whole input must be consumed."""
    parser = _Parser(tokenize(source, filename))
    t = parser.parse_term()
    parser.expect("eof")
    return t
