"""Name resolution: surface syntax to core de Bruijn terms.

Built-in type formers and eliminators are reserved names resolved to their
dedicated core nodes; they must be applied to at least their full argument
count. `@name` heads resolve to fully explicit references: for regular
definitions they suppress implicit-argument solving, and for higher inductive
constructors, type formers, and eliminators they build the saturated core
node directly.

Inside a `hit` block the type being defined and its previously declared point
constructors are in scope as self-references already applied to the parameter
telescope, so constructor types never repeat the parameters.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Union

from . import syntax as core
from .diagnostics import ErrorCode, SourceSpan, fail
from .surface import (
    DAxiom,
    DCtor,
    DDef,
    DHit,
    Module,
    SApp,
    SAscribe,
    SAt,
    SHole,
    SId,
    SLambda,
    SName,
    SPair,
    SPi,
    SSigma,
    SType,
    STerm,
)


@dataclass(frozen=True, slots=True)
class GlobalInfo:
    """What the resolver needs to know about one environment entry."""

    name: str
    univars: int = 0
    role: str = "def"  # "def" | "hit-type" | "hit-ctor" | "hit-elim"
    hit: Optional[str] = None
    param_count: int = 0
    field_count: int = 0
    method_count: int = 0


Lookup = Callable[[str], Optional[GlobalInfo]]


@dataclass(frozen=True, slots=True)
class RDef:
    name: str
    univars: tuple[str, ...]
    annotation: Optional[core.Term]
    body: core.Term
    span: Optional[SourceSpan] = None


@dataclass(frozen=True, slots=True)
class RAxiom:
    name: str
    univars: tuple[str, ...]
    type: core.Term
    span: Optional[SourceSpan] = None


@dataclass(frozen=True, slots=True)
class RCtor:
    kind: str  # "point" or "path"
    name: str
    type: core.Term
    span: Optional[SourceSpan] = None


@dataclass(frozen=True, slots=True)
class RHit:
    name: str
    params: tuple[tuple[str, core.Term], ...]
    ctors: tuple[RCtor, ...]
    span: Optional[SourceSpan] = None


RDecl = Union[RDef, RAxiom, RHit]


def _node(cls):
    return lambda args, span: cls(*args, span=span)


# name -> (explicit argument count, constructor from resolved arguments)
BUILTINS: dict[str, tuple[int, Callable]] = {
    "Id": (3, _node(core.Id)),
    "refl": (1, lambda args, span: core.Refl(None, args[0], span=span)),
    "J": (4, _node(core.J)),
    "fst": (1, _node(core.Fst)),
    "snd": (1, _node(core.Snd)),
    "inl": (1, _node(core.Inl)),
    "inr": (1, _node(core.Inr)),
    "succ": (1, _node(core.Succ)),
    "nat-elim": (4, _node(core.NatElim)),
    "sum-elim": (4, _node(core.SumElim)),
    "empty-elim": (2, _node(core.EmptyElim)),
    "unit-elim": (3, _node(core.UnitElim)),
    "Sum": (2, _node(core.Sum)),
    "Empty": (0, _node(core.Empty)),
    "Unit": (0, _node(core.Unit)),
    "Nat": (0, _node(core.Nat)),
    "star": (0, _node(core.Star)),
    "zero": (0, _node(core.Zero)),
}

RESERVED_NAMES = frozenset(BUILTINS)


@dataclass
class _HitScope:
    """Self-references available inside a `hit` block."""

    name: str
    param_names: tuple[str, ...]
    point_fields: dict[str, int] = field(default_factory=dict)


class _Resolver:
    def __init__(self, lookup: Lookup, univars: tuple[str, ...],
                 hit_scope: Optional[_HitScope] = None):
        self.lookup = lookup
        self.univars = univars
        self.locals: list[str] = []
        self.hit_scope = hit_scope

    # ----- helpers ---------------------------------------------------------

    def _local_index(self, name: str) -> Optional[int]:
        for offset, bound in enumerate(reversed(self.locals)):
            if bound == name:
                return offset
        return None

    def _level(self, level: Union[int, str], span) -> core.Level:
        if isinstance(level, int):
            return level
        if level in self.univars:
            return core.LVar(self.univars.index(level))
        fail(ErrorCode.SCOPE, f"unknown universe variable '{level}'", span)

    def _levels(self, info: GlobalInfo, levels, span) -> tuple[core.Level, ...]:
        if levels is None:
            return (0,) * info.univars
        if len(levels) != info.univars:
            fail(ErrorCode.SCOPE,
                 f"'{info.name}' expects {info.univars} universe "
                 f"argument(s), got {len(levels)}", span)
        return tuple(self._level(l, span) for l in levels)

    def _param_vars(self) -> tuple[core.Term, ...]:
        scope = self.hit_scope
        depth = len(self.locals)
        return tuple(core.Var(depth - 1 - i) for i in range(len(scope.param_names)))

    def _spine(self, t: STerm):
        args = []
        while isinstance(t, SApp):
            args.append((t.arg, t.braced, t.span))
            t = t.fn
        args.reverse()
        return t, args

    def _resolve_args(self, args):
        resolved = []
        for arg, braced, span in args:
            if isinstance(arg, SHole):
                if not braced:
                    fail(ErrorCode.SCOPE,
                         "a hole '_' is only allowed as a braced argument",
                         arg.span)
                resolved.append((core.Hole(span=arg.span), braced, span))
            else:
                resolved.append((self.resolve(arg), braced, span))
        return resolved

    @staticmethod
    def _apply(head: core.Term, rest) -> core.Term:
        for arg, braced, span in rest:
            head = core.App(head, arg, braced=braced, span=span)
        return head

    def _explicit_prefix(self, name: str, args, count: int, span, what: str):
        """Split a spine into `count` brace-free leading arguments and the rest."""
        if len(args) < count:
            fail(ErrorCode.SCOPE,
                 f"{what} '{name}' expects {count} argument(s), got {len(args)}",
                 span)
        resolved = self._resolve_args(args)
        for _, braced, arg_span in resolved[:count]:
            if braced:
                fail(ErrorCode.SCOPE,
                     f"{what} '{name}' takes no implicit arguments", arg_span)
        return [a for a, _, _ in resolved[:count]], resolved[count:]

    # ----- terms -----------------------------------------------------------

    def resolve(self, t: STerm) -> core.Term:
        if isinstance(t, SApp):
            return self._resolve_spine(t)
        if isinstance(t, SName):
            return self._resolve_name(t, args=[])
        if isinstance(t, SAt):
            return self._resolve_at(t, args=[])
        if isinstance(t, SType):
            return core.Universe(self._level(t.level, t.span), span=t.span)
        if isinstance(t, SPi):
            domain = self.resolve(t.domain)
            self.locals.append(t.binder or "")
            try:
                codomain = self.resolve(t.codomain)
            finally:
                self.locals.pop()
            return core.Pi(domain, codomain, hint=t.binder,
                           implicit=t.implicit, span=t.span)
        if isinstance(t, SSigma):
            first = self.resolve(t.first)
            self.locals.append(t.binder or "")
            try:
                second = self.resolve(t.second)
            finally:
                self.locals.pop()
            return core.Sigma(first, second, hint=t.binder, span=t.span)
        if isinstance(t, SLambda):
            body: STerm = t.body
            for name in t.binders:
                self.locals.append(name)
            try:
                inner = self.resolve(body)
            finally:
                del self.locals[len(self.locals) - len(t.binders):]
            for name in reversed(t.binders):
                inner = core.Lambda(inner, hint=name, span=t.span)
            return inner
        if isinstance(t, SPair):
            return core.Pair(self.resolve(t.fst), self.resolve(t.snd), span=t.span)
        if isinstance(t, SId):
            return core.Id(self.resolve(t.type), self.resolve(t.lhs),
                           self.resolve(t.rhs), span=t.span)
        if isinstance(t, SAscribe):
            return core.Ascribe(self.resolve(t.term), self.resolve(t.annotation),
                                span=t.span)
        if isinstance(t, SHole):
            fail(ErrorCode.SCOPE, "a hole '_' is only allowed as a braced argument",
                 t.span)
        raise AssertionError(f"unhandled surface node {type(t).__name__}")

    def _resolve_spine(self, t: SApp) -> core.Term:
        head, args = self._spine(t)
        if isinstance(head, SName):
            return self._resolve_name(head, args)
        if isinstance(head, SAt):
            return self._resolve_at(head, args)
        return self._apply(self.resolve(head), self._resolve_args(args))

    def _resolve_name(self, head: SName, args) -> core.Term:
        name, span = head.name, head.span
        index = self._local_index(name)
        if index is not None:
            if head.levels is not None:
                fail(ErrorCode.SCOPE,
                     f"local binding '{name}' takes no universe arguments", span)
            return self._apply(core.Var(index, span=span), self._resolve_args(args))
        scope = self.hit_scope
        if scope is not None:
            if name == scope.name:
                if head.levels is not None:
                    fail(ErrorCode.SCOPE,
                         f"'{name}' takes no universe arguments here", span)
                if args:
                    fail(ErrorCode.SCOPE,
                         f"'{name}' stands for the full type inside its own "
                         "declaration and takes no arguments", span)
                return core.HitType(name, self._param_vars(), span=span)
            if name in scope.point_fields:
                count = scope.point_fields[name]
                fields, rest = self._explicit_prefix(
                    name, args, count, span, "constructor")
                if rest:
                    fail(ErrorCode.SCOPE,
                         f"constructor '{name}' expects exactly {count} "
                         f"argument(s)", span)
                return core.HitCtor(scope.name, name,
                                    self._param_vars() + tuple(fields), span=span)
        if name in BUILTINS:
            if name == "J":
                return self._resolve_j(args, span)
            count, build = BUILTINS[name]
            if head.levels is not None:
                fail(ErrorCode.SCOPE,
                     f"built-in '{name}' takes no universe arguments", span)
            main, rest = self._explicit_prefix(name, args, count, span, "built-in")
            return self._apply(build(main, span), rest)
        info = self.lookup(name)
        if info is None:
            fail(ErrorCode.SCOPE, f"unknown identifier '{name}'", span)
        levels = self._levels(info, head.levels, span)
        head_term = core.Const(info.name, levels, span=span)
        return self._apply(head_term, self._resolve_args(args))

    def _resolve_at(self, head: SAt, args) -> core.Term:
        name, span = head.name, head.span
        if name == "refl":
            main, rest = self._explicit_prefix("refl", args, 2, span, "'@refl'")
            return self._apply(core.Refl(main[0], main[1], span=span), rest)
        if name in BUILTINS:
            fail(ErrorCode.SCOPE, f"'@' cannot be applied to built-in '{name}'",
                 span)
        info = self.lookup(name)
        if info is None:
            fail(ErrorCode.SCOPE, f"unknown identifier '{name}'", span)
        levels = self._levels(info, head.levels, span)
        if info.role == "hit-type":
            main, rest = self._explicit_prefix(
                name, args, info.param_count, span, "type former")
            return self._apply(core.HitType(info.hit, tuple(main), span=span), rest)
        if info.role == "hit-ctor":
            count = info.param_count + info.field_count
            main, rest = self._explicit_prefix(name, args, count, span,
                                               "constructor")
            return self._apply(
                core.HitCtor(info.hit, name, tuple(main), span=span), rest)
        if info.role == "hit-elim":
            count = 1 + info.method_count + 1
            main, rest = self._explicit_prefix(name, args, count, span,
                                               "eliminator")
            elim = core.HitElim(info.hit, main[0], tuple(main[1:-1]), main[-1],
                                span=span)
            return self._apply(elim, rest)
        head_term = core.Const(info.name, levels, positional=True, span=span)
        return self._apply(head_term, self._resolve_args(args))

    def _resolve_j(self, args, span) -> core.Term:
        if len(args) < 4:
            fail(ErrorCode.SCOPE,
                 f"built-in 'J' expects 4 argument(s), got {len(args)}", span)
        motive_s, motive_braced, motive_span = args[0]
        if motive_braced:
            fail(ErrorCode.SCOPE, "built-in 'J' takes no implicit arguments",
                 motive_span)
        binders: list[str] = []
        body: STerm = motive_s
        while len(binders) < 2 and isinstance(body, SLambda):
            binders.extend(body.binders)
            body = body.body
        if len(binders) < 2:
            fail(ErrorCode.SCOPE,
                 "the motive of 'J' must be written as a lambda binding the "
                 "endpoint and the path, like (\\y. \\p. M)", motive_span)
        if len(binders) > 2:
            body = SLambda(tuple(binders[2:]), body, span=motive_s.span)
        self.locals.extend(binders[:2])
        try:
            motive = self.resolve(body)
        finally:
            del self.locals[len(self.locals) - 2:]
        main, rest = self._explicit_prefix("J", args[1:], 3, span, "built-in")
        return self._apply(core.J(motive, main[0], main[1], main[2], span=span),
                           rest)


def resolve_term(t: STerm, lookup: Lookup, univars: tuple[str, ...] = (),
                 hit_scope=None) -> core.Term:
    return _Resolver(lookup, univars, hit_scope).resolve(t)


def _check_univars(univars: tuple[str, ...], span) -> None:
    seen = set()
    for name in univars:
        if name in seen:
            fail(ErrorCode.SCOPE, f"duplicate universe variable '{name}'", span)
        seen.add(name)


def resolve_declaration(decl, lookup: Lookup) -> RDecl:
    if isinstance(decl, DDef):
        _check_univars(decl.univars, decl.span)
        resolver = _Resolver(lookup, decl.univars)
        annotation = None
        if decl.annotation is not None:
            annotation = resolver.resolve(decl.annotation)
        body = resolver.resolve(decl.body)
        return RDef(decl.name, decl.univars, annotation, body, span=decl.span)
    if isinstance(decl, DAxiom):
        _check_univars(decl.univars, decl.span)
        resolver = _Resolver(lookup, decl.univars)
        return RAxiom(decl.name, decl.univars, resolver.resolve(decl.annotation),
                      span=decl.span)
    if isinstance(decl, DHit):
        if decl.univars:
            fail(ErrorCode.HIT_SCHEMA,
                 "universe variables are not supported on hit declarations",
                 decl.span)
        scope = _HitScope(decl.name, tuple(name for name, _ in decl.params))
        resolver = _Resolver(lookup, (), hit_scope=None)
        params = []
        for pname, ptype in decl.params:
            params.append((pname, resolver.resolve(ptype)))
            resolver.locals.append(pname)
        resolver.hit_scope = scope
        ctors = []
        for ctor in decl.ctors:
            body = resolver.resolve(ctor.type)
            ctors.append(RCtor(ctor.kind, ctor.name, body, span=ctor.span))
            if ctor.kind == "point":
                scope.point_fields[ctor.name] = _leading_pi_count(body)
        return RHit(decl.name, tuple(params), tuple(ctors), span=decl.span)
    raise AssertionError(f"unhandled declaration {type(decl).__name__}")


def _leading_pi_count(t: core.Term) -> int:
    count = 0
    while isinstance(t, core.Pi):
        count += 1
        t = t.codomain
    return count


def declared_infos(decl: RDecl) -> list[GlobalInfo]:
    """The global names one declaration will add to the environment.

    A hit declaration introduces the type former, every constructor, and the
    eliminator, in addition to being usable through @-forms; the counts here
    are exactly what resolution of later declarations needs.
    """
    if isinstance(decl, RDef) or isinstance(decl, RAxiom):
        return [GlobalInfo(decl.name, univars=len(decl.univars))]
    params = len(decl.params)
    infos = [GlobalInfo(decl.name, role="hit-type", hit=decl.name,
                        param_count=params)]
    for ctor in decl.ctors:
        infos.append(GlobalInfo(ctor.name, role="hit-ctor", hit=decl.name,
                                param_count=params,
                                field_count=_leading_pi_count(ctor.type)))
    infos.append(GlobalInfo(f"{decl.name}-elim", univars=1, role="hit-elim",
                            hit=decl.name, param_count=params,
                            method_count=len(decl.ctors)))
    for ctor in decl.ctors:
        if ctor.kind == "path":
            infos.append(GlobalInfo(f"{decl.name}-elim-{ctor.name}", univars=1))
    return infos


def resolve(module: Module, lookup: Lookup) -> list[RDecl]:
    """Resolve a parsed module against the globals visible through lookup.

    Later declarations see the names introduced by earlier ones in the same
    module; those are predicted syntactically here, so a module resolves as a
    whole before any checking, and the checker re-validates everything.
    """
    resolved: list[RDecl] = []
    local: dict[str, GlobalInfo] = {}

    def extended(name: str) -> Optional[GlobalInfo]:
        return local.get(name) or lookup(name)

    for decl in module.decls:
        rdecl = resolve_declaration(decl, extended)
        resolved.append(rdecl)
        for info in declared_infos(rdecl):
            local[info.name] = info
    return resolved
