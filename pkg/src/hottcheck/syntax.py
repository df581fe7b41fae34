"""Core de Bruijn term language.

Terms are immutable dataclasses. Binders are nameless (de Bruijn indices), so
structural equality is alpha-equality. Display metadata (source spans, binder
name hints, implicit-argument decorations) is excluded from equality.

Universe levels are either concrete naturals or references to a universe
variable bound by the enclosing declaration header. Checked instances never
contain `LVar`: `instantiate_levels` replaces them before the kernel runs.
"""
from __future__ import annotations

from dataclasses import dataclass, field, fields, replace
from typing import Callable, Iterator, Optional, Union

from .diagnostics import SourceSpan


def _meta(default=None):
    """A field excluded from equality and repr (display metadata only)."""
    return field(default=default, compare=False, repr=False)


@dataclass(frozen=True, slots=True)
class LVar:
    """Universe variable, an index into the declaration's [univars] list."""

    index: int


Level = Union[int, LVar]


class Term:
    """Base class for core terms."""

    __slots__ = ()


@dataclass(frozen=True, slots=True)
class Var(Term):
    index: int
    span: Optional[SourceSpan] = _meta()


@dataclass(frozen=True, slots=True)
class Universe(Term):
    level: Level
    span: Optional[SourceSpan] = _meta()


@dataclass(frozen=True, slots=True)
class Pi(Term):
    domain: Term
    codomain: Term  # binds one variable
    hint: Optional[str] = _meta()
    implicit: bool = field(default=False, compare=False, repr=False)
    span: Optional[SourceSpan] = _meta()


@dataclass(frozen=True, slots=True)
class Lambda(Term):
    body: Term  # binds one variable
    hint: Optional[str] = _meta()
    ann: Optional[Term] = _meta()  # optional surface annotation, erased by checking
    span: Optional[SourceSpan] = _meta()


@dataclass(frozen=True, slots=True)
class App(Term):
    fn: Term
    arg: Term
    braced: bool = field(default=False, compare=False, repr=False)
    span: Optional[SourceSpan] = _meta()


@dataclass(frozen=True, slots=True)
class Sigma(Term):
    first: Term
    second: Term  # binds one variable
    hint: Optional[str] = _meta()
    span: Optional[SourceSpan] = _meta()


@dataclass(frozen=True, slots=True)
class Pair(Term):
    fst: Term
    snd: Term
    span: Optional[SourceSpan] = _meta()


@dataclass(frozen=True, slots=True)
class Fst(Term):
    pair: Term
    span: Optional[SourceSpan] = _meta()


@dataclass(frozen=True, slots=True)
class Snd(Term):
    pair: Term
    span: Optional[SourceSpan] = _meta()


@dataclass(frozen=True, slots=True)
class Id(Term):
    type: Term
    lhs: Term
    rhs: Term
    span: Optional[SourceSpan] = _meta()


@dataclass(frozen=True, slots=True)
class Refl(Term):
    """Reflexivity. The type annotation may be None in unelaborated surface
    output (`refl a`); elaboration fills it, readback omits it."""

    type: Optional[Term]
    point: Term
    span: Optional[SourceSpan] = _meta()


@dataclass(frozen=True, slots=True)
class J(Term):
    """Path induction. The motive binds two variables: the free endpoint and
    the path. Computes only when the path is refl."""

    motive: Term  # binds two variables
    base: Term
    endpoint: Term
    path: Term
    span: Optional[SourceSpan] = _meta()


@dataclass(frozen=True, slots=True)
class Const(Term):
    """Reference to a global declaration, with its universe arguments.

    `positional` records that the reference was written in @-form, which makes
    the elaborator treat every following argument as filling the next binder
    in order instead of solving implicit ones."""

    name: str
    levels: tuple[Level, ...] = ()
    positional: bool = field(default=False, compare=False, repr=False)
    span: Optional[SourceSpan] = _meta()


@dataclass(frozen=True, slots=True)
class HitType(Term):
    """A higher inductive type former applied to its full parameter list."""

    hit: str
    args: tuple[Term, ...]
    span: Optional[SourceSpan] = _meta()


@dataclass(frozen=True, slots=True)
class HitCtor(Term):
    """Saturated constructor application of a higher inductive type.
    args covers the parameter telescope followed by the constructor fields."""

    hit: str
    ctor: str
    args: tuple[Term, ...]
    span: Optional[SourceSpan] = _meta()


@dataclass(frozen=True, slots=True)
class HitElim(Term):
    """Saturated eliminator application. The parameters are recovered from the
    scrutinee's type, so they are not stored here."""

    hit: str
    motive: Term
    methods: tuple[Term, ...]
    scrutinee: Term
    span: Optional[SourceSpan] = _meta()


@dataclass(frozen=True, slots=True)
class Empty(Term):
    span: Optional[SourceSpan] = _meta()


@dataclass(frozen=True, slots=True)
class EmptyElim(Term):
    motive: Term
    scrutinee: Term
    span: Optional[SourceSpan] = _meta()


@dataclass(frozen=True, slots=True)
class Unit(Term):
    span: Optional[SourceSpan] = _meta()


@dataclass(frozen=True, slots=True)
class Star(Term):
    span: Optional[SourceSpan] = _meta()


@dataclass(frozen=True, slots=True)
class UnitElim(Term):
    motive: Term
    method: Term
    scrutinee: Term
    span: Optional[SourceSpan] = _meta()


@dataclass(frozen=True, slots=True)
class Sum(Term):
    left: Term
    right: Term
    span: Optional[SourceSpan] = _meta()


@dataclass(frozen=True, slots=True)
class Inl(Term):
    value: Term
    span: Optional[SourceSpan] = _meta()


@dataclass(frozen=True, slots=True)
class Inr(Term):
    value: Term
    span: Optional[SourceSpan] = _meta()


@dataclass(frozen=True, slots=True)
class SumElim(Term):
    motive: Term
    left: Term  # function over the left summand
    right: Term  # function over the right summand
    scrutinee: Term
    span: Optional[SourceSpan] = _meta()


@dataclass(frozen=True, slots=True)
class Nat(Term):
    span: Optional[SourceSpan] = _meta()


@dataclass(frozen=True, slots=True)
class Zero(Term):
    span: Optional[SourceSpan] = _meta()


@dataclass(frozen=True, slots=True)
class Succ(Term):
    arg: Term
    span: Optional[SourceSpan] = _meta()


@dataclass(frozen=True, slots=True)
class NatElim(Term):
    motive: Term
    base: Term
    step: Term
    scrutinee: Term
    span: Optional[SourceSpan] = _meta()


@dataclass(frozen=True, slots=True)
class Hole(Term):
    """Elaboration-only placeholder; never appears in checked core terms."""

    span: Optional[SourceSpan] = _meta()


@dataclass(frozen=True, slots=True)
class Ascribe(Term):
    """Elaboration-only type ascription; erased by checking."""

    term: Term
    annotation: Term
    span: Optional[SourceSpan] = _meta()


# Child fields of each node and how many binders each child sits under.
_SHAPES: dict[type, tuple[tuple[str, int], ...]] = {
    Var: (), Universe: (), Const: (), Empty: (), Unit: (), Star: (),
    Nat: (), Zero: (), Hole: (),
    Pi: (("domain", 0), ("codomain", 1)),
    Lambda: (("body", 1),),
    App: (("fn", 0), ("arg", 0)),
    Sigma: (("first", 0), ("second", 1)),
    Pair: (("fst", 0), ("snd", 0)),
    Fst: (("pair", 0),),
    Snd: (("pair", 0),),
    Id: (("type", 0), ("lhs", 0), ("rhs", 0)),
    Refl: (("type", 0), ("point", 0)),
    J: (("motive", 2), ("base", 0), ("endpoint", 0), ("path", 0)),
    HitType: (("args", 0),),
    HitCtor: (("args", 0),),
    HitElim: (("motive", 0), ("methods", 0), ("scrutinee", 0)),
    EmptyElim: (("motive", 0), ("scrutinee", 0)),
    UnitElim: (("motive", 0), ("method", 0), ("scrutinee", 0)),
    Sum: (("left", 0), ("right", 0)),
    Inl: (("value", 0),),
    Inr: (("value", 0),),
    SumElim: (("motive", 0), ("left", 0), ("right", 0), ("scrutinee", 0)),
    Succ: (("arg", 0),),
    NatElim: (("motive", 0), ("base", 0), ("step", 0), ("scrutinee", 0)),
    Ascribe: (("term", 0), ("annotation", 0)),
}


def map_subterms(t: Term, f: Callable[[Term, int], Term]) -> Term:
    """Rebuild t with f applied to each immediate child. f receives the number
    of binders the child sits under. Shares structure when nothing changes."""
    changes = {}
    for name, binders in _SHAPES[type(t)]:
        child = getattr(t, name)
        if child is None:
            continue
        if isinstance(child, tuple):
            new = tuple(f(c, binders) for c in child)
            if any(a is not b for a, b in zip(new, child)):
                changes[name] = new
        else:
            new = f(child, binders)
            if new is not child:
                changes[name] = new
    return replace(t, **changes) if changes else t


def walk(t: Term) -> Iterator[Term]:
    """Yield t and every subterm, outermost first."""
    yield t
    for name, _ in _SHAPES[type(t)]:
        child = getattr(t, name)
        if child is None:
            continue
        if isinstance(child, tuple):
            for c in child:
                yield from walk(c)
        else:
            yield from walk(child)


def shift(t: Term, cutoff: int, amount: int) -> Term:
    """Add amount to every free variable index at or above cutoff."""
    if isinstance(t, Var):
        if t.index >= cutoff:
            return replace(t, index=t.index + amount)
        return t
    return map_subterms(t, lambda c, b: shift(c, cutoff + b, amount))


def substitute(t: Term, index: int, replacement: Term) -> Term:
    """Replace Var(index) in t with replacement and lower the variables above.

    replacement lives in the context of t with variables 0..index removed,
    which is the context of the result.
    """

    def go(s: Term, crossed: int) -> Term:
        if isinstance(s, Var):
            j = index + crossed
            if s.index == j:
                return shift(replacement, 0, crossed)
            if s.index > j:
                return replace(s, index=s.index - 1)
            return s
        return map_subterms(s, lambda c, b: go(c, crossed + b))

    return go(t, 0)


def alpha_equal(a: Term, b: Term) -> bool:
    """Alpha-equality of core terms. De Bruijn representation makes this plain
    structural equality; display metadata is already excluded from __eq__.
    Used by tests and the resolver round-trip property, never by conversion."""
    return a == b


def is_well_scoped(t: Term, depth: int = 0) -> bool:
    """True when every Var index is bound (below depth at its occurrence)."""
    if isinstance(t, Var):
        return 0 <= t.index < depth
    for name, binders in _SHAPES[type(t)]:
        child = getattr(t, name)
        if child is None:
            continue
        if isinstance(child, tuple):
            if not all(is_well_scoped(c, depth + binders) for c in child):
                return False
        elif not is_well_scoped(child, depth + binders):
            return False
    return True


def _instantiate_level(level: Level, levels: tuple[int, ...]) -> int:
    if isinstance(level, LVar):
        return levels[level.index]
    return level


def instantiate_levels(t: Term, levels: tuple[int, ...]) -> Term:
    """Replace universe variables with concrete levels throughout t."""
    if isinstance(t, Universe):
        new = _instantiate_level(t.level, levels)
        return t if new == t.level else replace(t, level=new)
    if isinstance(t, Const):
        if not t.levels:
            return t
        new = tuple(_instantiate_level(l, levels) for l in t.levels)
        return t if new == t.levels else replace(t, levels=new)
    return map_subterms(t, lambda c, _b: instantiate_levels(c, levels))


def mentions_level_vars(t: Term) -> bool:
    for s in walk(t):
        if isinstance(s, Universe) and isinstance(s.level, LVar):
            return True
        if isinstance(s, Const) and any(isinstance(l, LVar) for l in s.levels):
            return True
    return False


def constant_names(t: Term) -> Iterator[str]:
    """Names of global declarations referenced anywhere in t."""
    for s in walk(t):
        if isinstance(s, Const):
            yield s.name
        elif isinstance(s, (HitType, HitCtor, HitElim)):
            yield s.hit
