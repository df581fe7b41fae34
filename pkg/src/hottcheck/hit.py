"""Higher inductive type schemas: validation and eliminator synthesis.

The schema is deliberately small. A declaration is a parameter telescope,
point constructors, then path constructors. The type being defined may occur
in a constructor field only strictly positively: either as the field itself,
or as the codomain of a single-arrow function field whose domain does not
mention it (the hub form). Path constructor boundaries are point-level terms
built from point constructors, recursive fields, and recursive function
fields (bare, in recursive argument positions, or applied to outside data),
so the induction method types can name their images through the point
methods. Paths between paths are rejected: the
identity type in a path constructor must be at the type being defined itself.

Everything synthesized here is a plain core Term later checked by the kernel
like any other declaration: the constructors and the eliminator become
ordinary definitions, and each path constructor yields one propositional
computation axiom stating `apd f (ctor args) = method args`. Point
computation is definitional and lives in the evaluator, not here.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional

from .diagnostics import ErrorCode, SourceSpan, fail
from .syntax import (
    App,
    Const,
    HitCtor,
    HitElim,
    HitType,
    Id,
    Lambda,
    LVar,
    Pi,
    Term,
    Universe,
    Var,
    map_subterms,
    walk,
)

REC_NONE = "none"
REC_DIRECT = "direct"
REC_FUN = "fun"


@dataclass(frozen=True, slots=True)
class FieldSpec:
    """One constructor argument. type lives under [params, earlier fields]."""

    hint: Optional[str]
    type: Term
    rec: str = REC_NONE
    fun_domain: Optional[Term] = None  # for REC_FUN, at the same scope as type


@dataclass(frozen=True, slots=True)
class PointCtor:
    name: str
    fields: tuple[FieldSpec, ...]


@dataclass(frozen=True, slots=True)
class PathCtor:
    name: str
    fields: tuple[FieldSpec, ...]
    lhs: Term  # boundary endpoints, under [params, fields]
    rhs: Term


@dataclass(frozen=True, slots=True)
class HitSignature:
    name: str
    params: tuple[tuple[Optional[str], Term], ...]
    points: tuple[PointCtor, ...] = ()
    paths: tuple[PathCtor, ...] = ()

    def ctors(self) -> tuple:
        return self.points + self.paths

    def point(self, name: str) -> Optional[PointCtor]:
        for ctor in self.points:
            if ctor.name == name:
                return ctor
        return None

    def path(self, name: str) -> Optional[PathCtor]:
        for ctor in self.paths:
            if ctor.name == name:
                return ctor
        return None

    def ctor_index(self, name: str) -> int:
        for i, ctor in enumerate(self.ctors()):
            if ctor.name == name:
                return i
        raise KeyError(name)


def apply_renaming(t: Term, mapping: list[int]) -> Term:
    """Remap free variable indices: root-level index i becomes mapping[i]."""

    def go(s: Term, crossed: int) -> Term:
        if isinstance(s, Var):
            if s.index < crossed:
                return s
            return replace(s, index=mapping[s.index - crossed] + crossed)
        return map_subterms(s, lambda c, b: go(c, crossed + b))

    return go(t, 0)


def mentions_hit(t: Term, name: str) -> bool:
    for s in walk(t):
        if isinstance(s, (HitType, HitCtor, HitElim)) and s.hit == name:
            return True
    return False


def _self_at(name: str, n_params: int, extra_binders: int) -> HitType:
    """The type being defined applied to its parameters, seen from under
    extra_binders binders that follow the parameter telescope."""
    args = tuple(Var(n_params - 1 - k + extra_binders) for k in range(n_params))
    return HitType(name, args)


# ---------------------------------------------------------------------------
# validation


def _classify_field(name: str, ctor: str, n_params: int, position: int,
                    hint: Optional[str], domain: Term,
                    span: Optional[SourceSpan]) -> FieldSpec:
    if domain == _self_at(name, n_params, position):
        return FieldSpec(hint, domain, REC_DIRECT)
    if (isinstance(domain, Pi) and not domain.implicit
            and domain.codomain == _self_at(name, n_params, position + 1)
            and not mentions_hit(domain.domain, name)):
        return FieldSpec(hint, domain, REC_FUN, fun_domain=domain.domain)
    if not mentions_hit(domain, name):
        return FieldSpec(hint, domain, REC_NONE)
    fail(ErrorCode.HIT_SCHEMA,
         f"constructor '{ctor}': '{name}' may occur in an argument only as "
         "the argument itself or as the codomain of a function whose domain "
         "does not mention it", span)


def _peel_fields(name: str, ctor: str, n_params: int, ty: Term,
                 span: Optional[SourceSpan]) -> tuple[tuple[FieldSpec, ...], Term]:
    fields: list[FieldSpec] = []
    while isinstance(ty, Pi):
        if ty.implicit:
            fail(ErrorCode.HIT_SCHEMA,
                 f"constructor '{ctor}' cannot take implicit arguments", span)
        fields.append(_classify_field(name, ctor, n_params, len(fields),
                                      ty.hint, ty.domain, span))
        ty = ty.codomain
    return tuple(fields), ty


def analyze_point(sig: HitSignature, ctor: str, ty: Term,
                  span: Optional[SourceSpan] = None) -> PointCtor:
    n = len(sig.params)
    fields, target = _peel_fields(sig.name, ctor, n, ty, span)
    if target != _self_at(sig.name, n, len(fields)):
        fail(ErrorCode.HIT_SCHEMA,
             f"point constructor '{ctor}' must end in '{sig.name}' applied "
             "to its parameters", span)
    return PointCtor(ctor, fields)


def analyze_path(sig: HitSignature, ctor: str, ty: Term,
                 span: Optional[SourceSpan] = None) -> PathCtor:
    n = len(sig.params)
    fields, target = _peel_fields(sig.name, ctor, n, ty, span)
    if not isinstance(target, Id):
        fail(ErrorCode.HIT_SCHEMA,
             f"path constructor '{ctor}' must end in an identity type", span)
    if isinstance(target.type, Id):
        fail(ErrorCode.HIT_SCHEMA,
             f"path constructor '{ctor}' is two-dimensional: its endpoints "
             "are themselves paths, which the schema does not allow", span)
    if target.type != _self_at(sig.name, n, len(fields)):
        fail(ErrorCode.HIT_SCHEMA,
             f"path constructor '{ctor}' must relate elements of "
             f"'{sig.name}' applied to its parameters", span)
    for side in (target.lhs, target.rhs):
        _check_projectable(sig, ctor, fields, side, span)
    return PathCtor(ctor, fields, target.lhs, target.rhs)


def _check_projectable(sig: HitSignature, ctor: str,
                       fields: tuple[FieldSpec, ...], t: Term,
                       span: Optional[SourceSpan]) -> None:
    """Boundary endpoints must map through point methods: point constructor
    applications over arbitrary non-recursive data, recursive fields, and
    applications of recursive function fields."""
    n, k = len(sig.params), len(fields)

    def bad():
        fail(ErrorCode.HIT_SCHEMA,
             f"path constructor '{ctor}': boundary is not built from point "
             "constructors and recursive arguments", span)

    if isinstance(t, Var):
        if t.index < k and fields[k - 1 - t.index].rec != REC_NONE:
            return
        bad()
    elif isinstance(t, App):
        if not (isinstance(t.fn, Var) and t.fn.index < k
                and fields[k - 1 - t.fn.index].rec == REC_FUN):
            bad()
        if mentions_hit(t.arg, sig.name):
            bad()
    elif isinstance(t, HitCtor) and t.hit == sig.name:
        point = sig.point(t.ctor)
        if point is None:
            bad()
        expected_params = tuple(Var(n - 1 - i + k) for i in range(n))
        if t.args[:n] != expected_params or len(t.args) != n + len(point.fields):
            bad()
        for value, spec in zip(t.args[n:], point.fields):
            if spec.rec != REC_NONE:
                _check_projectable(sig, ctor, fields, value, span)
            elif mentions_hit(value, sig.name):
                bad()
    else:
        bad()


# ---------------------------------------------------------------------------
# synthesis

TRANSPORT_NAME = "transport"
APD_NAME = "apd"


class _MethodScope:
    """Tracks absolute binder positions while building a method telescope.

    Scope layout: parameters at 0..n-1, the motive at n, then one slot per
    earlier method, then the constructor fields interleaved with induction
    hypotheses for the recursive ones.
    """

    def __init__(self, sig: HitSignature, index: int):
        self.sig = sig
        self.n = len(sig.params)
        self.motive_abs = self.n
        self.method_abs = [self.n + 1 + j for j in range(index)]
        self.cur = self.n + 1 + index
        self.field_abs: list[int] = []
        self.ih_abs: dict[int, int] = {}
        self.pieces: list[tuple[Optional[str], Term]] = []

    def idx(self, abs_pos: int, extra: int = 0) -> int:
        return self.cur - 1 - abs_pos + extra

    def var(self, abs_pos: int, extra: int = 0) -> Var:
        return Var(self.idx(abs_pos, extra))

    def field_mapping(self, upto: int, extra: int = 0) -> list[int]:
        """Remap [params, fields[:upto]] indices into the current scope."""
        mapping = []
        for i in range(upto):
            mapping.append(self.idx(self.field_abs[upto - 1 - i], extra))
        for i in range(self.n):
            mapping.append(self.idx(self.n - 1 - i, extra))
        return mapping

    def bind(self, hint: Optional[str], ty: Term) -> int:
        self.pieces.append((hint, ty))
        abs_pos = self.cur
        self.cur += 1
        return abs_pos

    def add_field(self, j: int, fld: FieldSpec) -> None:
        ty = apply_renaming(fld.type, self.field_mapping(j))
        self.field_abs.append(self.bind(fld.hint, ty))
        if fld.rec == REC_DIRECT:
            ih = App(self.var(self.motive_abs), self.var(self.field_abs[j]))
            self.ih_abs[j] = self.bind(_ih_hint(fld), ih)
        elif fld.rec == REC_FUN:
            dom = apply_renaming(fld.fun_domain, self.field_mapping(j, extra=1))
            body = App(self.var(self.motive_abs, extra=1),
                       App(self.var(self.field_abs[j], extra=1), Var(0)))
            self.ih_abs[j] = self.bind(_ih_hint(fld), Pi(dom, body))

    def param_vars(self) -> tuple[Term, ...]:
        return tuple(self.var(k) for k in range(self.n))

    def field_vars(self) -> tuple[Term, ...]:
        return tuple(self.var(a) for a in self.field_abs)

    def rename_boundary(self, t: Term) -> Term:
        return apply_renaming(t, self.field_mapping(len(self.field_abs)))

    def project(self, t: Term) -> Term:
        """Rewrite a boundary endpoint through methods and hypotheses."""
        k = len(self.field_abs)
        if isinstance(t, Var):
            return self.var(self.ih_abs[k - 1 - t.index])
        if isinstance(t, App):
            fld = k - 1 - t.fn.index
            return App(self.var(self.ih_abs[fld]), self.rename_boundary(t.arg))
        if isinstance(t, HitCtor):
            point = self.sig.point(t.ctor)
            index = self.sig.ctor_index(t.ctor)
            out: Term = self.var(self.method_abs[index])
            for value, spec in zip(t.args[self.n:], point.fields):
                out = App(out, self.rename_boundary(value))
                if spec.rec != REC_NONE:
                    out = App(out, self.project(value))
            return out
        raise AssertionError("boundary endpoint survived validation unprojected")

    def close(self, body: Term) -> Term:
        for hint, ty in reversed(self.pieces):
            body = Pi(ty, body, hint=hint)
        return body


def _ih_hint(fld: FieldSpec) -> Optional[str]:
    return f"{fld.hint}'" if fld.hint else None


def method_type_term(sig: HitSignature, index: int) -> Term:
    """The eliminator method type for constructor `index`, as a Term under
    [params, motive, earlier methods]. The motive's universe is LVar(0)."""
    ctor = sig.ctors()[index]
    scope = _MethodScope(sig, index)
    for j, fld in enumerate(ctor.fields):
        scope.add_field(j, fld)
    if isinstance(ctor, PointCtor):
        value = HitCtor(sig.name, ctor.name,
                        scope.param_vars() + scope.field_vars())
        return scope.close(App(scope.var(scope.motive_abs), value))
    motive = scope.var(scope.motive_abs)
    self_ty = HitType(sig.name, scope.param_vars())
    lhs = scope.rename_boundary(ctor.lhs)
    rhs = scope.rename_boundary(ctor.rhs)
    path = HitCtor(sig.name, ctor.name, scope.param_vars() + scope.field_vars())
    transported = _apply(Const(TRANSPORT_NAME, (0, LVar(0))),
                         (self_ty, True), (motive, False), (lhs, True),
                         (rhs, True), (path, False),
                         (scope.project(ctor.lhs), False))
    return scope.close(Id(App(motive, rhs), transported, scope.project(ctor.rhs)))


def _apply(head: Term, *args: tuple[Term, bool]) -> Term:
    for arg, braced in args:
        head = App(head, arg, braced=braced)
    return head


def _param_pis(sig: HitSignature, body: Term) -> Term:
    for hint, ty in reversed(sig.params):
        body = Pi(ty, body, hint=hint)
    return body


def _param_lambdas(sig: HitSignature, body: Term) -> Term:
    for hint, _ in reversed(sig.params):
        body = Lambda(body, hint=hint)
    return body


def former_declaration(sig: HitSignature) -> tuple[Term, Term]:
    """Type and body of the definition binding the type former's name."""
    n = len(sig.params)
    ty = _param_pis(sig, Universe(0))
    body = _param_lambdas(sig, _self_at(sig.name, n, 0))
    return ty, body


def ctor_declaration(sig: HitSignature, ctor) -> tuple[Term, Term]:
    """Type and body of the definition binding one constructor's name."""
    n = len(sig.params)
    k = len(ctor.fields)
    if isinstance(ctor, PointCtor):
        target: Term = _self_at(sig.name, n, k)
    else:
        target = Id(_self_at(sig.name, n, k), ctor.lhs, ctor.rhs)
    ty = target
    for fld in reversed(ctor.fields):
        ty = Pi(fld.type, ty, hint=fld.hint)
    ty = _param_pis(sig, ty)
    args = tuple(Var(n + k - 1 - i) for i in range(n + k))
    body: Term = HitCtor(sig.name, ctor.name, args)
    for fld in reversed(ctor.fields):
        body = Lambda(body, hint=fld.hint)
    body = _param_lambdas(sig, body)
    return ty, body


def motive_type(sig: HitSignature) -> Term:
    """(x : Self) -> Type j under the parameter telescope, with j = LVar 0."""
    n = len(sig.params)
    return Pi(_self_at(sig.name, n, 0), Universe(LVar(0)), hint="x")


def eliminator_name(hit_name: str) -> str:
    return f"{hit_name}-elim"


def eliminator_declaration(sig: HitSignature) -> tuple[Term, Term]:
    """Type and body of the induction principle, with one universe variable
    for the motive's level."""
    n = len(sig.params)
    c = len(sig.ctors())
    scrutinee_ty = _self_at(sig.name, n, 1 + c)
    result = App(Var(c + 1), Var(0))
    ty: Term = Pi(scrutinee_ty, result, hint="x")
    for i in reversed(range(c)):
        ty = Pi(method_type_term(sig, i), ty, hint=_method_hint(sig, i))
    ty = Pi(motive_type(sig), ty, hint="P")
    ty = _param_pis(sig, ty)
    body: Term = HitElim(sig.name, Var(c + 1),
                         tuple(Var(c - i) for i in range(c)), Var(0))
    for hint in ["x"] + [_method_hint(sig, i) for i in reversed(range(c))] + ["P"]:
        body = Lambda(body, hint=hint)
    body = _param_lambdas(sig, body)
    return ty, body


def _method_hint(sig: HitSignature, index: int) -> str:
    return f"on-{sig.ctors()[index].name}"


def path_axiom_name(sig: HitSignature, path: PathCtor) -> str:
    return f"{eliminator_name(sig.name)}-{path.name}"


def path_axiom_type(sig: HitSignature, path_index: int) -> Term:
    """The propositional computation rule for one path constructor: under
    the parameters, motive, and all methods, `apd f (ctor fields) = method`
    where f is the eliminator at those methods. One universe variable."""
    sig_paths_offset = len(sig.points)
    ctor = sig.paths[path_index]
    n = len(sig.params)
    c = len(sig.ctors())
    k = len(ctor.fields)
    scope = _MethodScope(sig, c)  # params, P, all c methods
    for j, fld in enumerate(ctor.fields):
        ty = apply_renaming(fld.type, scope.field_mapping(j))
        scope.field_abs.append(scope.bind(fld.hint, ty))

    motive = scope.var(scope.motive_abs)
    methods = tuple(scope.var(a) for a in scope.method_abs)
    self_ty = HitType(sig.name, scope.param_vars())

    def elim(t: Term, extra: int = 0) -> Term:
        return HitElim(sig.name, scope.var(scope.motive_abs, extra),
                       tuple(scope.var(a, extra) for a in scope.method_abs), t)

    lhs = scope.rename_boundary(ctor.lhs)
    rhs = scope.rename_boundary(ctor.rhs)
    path = HitCtor(sig.name, ctor.name, scope.param_vars() + scope.field_vars())
    f_term = Lambda(elim(Var(0), extra=1), hint="x")
    transported = _apply(Const(TRANSPORT_NAME, (0, LVar(0))),
                         (self_ty, True), (motive, False), (lhs, True),
                         (rhs, True), (path, False), (elim(lhs), False))
    inner = Id(App(motive, rhs), transported, elim(rhs))
    apd_side = _apply(Const(APD_NAME, (0, LVar(0))),
                      (self_ty, True), (motive, True), (f_term, False),
                      (lhs, True), (rhs, True), (path, False))
    method_side: Term = scope.var(scope.method_abs[sig_paths_offset + path_index])
    for j, fld in enumerate(ctor.fields):
        method_side = App(method_side, scope.var(scope.field_abs[j]))
        if fld.rec == REC_DIRECT:
            method_side = App(method_side, elim(scope.var(scope.field_abs[j])))
        elif fld.rec == REC_FUN:
            inner_app = App(scope.var(scope.field_abs[j], extra=1), Var(0))
            method_side = App(method_side, Lambda(elim(inner_app, extra=1)))
    statement = Id(inner, apd_side, method_side)
    ty = scope.close(statement)  # closes the field binders
    for i in reversed(range(c)):
        ty = Pi(method_type_term(sig, i), ty, hint=_method_hint(sig, i))
    ty = Pi(motive_type(sig), ty, hint="P")
    return _param_pis(sig, ty)


def synthesize_eliminator(sig: HitSignature) -> dict:
    """Everything the environment must declare for one validated signature."""
    elim_ty, elim_body = eliminator_declaration(sig)
    return {
        "former": former_declaration(sig),
        "ctors": [(ctor.name, ctor_declaration(sig, ctor))
                  for ctor in sig.ctors()],
        "eliminator": (eliminator_name(sig.name), elim_ty, elim_body),
        "path_axioms": [(path_axiom_name(sig, sig.paths[i]),
                         path_axiom_type(sig, i))
                        for i in range(len(sig.paths))],
        "method_types": [method_type_term(sig, i)
                         for i in range(len(sig.ctors()))],
    }
