"""The checker core: evaluation, read-back, conversion, and typing.

Conversion is decided by normalization by evaluation. Terms evaluate into a
semantic domain of values (closures for binders, typed spines for stuck
terms), and two values are convertible exactly when their read-backs agree
syntactically. Read-back is type directed, so functions and pairs come back
eta-long; unit and identity types get no eta rule, and there is no axiom K.

Universe levels are explicit and monomorphic: `Type i : Type (i+1)`, a Pi or
Sigma lives at the maximum of its component levels, and there is no
cumulativity. Declarations may be prenex-polymorphic in levels; each instance
at a concrete level vector is checked separately, the all-zeros instance
eagerly at declaration time and the rest lazily on first use.

Typing is bidirectional. Lambdas, pairs, injections, and holes only check;
everything else infers. Implicit arguments are solved during application by
first-order matching of the implicit telescope's next explicit domain against
the inferred type of the supplied argument, and `@name` turns all solving off.
"""
from __future__ import annotations

import sys
from dataclasses import dataclass, fields as dataclass_fields, replace
from typing import Callable, Optional, Union

from . import hit
from .diagnostics import CheckError, ErrorCode, SourceSpan, fail
from .hit import REC_DIRECT, REC_FUN, REC_NONE, HitSignature
from .printer import print_term
from .resolver import GlobalInfo, RAxiom, RDecl, RDef, RHit
from .syntax import (
    _SHAPES,
    App,
    Ascribe,
    Const,
    Empty,
    EmptyElim,
    Fst,
    HitCtor,
    HitElim,
    HitType,
    Hole,
    Id,
    Inl,
    Inr,
    J,
    Lambda,
    LVar,
    Nat,
    NatElim,
    Pair,
    Pi,
    Refl,
    Sigma,
    Snd,
    Star,
    Succ,
    Sum,
    SumElim,
    Term,
    Unit,
    UnitElim,
    Universe,
    Var,
    Zero,
    instantiate_levels,
    map_subterms,
)

sys.setrecursionlimit(100_000)


def span_of(t: Term) -> Optional[SourceSpan]:
    return getattr(t, "span", None)


# ---------------------------------------------------------------------------
# values


class Value:
    __slots__ = ()


class Neutral:
    __slots__ = ()


@dataclass(eq=False, slots=True)
class TermClosure:
    genv: "Env"
    env: tuple[Value, ...]
    body: Term

    def __call__(self, v: Value) -> Value:
        return eval_term(self.genv, self.body, self.env + (v,))


@dataclass(eq=False, slots=True)
class PyClosure:
    fn: Callable[[Value], Value]

    def __call__(self, v: Value) -> Value:
        return self.fn(v)


Closure = Union[TermClosure, PyClosure]


@dataclass(eq=False, slots=True)
class TermClosure2:
    genv: "Env"
    env: tuple[Value, ...]
    body: Term  # binds two variables

    def __call__(self, a: Value, b: Value) -> Value:
        return eval_term(self.genv, self.body, self.env + (a, b))


@dataclass(eq=False, slots=True)
class PyClosure2:
    fn: Callable[[Value, Value], Value]

    def __call__(self, a: Value, b: Value) -> Value:
        return self.fn(a, b)


Closure2 = Union[TermClosure2, PyClosure2]


@dataclass(eq=False, slots=True)
class VUniverse(Value):
    level: int


@dataclass(eq=False, slots=True)
class VPi(Value):
    domain: Value
    codomain: Closure
    implicit: bool = False
    hint: Optional[str] = None


@dataclass(eq=False, slots=True)
class VLambda(Value):
    closure: Closure
    hint: Optional[str] = None


@dataclass(eq=False, slots=True)
class VSigma(Value):
    first: Value
    second: Closure
    hint: Optional[str] = None


@dataclass(eq=False, slots=True)
class VPair(Value):
    fst: Value
    snd: Value


@dataclass(eq=False, slots=True)
class VId(Value):
    type: Value
    lhs: Value
    rhs: Value


@dataclass(eq=False, slots=True)
class VRefl(Value):
    pass


@dataclass(eq=False, slots=True)
class VEmpty(Value):
    pass


@dataclass(eq=False, slots=True)
class VUnit(Value):
    pass


@dataclass(eq=False, slots=True)
class VStar(Value):
    pass


@dataclass(eq=False, slots=True)
class VNat(Value):
    pass


@dataclass(eq=False, slots=True)
class VZero(Value):
    pass


@dataclass(eq=False, slots=True)
class VSucc(Value):
    pred: Value


@dataclass(eq=False, slots=True)
class VSum(Value):
    left: Value
    right: Value


@dataclass(eq=False, slots=True)
class VInl(Value):
    value: Value


@dataclass(eq=False, slots=True)
class VInr(Value):
    value: Value


@dataclass(eq=False, slots=True)
class VHitType(Value):
    hit: str
    args: tuple[Value, ...]


@dataclass(eq=False, slots=True)
class VHitCtor(Value):
    hit: str
    ctor: str
    args: tuple[Value, ...]  # parameters then fields


@dataclass(eq=False, slots=True)
class VNeutral(Value):
    neutral: Neutral
    type: Value


@dataclass(eq=False, slots=True)
class NVar(Neutral):
    level: int


@dataclass(eq=False, slots=True)
class NConst(Neutral):
    name: str
    levels: tuple[int, ...]


@dataclass(eq=False, slots=True)
class NHitPath(Neutral):
    hit: str
    ctor: str
    args: tuple[Value, ...]


@dataclass(eq=False, slots=True)
class NApp(Neutral):
    fn: Neutral
    arg: Value
    arg_type: Value
    implicit: bool


@dataclass(eq=False, slots=True)
class NFst(Neutral):
    pair: Neutral


@dataclass(eq=False, slots=True)
class NSnd(Neutral):
    pair: Neutral


@dataclass(eq=False, slots=True)
class NJ(Neutral):
    type: Value
    lhs: Value
    motive: Closure2
    base: Value
    endpoint: Value
    path: Neutral


@dataclass(eq=False, slots=True)
class NNatElim(Neutral):
    motive: Value
    base: Value
    step: Value
    scrutinee: Neutral


@dataclass(eq=False, slots=True)
class NSumElim(Neutral):
    left: Value
    right: Value
    motive: Value
    on_left: Value
    on_right: Value
    scrutinee: Neutral


@dataclass(eq=False, slots=True)
class NEmptyElim(Neutral):
    motive: Value
    scrutinee: Neutral


@dataclass(eq=False, slots=True)
class NUnitElim(Neutral):
    motive: Value
    method: Value
    scrutinee: Neutral


@dataclass(eq=False, slots=True)
class NHitElim(Neutral):
    hit: str
    params: tuple[Value, ...]
    motive: Value
    methods: tuple[Value, ...]
    scrutinee: Neutral


VREFL = VRefl()
VSTAR = VStar()
VNAT = VNat()
VZERO = VZero()
VUNIT = VUnit()
VEMPTY = VEmpty()


# ---------------------------------------------------------------------------
# evaluation


def _concrete(level) -> int:
    if isinstance(level, LVar):
        raise AssertionError("universe variable escaped instantiation")
    return level


def eval_term(genv: "Env", t: Term, env: tuple[Value, ...]) -> Value:
    if isinstance(t, Var):
        return env[len(env) - 1 - t.index]
    if isinstance(t, App):
        return vapply(eval_term(genv, t.fn, env), eval_term(genv, t.arg, env))
    if isinstance(t, Const):
        inst = genv.instance(t.name, tuple(_concrete(l) for l in t.levels),
                             span_of(t))
        if inst.body_value is not None:
            return inst.body_value
        return VNeutral(NConst(t.name, tuple(t.levels)), inst.type_value)
    if isinstance(t, Lambda):
        return VLambda(TermClosure(genv, env, t.body), hint=t.hint)
    if isinstance(t, Pi):
        return VPi(eval_term(genv, t.domain, env),
                   TermClosure(genv, env, t.codomain),
                   implicit=t.implicit, hint=t.hint)
    if isinstance(t, Sigma):
        return VSigma(eval_term(genv, t.first, env),
                      TermClosure(genv, env, t.second), hint=t.hint)
    if isinstance(t, Pair):
        return VPair(eval_term(genv, t.fst, env), eval_term(genv, t.snd, env))
    if isinstance(t, Fst):
        return vfst(eval_term(genv, t.pair, env))
    if isinstance(t, Snd):
        return vsnd(eval_term(genv, t.pair, env))
    if isinstance(t, Universe):
        return VUniverse(_concrete(t.level))
    if isinstance(t, Id):
        return VId(eval_term(genv, t.type, env), eval_term(genv, t.lhs, env),
                   eval_term(genv, t.rhs, env))
    if isinstance(t, Refl):
        return VREFL
    if isinstance(t, J):
        return vj(TermClosure2(genv, env, t.motive),
                  eval_term(genv, t.base, env),
                  eval_term(genv, t.endpoint, env),
                  eval_term(genv, t.path, env))
    if isinstance(t, HitType):
        return VHitType(t.hit, tuple(eval_term(genv, a, env) for a in t.args))
    if isinstance(t, HitCtor):
        return _eval_hit_ctor(genv, t, env)
    if isinstance(t, HitElim):
        return vhitelim(genv, t.hit, eval_term(genv, t.motive, env),
                        tuple(eval_term(genv, m, env) for m in t.methods),
                        eval_term(genv, t.scrutinee, env))
    if isinstance(t, Empty):
        return VEMPTY
    if isinstance(t, Unit):
        return VUNIT
    if isinstance(t, Star):
        return VSTAR
    if isinstance(t, Nat):
        return VNAT
    if isinstance(t, Zero):
        return VZERO
    if isinstance(t, Succ):
        return VSucc(eval_term(genv, t.arg, env))
    if isinstance(t, Sum):
        return VSum(eval_term(genv, t.left, env), eval_term(genv, t.right, env))
    if isinstance(t, Inl):
        return VInl(eval_term(genv, t.value, env))
    if isinstance(t, Inr):
        return VInr(eval_term(genv, t.value, env))
    if isinstance(t, NatElim):
        return vnatelim(eval_term(genv, t.motive, env),
                        eval_term(genv, t.base, env),
                        eval_term(genv, t.step, env),
                        eval_term(genv, t.scrutinee, env))
    if isinstance(t, SumElim):
        return vsumelim(eval_term(genv, t.motive, env),
                        eval_term(genv, t.left, env),
                        eval_term(genv, t.right, env),
                        eval_term(genv, t.scrutinee, env))
    if isinstance(t, EmptyElim):
        return vemptyelim(eval_term(genv, t.motive, env),
                          eval_term(genv, t.scrutinee, env))
    if isinstance(t, UnitElim):
        return vunitelim(eval_term(genv, t.motive, env),
                         eval_term(genv, t.method, env),
                         eval_term(genv, t.scrutinee, env))
    if isinstance(t, Ascribe):
        return eval_term(genv, t.term, env)
    raise AssertionError(f"cannot evaluate {type(t).__name__}")


def _eval_hit_ctor(genv: "Env", t: HitCtor, env: tuple[Value, ...]) -> Value:
    sig = genv.signature(t.hit)
    args = tuple(eval_term(genv, a, env) for a in t.args)
    if sig.point(t.ctor) is not None:
        return VHitCtor(t.hit, t.ctor, args)
    path = sig.path(t.ctor)
    n = len(sig.params)
    boundary_env = args  # parameters then fields, exactly the boundary scope
    ty = VId(VHitType(t.hit, args[:n]),
             eval_term(genv, path.lhs, boundary_env),
             eval_term(genv, path.rhs, boundary_env))
    return VNeutral(NHitPath(t.hit, t.ctor, args), ty)


def vapply(fn: Value, arg: Value) -> Value:
    if isinstance(fn, VLambda):
        return fn.closure(arg)
    if isinstance(fn, VNeutral):
        pi = fn.type
        if not isinstance(pi, VPi):
            raise AssertionError("application head is not a function")
        return VNeutral(NApp(fn.neutral, arg, pi.domain, pi.implicit),
                        pi.codomain(arg))
    raise AssertionError(f"cannot apply {type(fn).__name__}")


def vfst(v: Value) -> Value:
    if isinstance(v, VPair):
        return v.fst
    if isinstance(v, VNeutral):
        sigma = v.type
        if not isinstance(sigma, VSigma):
            raise AssertionError("projection from a non-pair")
        return VNeutral(NFst(v.neutral), sigma.first)
    raise AssertionError(f"cannot project {type(v).__name__}")


def vsnd(v: Value) -> Value:
    if isinstance(v, VPair):
        return v.snd
    if isinstance(v, VNeutral):
        sigma = v.type
        if not isinstance(sigma, VSigma):
            raise AssertionError("projection from a non-pair")
        return VNeutral(NSnd(v.neutral), sigma.second(vfst(v)))
    raise AssertionError(f"cannot project {type(v).__name__}")


def vj(motive: Closure2, base: Value, endpoint: Value, path: Value) -> Value:
    if isinstance(path, VRefl):
        return base
    if isinstance(path, VNeutral):
        ty = path.type
        if not isinstance(ty, VId):
            raise AssertionError("path elimination at a non-identity type")
        return VNeutral(NJ(ty.type, ty.lhs, motive, base, endpoint, path.neutral),
                        motive(endpoint, path))
    raise AssertionError(f"cannot eliminate path {type(path).__name__}")


def vnatelim(motive: Value, base: Value, step: Value, scrut: Value) -> Value:
    depth = 0
    cur = scrut
    while isinstance(cur, VSucc):
        depth += 1
        cur = cur.pred
    if isinstance(cur, VZero):
        acc = base
        point: Value = VZERO
    elif isinstance(cur, VNeutral):
        acc = VNeutral(NNatElim(motive, base, step, cur.neutral),
                       vapply(motive, cur))
        point = cur
    else:
        raise AssertionError("natural number eliminator on a non-number")
    for _ in range(depth):
        acc = vapply(vapply(step, point), acc)
        point = VSucc(point)
    return acc


def vsumelim(motive: Value, on_left: Value, on_right: Value,
             scrut: Value) -> Value:
    if isinstance(scrut, VInl):
        return vapply(on_left, scrut.value)
    if isinstance(scrut, VInr):
        return vapply(on_right, scrut.value)
    if isinstance(scrut, VNeutral) and isinstance(scrut.type, VSum):
        return VNeutral(NSumElim(scrut.type.left, scrut.type.right, motive,
                                 on_left, on_right, scrut.neutral),
                        vapply(motive, scrut))
    raise AssertionError("sum eliminator on a non-sum")


def vemptyelim(motive: Value, scrut: Value) -> Value:
    if isinstance(scrut, VNeutral):
        return VNeutral(NEmptyElim(motive, scrut.neutral), vapply(motive, scrut))
    raise AssertionError("empty eliminator on a non-neutral")


def vunitelim(motive: Value, method: Value, scrut: Value) -> Value:
    if isinstance(scrut, VStar):
        return method
    if isinstance(scrut, VNeutral):
        return VNeutral(NUnitElim(motive, method, scrut.neutral),
                        vapply(motive, scrut))
    raise AssertionError("unit eliminator on a non-unit")


def vhitelim(genv: "Env", hit_name: str, motive: Value,
             methods: tuple[Value, ...], scrut: Value) -> Value:
    if isinstance(scrut, VHitCtor) and scrut.hit == hit_name:
        sig = genv.signature(hit_name)
        return apply_point_beta(genv, sig, motive, methods, scrut)
    if isinstance(scrut, VNeutral) and isinstance(scrut.type, VHitType):
        return VNeutral(NHitElim(hit_name, scrut.type.args, motive, methods,
                                 scrut.neutral),
                        vapply(motive, scrut))
    raise AssertionError("hit eliminator on an unexpected value")


def apply_point_beta(genv: "Env", sig: HitSignature, motive: Value,
                     methods: tuple[Value, ...], ctor_value: VHitCtor) -> Value:
    """The definitional computation rule at a point constructor: apply the
    matching method to the fields, inserting an induction hypothesis after
    each recursive one."""
    point = sig.point(ctor_value.ctor)
    out = methods[sig.ctor_index(ctor_value.ctor)]
    for val, spec in zip(ctor_value.args[len(sig.params):], point.fields):
        out = vapply(out, val)
        if spec.rec == REC_DIRECT:
            out = vapply(out, vhitelim(genv, sig.name, motive, methods, val))
        elif spec.rec == REC_FUN:
            out = vapply(out, VLambda(PyClosure(
                lambda d, _v=val: vhitelim(genv, sig.name, motive, methods,
                                           vapply(_v, d)))))
    return out


def vtransport(fam: Value, a_type: Value, lhs: Value, rhs: Value,
               path: Value, u: Value) -> Value:
    """Semantic transport, built directly on the path eliminator so that it
    is convertible with the library definition."""
    motive = PyClosure2(
        lambda y, _p: VPi(vapply(fam, lhs), PyClosure(lambda _u: vapply(fam, y))))
    base = VLambda(PyClosure(lambda x: x), hint="u")
    return vapply(vj(motive, base, rhs, path), u)


# ---------------------------------------------------------------------------
# read-back


def quote(genv: "Env", depth: int, v: Value, ty: Value) -> Term:
    if isinstance(ty, VPi):
        fresh = VNeutral(NVar(depth), ty.domain)
        hint = v.hint if isinstance(v, VLambda) else ty.hint
        body = quote(genv, depth + 1, vapply(v, fresh), ty.codomain(fresh))
        return Lambda(body, hint=hint)
    if isinstance(ty, VSigma):
        a = vfst(v)
        return Pair(quote(genv, depth, a, ty.first),
                    quote(genv, depth, vsnd(v), ty.second(a)))
    if isinstance(ty, VUniverse):
        return quote_type(genv, depth, v)
    if isinstance(ty, VId):
        if isinstance(v, VRefl):
            return Refl(None, quote(genv, depth, ty.lhs, ty.type))
        if isinstance(v, VNeutral):
            return quote_neutral(genv, depth, v.neutral)
        raise AssertionError("bad value at an identity type")
    if isinstance(ty, VNat):
        if isinstance(v, VZero):
            return Zero()
        if isinstance(v, VSucc):
            return Succ(quote(genv, depth, v.pred, VNAT))
        if isinstance(v, VNeutral):
            return quote_neutral(genv, depth, v.neutral)
        raise AssertionError("bad value at the natural number type")
    if isinstance(ty, VSum):
        if isinstance(v, VInl):
            return Inl(quote(genv, depth, v.value, ty.left))
        if isinstance(v, VInr):
            return Inr(quote(genv, depth, v.value, ty.right))
        if isinstance(v, VNeutral):
            return quote_neutral(genv, depth, v.neutral)
        raise AssertionError("bad value at a sum type")
    if isinstance(ty, VUnit):
        if isinstance(v, VStar):
            return Star()
        if isinstance(v, VNeutral):  # no eta for unit
            return quote_neutral(genv, depth, v.neutral)
        raise AssertionError("bad value at the unit type")
    if isinstance(ty, VHitType):
        if isinstance(v, VHitCtor):
            sig = genv.signature(v.hit)
            point = sig.point(v.ctor)
            return HitCtor(v.hit, v.ctor,
                           _quote_ctor_args(genv, depth, sig, point.fields,
                                            v.args))
        if isinstance(v, VNeutral):
            return quote_neutral(genv, depth, v.neutral)
        raise AssertionError("bad value at a higher inductive type")
    if isinstance(ty, (VEmpty, VNeutral)):
        if isinstance(v, VNeutral):
            return quote_neutral(genv, depth, v.neutral)
        raise AssertionError("bad value at a stuck type")
    raise AssertionError(f"cannot read back at type {type(ty).__name__}")


def quote_type(genv: "Env", depth: int, v: Value) -> Term:
    if isinstance(v, VUniverse):
        return Universe(v.level)
    if isinstance(v, VPi):
        fresh = VNeutral(NVar(depth), v.domain)
        return Pi(quote_type(genv, depth, v.domain),
                  quote_type(genv, depth + 1, v.codomain(fresh)),
                  implicit=v.implicit, hint=v.hint)
    if isinstance(v, VSigma):
        fresh = VNeutral(NVar(depth), v.first)
        return Sigma(quote_type(genv, depth, v.first),
                     quote_type(genv, depth + 1, v.second(fresh)),
                     hint=v.hint)
    if isinstance(v, VId):
        return Id(quote_type(genv, depth, v.type),
                  quote(genv, depth, v.lhs, v.type),
                  quote(genv, depth, v.rhs, v.type))
    if isinstance(v, VEmpty):
        return Empty()
    if isinstance(v, VUnit):
        return Unit()
    if isinstance(v, VNat):
        return Nat()
    if isinstance(v, VSum):
        return Sum(quote_type(genv, depth, v.left),
                   quote_type(genv, depth, v.right))
    if isinstance(v, VHitType):
        sig = genv.signature(v.hit)
        return HitType(v.hit, _quote_ctor_args(genv, depth, sig, (), v.args))
    if isinstance(v, VNeutral):
        return quote_neutral(genv, depth, v.neutral)
    raise AssertionError(f"not a type value: {type(v).__name__}")


def _quote_ctor_args(genv: "Env", depth: int, sig: HitSignature,
                     field_specs: tuple, args: tuple[Value, ...]) -> tuple:
    """Read back constructor arguments along the parameter telescope and,
    when present, the field telescope."""
    out = []
    env: tuple[Value, ...] = ()
    telescope = [ty for _, ty in sig.params] + [f.type for f in field_specs]
    for term, value in zip(telescope, args):
        out.append(quote(genv, depth, value, eval_term(genv, term, env)))
        env += (value,)
    return tuple(out)


def quote_family(genv: "Env", depth: int, fam: Value, domain: Value) -> Term:
    fresh = VNeutral(NVar(depth), domain)
    hint = fam.hint if isinstance(fam, VLambda) else None
    return Lambda(quote_type(genv, depth + 1, vapply(fam, fresh)), hint=hint)


def quote_neutral(genv: "Env", depth: int, ne: Neutral) -> Term:
    if isinstance(ne, NVar):
        return Var(depth - 1 - ne.level)
    if isinstance(ne, NConst):
        return Const(ne.name, ne.levels)
    if isinstance(ne, NHitPath):
        sig = genv.signature(ne.hit)
        path = sig.path(ne.ctor)
        return HitCtor(ne.hit, ne.ctor,
                       _quote_ctor_args(genv, depth, sig, path.fields, ne.args))
    if isinstance(ne, NApp):
        return App(quote_neutral(genv, depth, ne.fn),
                   quote(genv, depth, ne.arg, ne.arg_type),
                   braced=ne.implicit)
    if isinstance(ne, NFst):
        return Fst(quote_neutral(genv, depth, ne.pair))
    if isinstance(ne, NSnd):
        return Snd(quote_neutral(genv, depth, ne.pair))
    if isinstance(ne, NJ):
        x = VNeutral(NVar(depth), ne.type)
        p = VNeutral(NVar(depth + 1), VId(ne.type, ne.lhs, x))
        motive = quote_type(genv, depth + 2, ne.motive(x, p))
        base = quote(genv, depth, ne.base, ne.motive(ne.lhs, VREFL))
        endpoint = quote(genv, depth, ne.endpoint, ne.type)
        return J(motive, base, endpoint, quote_neutral(genv, depth, ne.path))
    if isinstance(ne, NNatElim):
        step_ty = VPi(VNAT, PyClosure(
            lambda n: VPi(vapply(ne.motive, n),
                          PyClosure(lambda _: vapply(ne.motive, VSucc(n))))))
        return NatElim(quote_family(genv, depth, ne.motive, VNAT),
                       quote(genv, depth, ne.base, vapply(ne.motive, VZERO)),
                       quote(genv, depth, ne.step, step_ty),
                       quote_neutral(genv, depth, ne.scrutinee))
    if isinstance(ne, NSumElim):
        domain = VSum(ne.left, ne.right)
        left_ty = VPi(ne.left,
                      PyClosure(lambda x: vapply(ne.motive, VInl(x))))
        right_ty = VPi(ne.right,
                       PyClosure(lambda x: vapply(ne.motive, VInr(x))))
        return SumElim(quote_family(genv, depth, ne.motive, domain),
                       quote(genv, depth, ne.on_left, left_ty),
                       quote(genv, depth, ne.on_right, right_ty),
                       quote_neutral(genv, depth, ne.scrutinee))
    if isinstance(ne, NEmptyElim):
        return EmptyElim(quote_family(genv, depth, ne.motive, VEMPTY),
                         quote_neutral(genv, depth, ne.scrutinee))
    if isinstance(ne, NUnitElim):
        return UnitElim(quote_family(genv, depth, ne.motive, VUNIT),
                        quote(genv, depth, ne.method, vapply(ne.motive, VSTAR)),
                        quote_neutral(genv, depth, ne.scrutinee))
    if isinstance(ne, NHitElim):
        sig = genv.signature(ne.hit)
        domain = VHitType(ne.hit, ne.params)
        methods = []
        for i, method in enumerate(ne.methods):
            ty = method_type_value(genv, sig, ne.params, ne.motive,
                                   tuple(ne.methods[:i]), i)
            methods.append(quote(genv, depth, method, ty))
        return HitElim(ne.hit, quote_family(genv, depth, ne.motive, domain),
                       tuple(methods),
                       quote_neutral(genv, depth, ne.scrutinee))
    raise AssertionError(f"cannot read back {type(ne).__name__}")


# ---------------------------------------------------------------------------
# semantic method types for higher inductive eliminators


def _project_boundary(genv: "Env", sig: HitSignature, motive: Value,
                      methods: tuple[Value, ...], field_vals: tuple[Value, ...],
                      ihs: dict[int, Value], env: tuple[Value, ...],
                      t: Term) -> Value:
    """The image of a path boundary under the methods: recursive fields map
    to their hypotheses, point constructors to their methods."""
    k = len(field_vals)
    if isinstance(t, Var):
        return ihs[k - 1 - t.index]
    if isinstance(t, App):
        return vapply(ihs[k - 1 - t.fn.index], eval_term(genv, t.arg, env))
    if isinstance(t, HitCtor):
        point = sig.point(t.ctor)
        out = methods[sig.ctor_index(t.ctor)]
        for value, spec in zip(t.args[len(sig.params):], point.fields):
            out = vapply(out, eval_term(genv, value, env))
            if spec.rec != REC_NONE:
                out = vapply(out, _project_boundary(genv, sig, motive, methods,
                                                    field_vals, ihs, env, value))
        return out
    raise AssertionError("unprojectable boundary survived validation")


def method_type_value(genv: "Env", sig: HitSignature, params: tuple[Value, ...],
                      motive: Value, methods_before: tuple[Value, ...],
                      index: int) -> Value:
    """The type a method for constructor `index` must have, as a value."""
    ctor = sig.ctors()[index]
    is_point = isinstance(ctor, hit.PointCtor)

    def build(j: int, vals: tuple[Value, ...], ihs: dict[int, Value]) -> Value:
        env = params + vals
        if j == len(ctor.fields):
            if is_point:
                return vapply(motive, VHitCtor(sig.name, ctor.name, env))
            self_v = VHitType(sig.name, params)
            lhs_v = eval_term(genv, ctor.lhs, env)
            rhs_v = eval_term(genv, ctor.rhs, env)
            path_v = VNeutral(NHitPath(sig.name, ctor.name, env),
                              VId(self_v, lhs_v, rhs_v))
            lhs_image = _project_boundary(genv, sig, motive, methods_before,
                                          vals, ihs, env, ctor.lhs)
            rhs_image = _project_boundary(genv, sig, motive, methods_before,
                                          vals, ihs, env, ctor.rhs)
            return VId(vapply(motive, rhs_v),
                       vtransport(motive, self_v, lhs_v, rhs_v, path_v,
                                  lhs_image),
                       rhs_image)
        fld = ctor.fields[j]
        dom = eval_term(genv, fld.type, env)

        def with_field(v: Value) -> Value:
            if fld.rec == REC_DIRECT:
                return VPi(vapply(motive, v),
                           PyClosure(lambda ih: build(j + 1, vals + (v,),
                                                      {**ihs, j: ih})))
            if fld.rec == REC_FUN:
                ih_dom = eval_term(genv, fld.fun_domain, env)
                ih_ty = VPi(ih_dom,
                            PyClosure(lambda d: vapply(motive, vapply(v, d))))
                return VPi(ih_ty,
                           PyClosure(lambda ih: build(j + 1, vals + (v,),
                                                      {**ihs, j: ih})))
            return build(j + 1, vals + (v,), ihs)

        return VPi(dom, PyClosure(with_field), hint=fld.hint)

    return build(0, (), {})


# ---------------------------------------------------------------------------
# conversion


def conv(genv: "Env", depth: int, a: Value, b: Value, ty: Value) -> bool:
    return a is b or quote(genv, depth, a, ty) == quote(genv, depth, b, ty)


def conv_type(genv: "Env", depth: int, a: Value, b: Value) -> bool:
    return a is b or quote_type(genv, depth, a) == quote_type(genv, depth, b)


# ---------------------------------------------------------------------------
# typing contexts


class Context:
    __slots__ = ("genv", "names", "types", "env")

    def __init__(self, genv: "Env", names: tuple = (), types: tuple = (),
                 env: tuple = ()):
        self.genv = genv
        self.names = names
        self.types = types
        self.env = env

    @property
    def depth(self) -> int:
        return len(self.types)

    def bind(self, name: Optional[str], ty: Value) -> "Context":
        var = VNeutral(NVar(self.depth), ty)
        return Context(self.genv, self.names + (name or "_",),
                       self.types + (ty,), self.env + (var,))

    def var_type(self, index: int) -> Value:
        return self.types[self.depth - 1 - index]

    def show_type(self, v: Value) -> str:
        return print_term(quote_type(self.genv, self.depth, v),
                          names=self.names)

    def show(self, t: Term) -> str:
        return print_term(t, names=self.names)


# ---------------------------------------------------------------------------
# bidirectional checking


def infer(ctx: Context, t: Term) -> tuple[Value, Term]:
    genv = ctx.genv
    if isinstance(t, Var):
        return ctx.var_type(t.index), t
    if isinstance(t, Const):
        levels = tuple(_concrete(l) for l in t.levels)
        inst = genv.instance(t.name, levels, span_of(t))
        return inst.type_value, t
    if isinstance(t, App):
        head, args = _spine(t)
        return _infer_spine(ctx, head, args)
    if isinstance(t, Universe):
        return VUniverse(_concrete(t.level) + 1), t
    if isinstance(t, Pi):
        i, dom = check_is_type(ctx, t.domain)
        inner = ctx.bind(t.hint, eval_term(genv, dom, ctx.env))
        j, cod = check_is_type(inner, t.codomain)
        return VUniverse(max(i, j)), replace(t, domain=dom, codomain=cod)
    if isinstance(t, Sigma):
        i, first = check_is_type(ctx, t.first)
        inner = ctx.bind(t.hint, eval_term(genv, first, ctx.env))
        j, second = check_is_type(inner, t.second)
        return VUniverse(max(i, j)), replace(t, first=first, second=second)
    if isinstance(t, Fst):
        ty, pair = infer(ctx, t.pair)
        if not isinstance(ty, VSigma):
            fail(ErrorCode.TYPE, "first projection of a term of type "
                 f"{ctx.show_type(ty)}, which is not a pair type", span_of(t))
        return ty.first, Fst(pair)
    if isinstance(t, Snd):
        ty, pair = infer(ctx, t.pair)
        if not isinstance(ty, VSigma):
            fail(ErrorCode.TYPE, "second projection of a term of type "
                 f"{ctx.show_type(ty)}, which is not a pair type", span_of(t))
        return ty.second(vfst(eval_term(genv, pair, ctx.env))), Snd(pair)
    if isinstance(t, Id):
        i, ty_el = check_is_type(ctx, t.type)
        ty_v = eval_term(genv, ty_el, ctx.env)
        lhs = check(ctx, t.lhs, ty_v)
        rhs = check(ctx, t.rhs, ty_v)
        return VUniverse(i), replace(t, type=ty_el, lhs=lhs, rhs=rhs)
    if isinstance(t, Refl):
        if t.type is None:
            ty_v, point = infer(ctx, t.point)
        else:
            _, ty_el = check_is_type(ctx, t.type)
            ty_v = eval_term(genv, ty_el, ctx.env)
            point = check(ctx, t.point, ty_v)
        point_v = eval_term(genv, point, ctx.env)
        return VId(ty_v, point_v, point_v), Refl(None, point)
    if isinstance(t, J):
        return _infer_j(ctx, t)
    if isinstance(t, Ascribe):
        _, ty_el = check_is_type(ctx, t.annotation)
        ty_v = eval_term(genv, ty_el, ctx.env)
        return ty_v, check(ctx, t.term, ty_v)
    if isinstance(t, HitType):
        return _infer_hit_type(ctx, t)
    if isinstance(t, HitCtor):
        return _infer_hit_ctor(ctx, t)
    if isinstance(t, HitElim):
        return _infer_hit_elim(ctx, t)
    if isinstance(t, (Empty, Unit, Nat)):
        return VUniverse(0), t
    if isinstance(t, Star):
        return VUNIT, t
    if isinstance(t, Zero):
        return VNAT, t
    if isinstance(t, Succ):
        return VNAT, Succ(check(ctx, t.arg, VNAT))
    if isinstance(t, Sum):
        i, left = check_is_type(ctx, t.left)
        j, right = check_is_type(ctx, t.right)
        return VUniverse(max(i, j)), replace(t, left=left, right=right)
    if isinstance(t, NatElim):
        fam, _, motive = check_family(ctx, t.motive, VNAT)
        base = check(ctx, t.base, vapply(fam, VZERO))
        step_ty = VPi(VNAT, PyClosure(
            lambda n: VPi(vapply(fam, n),
                          PyClosure(lambda _: vapply(fam, VSucc(n))))))
        step = check(ctx, t.step, step_ty)
        scrut = check(ctx, t.scrutinee, VNAT)
        result = vapply(fam, eval_term(genv, scrut, ctx.env))
        return result, NatElim(motive, base, step, scrut)
    if isinstance(t, SumElim):
        scrut_ty, scrut = infer(ctx, t.scrutinee)
        if not isinstance(scrut_ty, VSum):
            fail(ErrorCode.TYPE, "the scrutinee of 'sum-elim' has type "
                 f"{ctx.show_type(scrut_ty)}, not a sum type (an ascription "
                 "may help)", span_of(t.scrutinee) or span_of(t))
        fam, _, motive = check_family(ctx, t.motive, scrut_ty)
        left_ty = VPi(scrut_ty.left,
                      PyClosure(lambda x: vapply(fam, VInl(x))))
        right_ty = VPi(scrut_ty.right,
                       PyClosure(lambda x: vapply(fam, VInr(x))))
        left = check(ctx, t.left, left_ty)
        right = check(ctx, t.right, right_ty)
        result = vapply(fam, eval_term(genv, scrut, ctx.env))
        return result, SumElim(motive, left, right, scrut)
    if isinstance(t, EmptyElim):
        fam, _, motive = check_family(ctx, t.motive, VEMPTY)
        scrut = check(ctx, t.scrutinee, VEMPTY)
        result = vapply(fam, eval_term(genv, scrut, ctx.env))
        return result, EmptyElim(motive, scrut)
    if isinstance(t, UnitElim):
        fam, _, motive = check_family(ctx, t.motive, VUNIT)
        method = check(ctx, t.method, vapply(fam, VSTAR))
        scrut = check(ctx, t.scrutinee, VUNIT)
        result = vapply(fam, eval_term(genv, scrut, ctx.env))
        return result, UnitElim(motive, method, scrut)
    if isinstance(t, Lambda):
        fail(ErrorCode.TYPE, "cannot infer the type of a function literal; "
             "add an ascription or use it where a function type is expected",
             span_of(t))
    if isinstance(t, Pair):
        fail(ErrorCode.TYPE, "cannot infer the type of a pair literal; "
             "add an ascription", span_of(t))
    if isinstance(t, (Inl, Inr)):
        fail(ErrorCode.TYPE, "cannot infer the type of an injection; "
             "add an ascription giving the full sum type", span_of(t))
    if isinstance(t, Hole):
        fail(ErrorCode.TYPE, "a hole '_' can only stand for an implicit "
             "argument", span_of(t))
    raise AssertionError(f"cannot infer {type(t).__name__}")


def _infer_j(ctx: Context, t: J) -> tuple[Value, Term]:
    genv = ctx.genv
    path_ty, path = infer(ctx, t.path)
    if not isinstance(path_ty, VId):
        fail(ErrorCode.TYPE, "the path argument of 'J' has type "
             f"{ctx.show_type(path_ty)}, not an identity type",
             span_of(t.path) or span_of(t))
    a_type, lhs = path_ty.type, path_ty.lhs
    endpoint = check(ctx, t.endpoint, a_type)
    endpoint_v = eval_term(genv, endpoint, ctx.env)
    if not conv(genv, ctx.depth, endpoint_v, path_ty.rhs, a_type):
        fail(ErrorCode.TYPE, "the endpoint given to 'J' does not match the "
             "right endpoint of the path", span_of(t.endpoint) or span_of(t))
    inner = ctx.bind(None, a_type)
    x = inner.env[-1]
    inner2 = inner.bind(None, VId(a_type, lhs, x))
    _, motive = check_is_type(inner2, t.motive)
    motive_cl = TermClosure2(genv, ctx.env, motive)
    base = check(ctx, t.base, motive_cl(lhs, VREFL))
    path_v = eval_term(genv, path, ctx.env)
    result = motive_cl(endpoint_v, path_v)
    return result, J(motive, base, endpoint, path)


def _infer_hit_type(ctx: Context, t: HitType) -> tuple[Value, Term]:
    genv = ctx.genv
    sig = genv.signature(t.hit)
    args, _ = _check_telescope(ctx, [ty for _, ty in sig.params], t.args,
                               span_of(t))
    return VUniverse(0), HitType(t.hit, tuple(args))


def _infer_hit_ctor(ctx: Context, t: HitCtor) -> tuple[Value, Term]:
    genv = ctx.genv
    sig = genv.signature(t.hit)
    ctor = sig.point(t.ctor) or sig.path(t.ctor)
    telescope = [ty for _, ty in sig.params] + [f.type for f in ctor.fields]
    args, values = _check_telescope(ctx, telescope, t.args, span_of(t))
    n = len(sig.params)
    if isinstance(ctor, hit.PointCtor):
        return VHitType(t.hit, values[:n]), HitCtor(t.hit, t.ctor, tuple(args))
    ty = VId(VHitType(t.hit, values[:n]),
             eval_term(genv, ctor.lhs, values),
             eval_term(genv, ctor.rhs, values))
    return ty, HitCtor(t.hit, t.ctor, tuple(args))


def _check_telescope(ctx: Context, telescope: list[Term], args: tuple,
                     span: Optional[SourceSpan]) -> tuple[list, tuple]:
    genv = ctx.genv
    if len(args) != len(telescope):
        fail(ErrorCode.TYPE, f"expected {len(telescope)} arguments, "
             f"got {len(args)}", span)
    out = []
    values: tuple[Value, ...] = ()
    for term, arg in zip(telescope, args):
        expected = eval_term(genv, term, values)
        arg_el = check(ctx, arg, expected)
        out.append(arg_el)
        values += (eval_term(genv, arg_el, ctx.env),)
    return out, values


def _infer_hit_elim(ctx: Context, t: HitElim) -> tuple[Value, Term]:
    genv = ctx.genv
    scrut_ty, scrut = infer(ctx, t.scrutinee)
    if not (isinstance(scrut_ty, VHitType) and scrut_ty.hit == t.hit):
        fail(ErrorCode.TYPE, f"the scrutinee of the '{t.hit}' eliminator has "
             f"type {ctx.show_type(scrut_ty)}",
             span_of(t.scrutinee) or span_of(t))
    sig = genv.signature(t.hit)
    params = scrut_ty.args
    fam, _, motive = check_family(ctx, t.motive, scrut_ty)
    if len(t.methods) != len(sig.ctors()):
        fail(ErrorCode.TYPE, f"the '{t.hit}' eliminator expects "
             f"{len(sig.ctors())} methods, got {len(t.methods)}", span_of(t))
    methods = []
    method_vals: tuple[Value, ...] = ()
    for i, method in enumerate(t.methods):
        expected = method_type_value(genv, sig, params, fam, method_vals, i)
        method_el = check(ctx, method, expected)
        methods.append(method_el)
        method_vals += (eval_term(genv, method_el, ctx.env),)
    result = vapply(fam, eval_term(genv, scrut, ctx.env))
    return result, HitElim(t.hit, motive, tuple(methods), scrut)


def check_family(ctx: Context, t: Term,
                 domain: Value) -> tuple[Value, int, Term]:
    """Check a term as a type family over `domain`, tolerating a bare lambda
    whose universe level is read off from its body."""
    genv = ctx.genv
    if isinstance(t, Lambda):
        inner = ctx.bind(t.hint, domain)
        level, body = check_is_type(inner, t.body)
        elab = Lambda(body, hint=t.hint)
        return eval_term(genv, elab, ctx.env), level, elab
    ty, elab = infer(ctx, t)
    if not isinstance(ty, VPi) or ty.implicit:
        fail(ErrorCode.TYPE, "expected a family of types, found a term of "
             f"type {ctx.show_type(ty)}", span_of(t))
    fresh = VNeutral(NVar(ctx.depth), ty.domain)
    target = ty.codomain(fresh)
    if not isinstance(target, VUniverse):
        fail(ErrorCode.TYPE, "expected a family of types, found a term of "
             f"type {ctx.show_type(ty)}", span_of(t))
    if not conv_type(genv, ctx.depth, ty.domain, domain):
        fail(ErrorCode.TYPE, "the family is indexed over "
             f"{ctx.show_type(ty.domain)} but the scrutinee lives in "
             f"{ctx.show_type(domain)}", span_of(t))
    return eval_term(genv, elab, ctx.env), target.level, elab


def check_is_type(ctx: Context, t: Term) -> tuple[int, Term]:
    ty, elab = infer(ctx, t)
    if not isinstance(ty, VUniverse):
        fail(ErrorCode.TYPE,
             f"expected a type, found a term of type {ctx.show_type(ty)}",
             span_of(t))
    return ty.level, elab


def check(ctx: Context, t: Term, expected: Value) -> Term:
    genv = ctx.genv
    if isinstance(t, Lambda):
        if not isinstance(expected, VPi):
            fail(ErrorCode.TYPE, "found a function literal where a term of "
                 f"type {ctx.show_type(expected)} was expected", span_of(t))
        inner = ctx.bind(t.hint, expected.domain)
        body = check(inner, t.body, expected.codomain(inner.env[-1]))
        return Lambda(body, hint=t.hint)
    if isinstance(t, Pair):
        if not isinstance(expected, VSigma):
            fail(ErrorCode.TYPE, "found a pair where a term of type "
                 f"{ctx.show_type(expected)} was expected", span_of(t))
        fst = check(ctx, t.fst, expected.first)
        snd = check(ctx, t.snd,
                    expected.second(eval_term(genv, fst, ctx.env)))
        return Pair(fst, snd)
    if isinstance(t, Inl):
        if not isinstance(expected, VSum):
            fail(ErrorCode.TYPE, "found 'inl' where a term of type "
                 f"{ctx.show_type(expected)} was expected", span_of(t))
        return Inl(check(ctx, t.value, expected.left))
    if isinstance(t, Inr):
        if not isinstance(expected, VSum):
            fail(ErrorCode.TYPE, "found 'inr' where a term of type "
                 f"{ctx.show_type(expected)} was expected", span_of(t))
        return Inr(check(ctx, t.value, expected.right))
    if isinstance(t, Refl) and t.type is None and isinstance(expected, VId):
        point = check(ctx, t.point, expected.type)
        point_v = eval_term(genv, point, ctx.env)
        found = VId(expected.type, point_v, point_v)
        if conv_type(genv, ctx.depth, found, expected):
            return Refl(None, point)
        fail(ErrorCode.TYPE, f"type mismatch: expected "
             f"{ctx.show_type(expected)}, found {ctx.show_type(found)}",
             span_of(t))
    if isinstance(t, Hole):
        fail(ErrorCode.TYPE, "a hole '_' can only stand for an implicit "
             "argument", span_of(t))
    found, elab = infer(ctx, t)
    if conv_type(genv, ctx.depth, found, expected):
        return elab
    if isinstance(found, VUniverse) and isinstance(expected, VUniverse):
        fail(ErrorCode.UNIV, f"universe mismatch: this is a Type "
             f"{found.level} but Type {expected.level} was expected "
             "(levels are exact, with no cumulativity)", span_of(t))
    fail(ErrorCode.TYPE, f"type mismatch: expected {ctx.show_type(expected)}, "
         f"found {ctx.show_type(found)}", span_of(t))


# ---------------------------------------------------------------------------
# application spines and implicit argument solving


def _spine(t: Term) -> tuple[Term, list]:
    args = []
    while isinstance(t, App):
        args.append((t.arg, t.braced, span_of(t)))
        t = t.fn
    args.reverse()
    return t, args


def _infer_spine(ctx: Context, head: Term, args: list) -> tuple[Value, Term]:
    genv = ctx.genv
    fty, elab = infer(ctx, head)
    positional = isinstance(head, Const) and head.positional
    i = 0
    while i < len(args):
        arg, braced, span = args[i]
        if not isinstance(fty, VPi):
            fail(ErrorCode.TYPE, "this term is applied to too many "
                 f"arguments: it has type {ctx.show_type(fty)}",
                 span or span_of(arg))
        if positional:
            if isinstance(arg, Hole):
                fail(ErrorCode.TYPE, "'_' is not allowed in an '@' "
                     "application; every argument is positional there",
                     span_of(arg) or span)
            arg_el = check(ctx, arg, fty.domain)
            elab = App(elab, arg_el, braced=fty.implicit)
            fty = fty.codomain(eval_term(genv, arg_el, ctx.env))
            i += 1
            continue
        if braced and not fty.implicit:
            fail(ErrorCode.TYPE, "unexpected braced argument: the next "
                 "argument here is explicit", span_of(arg) or span)
        if braced and not isinstance(arg, Hole):
            arg_el = check(ctx, arg, fty.domain)
            elab = App(elab, arg_el, braced=True)
            fty = fty.codomain(eval_term(genv, arg_el, ctx.env))
            i += 1
            continue
        if fty.implicit:
            fty, elab, i = _solve_group(ctx, fty, elab, args, i)
            continue
        arg_el = check(ctx, arg, fty.domain)
        elab = App(elab, arg_el, braced=False)
        fty = fty.codomain(eval_term(genv, arg_el, ctx.env))
        i += 1
    return fty, elab


def _solve_group(ctx: Context, fty: Value, elab: Term, args: list,
                 i: int) -> tuple[Value, Term, int]:
    """Solve a maximal run of implicit arguments by matching the following
    explicit domain against the inferred type of the next explicit argument.
    Braced holes in the run are skipped slots solved like the others."""
    genv = ctx.genv
    j = i
    holes = 0
    while j < len(args) and args[j][1] and isinstance(args[j][0], Hole):
        holes += 1
        j += 1
    group_span = args[i][2] or span_of(args[i][0])
    if j >= len(args):
        fail(ErrorCode.TYPE, "cannot determine the implicit arguments "
             "here: no explicit argument follows; use '@' or braces",
             group_span)
    arg, braced, span = args[j]
    if braced:
        fail(ErrorCode.TYPE, "a braced argument cannot follow a deferred "
             "'{_}' hole; give the arguments in order or use '@'",
             span or span_of(arg))
    telescope = quote_type(genv, ctx.depth, fty)
    k = 0
    cursor = telescope
    while isinstance(cursor, Pi) and cursor.implicit:
        k += 1
        cursor = cursor.codomain
    if not isinstance(cursor, Pi):
        fail(ErrorCode.TYPE, "cannot determine the implicit arguments here: "
             "the function never takes an explicit argument after them; "
             "use '@' or braces", group_span)
    if holes > k:
        fail(ErrorCode.TYPE, "more '{_}' holes than implicit argument "
             "positions", group_span)
    pattern = cursor.domain
    try:
        arg_ty, arg_el = infer(ctx, arg)
    except CheckError as err:
        if err.diagnostic.code is ErrorCode.TYPE:
            fail(ErrorCode.TYPE, "cannot infer this argument to solve the "
                 "implicit arguments before it; name it in a definition, "
                 "ascribe it, or use '@'", span or span_of(arg))
        raise
    target = quote_type(genv, ctx.depth, arg_ty)
    solutions = _match_pattern(pattern, k, target)
    if solutions is None or len(solutions) < k:
        fail(ErrorCode.TYPE, "cannot determine the implicit arguments from "
             "this application; give them with braces or use '@'",
             span or span_of(arg))
    for s in range(k):
        sol = solutions[s]
        elab = App(elab, sol, braced=True)
        fty = fty.codomain(eval_term(genv, sol, ctx.env))
    if not isinstance(fty, VPi) or fty.implicit:
        raise AssertionError("implicit telescope out of step with its quote")
    if not conv_type(genv, ctx.depth, arg_ty, fty.domain):
        fail(ErrorCode.TYPE, "type mismatch: expected "
             f"{ctx.show_type(fty.domain)}, found {ctx.show_type(arg_ty)}",
             span or span_of(arg))
    elab = App(elab, arg_el, braced=False)
    fty = fty.codomain(eval_term(genv, arg_el, ctx.env))
    return fty, elab, j + 1


def _match_pattern(pattern: Term, k: int,
                   target: Term) -> Optional[dict[int, Term]]:
    """First-order matching: pattern lives under k binders (the implicit
    slots); target has none. Solutions are slot index to subterm of target."""
    solutions: dict[int, Term] = {}

    def go(p: Term, t: Term, crossed: int) -> bool:
        if isinstance(p, Var):
            offset = p.index - crossed
            if 0 <= offset < k:
                cand = _strengthen(t, crossed)
                if cand is None:
                    return False
                slot = k - 1 - offset
                if slot in solutions:
                    return solutions[slot] == cand
                solutions[slot] = cand
                return True
            if not isinstance(t, Var):
                return False
            if p.index < crossed:
                return t.index == p.index
            return t.index == p.index - k
        if type(p) is not type(t):
            return False
        shape = _SHAPES.get(type(p), ())
        child_names = {name for name, _ in shape}
        for f in dataclass_fields(p):
            if f.name in child_names or not f.compare:
                continue
            if getattr(p, f.name) != getattr(t, f.name):
                return False
        for name, binders in shape:
            pc, tc = getattr(p, name), getattr(t, name)
            if isinstance(pc, tuple):
                if not isinstance(tc, tuple) or len(pc) != len(tc):
                    return False
                if not all(go(a, b, crossed + binders)
                           for a, b in zip(pc, tc)):
                    return False
            elif pc is None or tc is None:
                if pc is not tc:
                    return False
            elif not go(pc, tc, crossed + binders):
                return False
        return True

    return solutions if go(pattern, target, 0) else None


def _strengthen(t: Term, amount: int) -> Optional[Term]:
    """Shift t down by amount, or None if it uses the binders being removed."""
    if amount == 0:
        return t
    ok = True

    def go(s: Term, crossed: int) -> Term:
        nonlocal ok
        if isinstance(s, Var):
            if s.index < crossed:
                return s
            if s.index - crossed < amount:
                ok = False
                return s
            return replace(s, index=s.index - amount)
        return map_subterms(s, lambda c, b: go(c, crossed + b))

    out = go(t, 0)
    return out if ok else None


# ---------------------------------------------------------------------------
# the global environment


@dataclass(eq=False, slots=True)
class Declaration:
    name: str
    kind: str  # "def" | "axiom"
    univars: tuple[str, ...]
    type_term: Optional[Term]  # resolved, possibly with level variables
    body_term: Optional[Term]
    generated: bool = False
    span: Optional[SourceSpan] = None


@dataclass(eq=False, slots=True)
class Instance:
    """One declaration checked at a concrete level vector."""

    type_value: Value
    body_value: Optional[Value]
    type_term: Term  # elaborated
    body_term: Optional[Term]


class Env:
    """Declarations in order, higher inductive signatures, and the checked
    instances of each declaration at the level vectors used so far."""

    def __init__(self):
        self.declarations: dict[str, Declaration] = {}
        self.order: list[str] = []
        self.hits: dict[str, HitSignature] = {}
        self._ctor_hit: dict[str, str] = {}
        self._elim_hit: dict[str, str] = {}
        self._instances: dict[tuple, Instance] = {}

    def __contains__(self, name: str) -> bool:
        return name in self.declarations or name in self.hits

    def signature(self, hit_name: str) -> HitSignature:
        return self.hits[hit_name]

    def lookup_info(self, name: str) -> Optional[GlobalInfo]:
        sig = self.hits.get(name)
        if sig is not None:
            return GlobalInfo(name, role="hit-type", hit=name,
                              param_count=len(sig.params))
        owner = self._ctor_hit.get(name)
        if owner is not None:
            sig = self.hits[owner]
            ctor = sig.point(name) or sig.path(name)
            return GlobalInfo(name, role="hit-ctor", hit=owner,
                              param_count=len(sig.params),
                              field_count=len(ctor.fields))
        owner = self._elim_hit.get(name)
        if owner is not None:
            sig = self.hits[owner]
            return GlobalInfo(name, univars=1, role="hit-elim", hit=owner,
                              param_count=len(sig.params),
                              method_count=len(sig.ctors()))
        decl = self.declarations.get(name)
        if decl is not None:
            return GlobalInfo(name, univars=len(decl.univars))
        return None

    def instance(self, name: str, levels: tuple[int, ...],
                 span: Optional[SourceSpan] = None) -> Instance:
        key = (name, levels)
        got = self._instances.get(key)
        if got is not None:
            return got
        decl = self.declarations.get(name)
        if decl is None:
            raise AssertionError(f"unknown constant '{name}'")
        if len(levels) != len(decl.univars):
            fail(ErrorCode.TYPE, f"'{name}' takes {len(decl.univars)} "
                 f"universe levels, got {len(levels)}", span)
        got = self._check_instance(decl, levels)
        self._instances[key] = got
        return got

    def _check_instance(self, decl: Declaration,
                        levels: tuple[int, ...]) -> Instance:
        ctx = Context(self)
        ty_t = (instantiate_levels(decl.type_term, levels)
                if decl.type_term is not None else None)
        body_t = (instantiate_levels(decl.body_term, levels)
                  if decl.body_term is not None else None)
        if decl.kind == "axiom":
            _, ty_el = check_is_type(ctx, ty_t)
            return Instance(eval_term(self, ty_el, ()), None, ty_el, None)
        if ty_t is not None:
            _, ty_el = check_is_type(ctx, ty_t)
            ty_v = eval_term(self, ty_el, ())
            body_el = check(ctx, body_t, ty_v)
        else:
            ty_v, body_el = infer(ctx, body_t)
            ty_el = quote_type(self, 0, ty_v)
        return Instance(ty_v, eval_term(self, body_el, ()), ty_el, body_el)

    def declare(self, decl: Declaration, *, alias_of_hit: bool = False) -> None:
        taken = (decl.name in self.declarations
                 or (decl.name in self.hits and not alias_of_hit))
        if taken:
            fail(ErrorCode.SCOPE, f"duplicate declaration of '{decl.name}'",
                 decl.span)
        self.declarations[decl.name] = decl
        try:
            self.instance(decl.name, (0,) * len(decl.univars), decl.span)
        except BaseException:
            del self.declarations[decl.name]
            raise
        self.order.append(decl.name)

    def remove(self, name: str) -> None:
        self.declarations.pop(name, None)
        self._ctor_hit.pop(name, None)
        self._elim_hit.pop(name, None)
        if name in self.order:
            self.order.remove(name)
        for key in [k for k in self._instances if k[0] == name]:
            del self._instances[key]


def check_declaration(env: Env, decl: RDecl) -> list[str]:
    """Check one resolved declaration and add it (and anything it generates)
    to the environment. Returns the names declared."""
    try:
        if isinstance(decl, RDef):
            env.declare(Declaration(decl.name, "def", decl.univars,
                                    decl.annotation, decl.body,
                                    span=decl.span))
            return [decl.name]
        if isinstance(decl, RAxiom):
            env.declare(Declaration(decl.name, "axiom", decl.univars,
                                    decl.type, None, span=decl.span))
            return [decl.name]
        if isinstance(decl, RHit):
            return _declare_hit(env, decl)
        raise AssertionError(f"unknown declaration {type(decl).__name__}")
    except CheckError as err:
        if err.diagnostic.span is None and decl.span is not None:
            raise CheckError(err.diagnostic.with_default_span(decl.span)) \
                from None
        raise


def _declare_hit(env: Env, decl: RHit) -> list[str]:
    if decl.name in env:
        fail(ErrorCode.SCOPE, f"duplicate declaration of '{decl.name}'",
             decl.span)
    added: list[str] = []
    hit_added = False
    try:
        ctx = Context(env)
        params = []
        for hint, ty in decl.params:
            _, ty_el = check_is_type(ctx, ty)
            params.append((hint, ty_el))
            ctx = ctx.bind(hint, eval_term(env, ty_el, ctx.env))
        sig = HitSignature(decl.name, tuple(params))
        env.hits[decl.name] = sig
        hit_added = True
        seen_path = False
        for rctor in decl.ctors:
            if rctor.name in env or sig.point(rctor.name) or sig.path(rctor.name):
                fail(ErrorCode.SCOPE,
                     f"duplicate declaration of '{rctor.name}'", rctor.span)
            level, ty_el = check_is_type(ctx, rctor.type)
            if level != 0:
                fail(ErrorCode.HIT_SCHEMA, f"constructor '{rctor.name}' must "
                     f"live in the lowest universe, but lands in Type {level}",
                     rctor.span)
            if rctor.kind == "point":
                if seen_path:
                    fail(ErrorCode.HIT_SCHEMA, "point constructors must come "
                         "before path constructors", rctor.span)
                point = hit.analyze_point(sig, rctor.name, ty_el, rctor.span)
                sig = replace(sig, points=sig.points + (point,))
            else:
                seen_path = True
                path = hit.analyze_path(sig, rctor.name, ty_el, rctor.span)
                sig = replace(sig, paths=sig.paths + (path,))
            env.hits[decl.name] = sig
        if sig.paths:
            for needed in (hit.TRANSPORT_NAME, hit.APD_NAME):
                if needed not in env.declarations:
                    fail(ErrorCode.HIT_SCHEMA,
                         f"path constructors state their rules through "
                         f"'{needed}', which is not in scope", decl.span)
        synthesized = hit.synthesize_eliminator(sig)
        former_ty, former_body = synthesized["former"]
        env.declare(Declaration(decl.name, "def", (), former_ty, former_body,
                                generated=True, span=decl.span),
                    alias_of_hit=True)
        added.append(decl.name)
        for cname, (cty, cbody) in synthesized["ctors"]:
            env.declare(Declaration(cname, "def", (), cty, cbody,
                                    generated=True, span=decl.span))
            env._ctor_hit[cname] = decl.name
            added.append(cname)
        elim_name, elim_ty, elim_body = synthesized["eliminator"]
        env.declare(Declaration(elim_name, "def", ("j",), elim_ty, elim_body,
                                generated=True, span=decl.span))
        env._elim_hit[elim_name] = decl.name
        added.append(elim_name)
        for aname, aty in synthesized["path_axioms"]:
            env.declare(Declaration(aname, "axiom", ("j",), aty, None,
                                    generated=True, span=decl.span))
            added.append(aname)
        return added
    except BaseException:
        for name in added:
            env.remove(name)
        if hit_added:
            del env.hits[decl.name]
        raise
