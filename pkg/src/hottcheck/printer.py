"""Pretty-printer for core terms.

Output is valid surface syntax that resolves back to an alpha-equal term:
binder names are freshened against everything in scope (including the global
names supplied by the caller), saturated built-ins print in their named form,
and higher inductive constructors, type formers, and eliminators print in the
fully explicit `@name` form so no implicit solving happens on reparse.
"""
from __future__ import annotations

from typing import Iterable, Optional, Sequence

from . import syntax as s
from .lexer import KEYWORDS
from .resolver import RESERVED_NAMES

TERM, ARROW, PROD, APP, ATOM = 0, 1, 2, 3, 4

_TYPE_POOL = ("A", "B", "C", "X", "Y", "Z", "W")
_VALUE_POOL = ("x", "y", "z", "a", "b", "c", "u", "v", "w")
_PATH_POOL = ("p", "q", "r", "e")


def _uses(t: s.Term, index: int) -> bool:
    if isinstance(t, s.Var):
        return t.index == index
    for name, binders in s._SHAPES[type(t)]:
        child = getattr(t, name)
        if child is None:
            continue
        if isinstance(child, tuple):
            if any(_uses(c, index + binders) for c in child):
                return True
        elif _uses(child, index + binders):
            return True
    return False


class _Printer:
    def __init__(self, names: Sequence[str], reserved: Iterable[str],
                 uvars: Sequence[str]):
        self.scope = list(names)
        self.avoid = set(reserved) | set(KEYWORDS) | set(RESERVED_NAMES)
        self.avoid.update(uvars)
        self.uvars = list(uvars)

    def fresh(self, hint: Optional[str], pool: Sequence[str]) -> str:
        taken = self.avoid | set(self.scope)
        if hint and hint != "_" and hint not in taken:
            return hint
        candidates = [hint] if hint and hint != "_" else []
        candidates.extend(pool)
        for base in candidates:
            if base not in taken:
                return base
        base = candidates[-1]
        while True:
            base += "'"
            if base not in taken:
                return base

    def level(self, level: s.Level) -> str:
        if isinstance(level, s.LVar):
            if level.index < len(self.uvars):
                return self.uvars[level.index]
            return f"l{level.index}"
        return str(level)

    def _wrap(self, text: str, prec: int, ambient: int) -> str:
        return f"({text})" if prec < ambient else text

    def go(self, t: s.Term, prec: int) -> str:
        method = getattr(self, f"_p_{type(t).__name__.lower()}", None)
        if method is None:
            raise AssertionError(f"unprintable node {type(t).__name__}")
        return method(t, prec)

    # ----- heads and leaves -------------------------------------------------

    def _p_var(self, t: s.Var, prec: int) -> str:
        if 0 <= t.index < len(self.scope):
            return self.scope[-1 - t.index]
        return f"?v{t.index}"

    def _p_universe(self, t: s.Universe, prec: int) -> str:
        return f"Type {self.level(t.level)}"

    def _p_const(self, t: s.Const, prec: int) -> str:
        name = f"@{t.name}" if t.positional else t.name
        if t.levels and any(l != 0 for l in t.levels):
            return f"{name} [{' '.join(self.level(l) for l in t.levels)}]"
        return name

    def _p_hole(self, t: s.Hole, prec: int) -> str:
        return "_"

    def _p_empty(self, t, prec):
        return "Empty"

    def _p_unit(self, t, prec):
        return "Unit"

    def _p_star(self, t, prec):
        return "star"

    def _p_nat(self, t, prec):
        return "Nat"

    def _p_zero(self, t, prec):
        return "zero"

    # ----- application-level nodes ------------------------------------------

    def _app(self, head: str, args: Sequence[s.Term], prec: int,
             braced: Sequence[bool] = ()) -> str:
        if not args:
            return head
        parts = [head]
        flags = list(braced) + [False] * (len(args) - len(braced))
        for arg, flag in zip(args, flags):
            if flag:
                parts.append("{" + self.go(arg, TERM) + "}")
            else:
                parts.append(self.go(arg, ATOM))
        return self._wrap(" ".join(parts), APP, prec)

    def _p_app(self, t: s.App, prec: int) -> str:
        spine: list[s.App] = []
        head = t
        while isinstance(head, s.App):
            spine.append(head)
            head = head.fn
        spine.reverse()
        parts = [self.go(head, APP)]
        for node in spine:
            if node.braced:
                parts.append("{" + self.go(node.arg, TERM) + "}")
            else:
                parts.append(self.go(node.arg, ATOM))
        return self._wrap(" ".join(parts), APP, prec)

    def _p_fst(self, t: s.Fst, prec: int) -> str:
        return self._app("fst", [t.pair], prec)

    def _p_snd(self, t: s.Snd, prec: int) -> str:
        return self._app("snd", [t.pair], prec)

    def _p_inl(self, t: s.Inl, prec: int) -> str:
        return self._app("inl", [t.value], prec)

    def _p_inr(self, t: s.Inr, prec: int) -> str:
        return self._app("inr", [t.value], prec)

    def _p_succ(self, t: s.Succ, prec: int) -> str:
        return self._app("succ", [t.arg], prec)

    def _p_sum(self, t: s.Sum, prec: int) -> str:
        return self._app("Sum", [t.left, t.right], prec)

    def _p_natelim(self, t: s.NatElim, prec: int) -> str:
        return self._app("nat-elim", [t.motive, t.base, t.step, t.scrutinee], prec)

    def _p_sumelim(self, t: s.SumElim, prec: int) -> str:
        return self._app("sum-elim", [t.motive, t.left, t.right, t.scrutinee], prec)

    def _p_emptyelim(self, t: s.EmptyElim, prec: int) -> str:
        return self._app("empty-elim", [t.motive, t.scrutinee], prec)

    def _p_unitelim(self, t: s.UnitElim, prec: int) -> str:
        return self._app("unit-elim", [t.motive, t.method, t.scrutinee], prec)

    def _p_refl(self, t: s.Refl, prec: int) -> str:
        if t.type is None:
            return self._app("refl", [t.point], prec)
        return self._app("@refl", [t.type, t.point], prec)

    def _p_j(self, t: s.J, prec: int) -> str:
        endpoint = self.fresh(None, _VALUE_POOL)
        self.scope.append(endpoint)
        path = self.fresh(None, _PATH_POOL)
        self.scope.append(path)
        motive = self.go(t.motive, TERM)
        self.scope.pop()
        self.scope.pop()
        motive_text = f"(\\{endpoint} {path}. {motive})"
        parts = [
            "J", motive_text,
            self.go(t.base, ATOM), self.go(t.endpoint, ATOM),
            self.go(t.path, ATOM),
        ]
        return self._wrap(" ".join(parts), APP, prec)

    def _p_hittype(self, t: s.HitType, prec: int) -> str:
        return self._app(f"@{t.hit}", list(t.args), prec)

    def _p_hitctor(self, t: s.HitCtor, prec: int) -> str:
        return self._app(f"@{t.ctor}", list(t.args), prec)

    def _p_hitelim(self, t: s.HitElim, prec: int) -> str:
        args = [t.motive, *t.methods, t.scrutinee]
        return self._app(f"@{t.hit}-elim", args, prec)

    # ----- binders and operators --------------------------------------------

    def _p_lambda(self, t: s.Lambda, prec: int) -> str:
        binders = []
        body: s.Term = t
        while isinstance(body, s.Lambda):
            if _uses(body.body, 0):
                name = self.fresh(body.hint, _VALUE_POOL)
            else:
                name = "_"
            binders.append(name)
            self.scope.append(name)
            body = body.body
        text = self.go(body, TERM)
        del self.scope[len(self.scope) - len(binders):]
        return self._wrap(f"\\{' '.join(binders)}. {text}", TERM, prec)

    def _p_pi(self, t: s.Pi, prec: int) -> str:
        domain = self.go(t.domain, PROD)
        dependent = _uses(t.codomain, 0)
        if dependent or t.implicit:
            pool = _TYPE_POOL if isinstance(t.domain, s.Universe) else _VALUE_POOL
            name = self.fresh(t.hint, pool) if dependent else "_"
            self.scope.append(name)
            codomain = self.go(t.codomain, ARROW)
            self.scope.pop()
            domain_full = self.go(t.domain, TERM)
            open_, close = ("{", "}") if t.implicit else ("(", ")")
            text = f"{open_}{name} : {domain_full}{close} -> {codomain}"
        else:
            self.scope.append("_")
            codomain = self.go(t.codomain, ARROW)
            self.scope.pop()
            text = f"{domain} -> {codomain}"
        return self._wrap(text, ARROW, prec)

    def _p_sigma(self, t: s.Sigma, prec: int) -> str:
        if _uses(t.second, 0):
            pool = _TYPE_POOL if isinstance(t.first, s.Universe) else _VALUE_POOL
            name = self.fresh(t.hint, pool)
            self.scope.append(name)
            second = self.go(t.second, PROD)
            self.scope.pop()
            first = self.go(t.first, TERM)
            text = f"({name} : {first}) * {second}"
        else:
            first = self.go(t.first, APP)
            self.scope.append("_")
            second = self.go(t.second, PROD)
            self.scope.pop()
            text = f"{first} * {second}"
        return self._wrap(text, PROD, prec)

    def _p_pair(self, t: s.Pair, prec: int) -> str:
        parts = [self.go(t.fst, TERM)]
        rest = t.snd
        while isinstance(rest, s.Pair):
            parts.append(self.go(rest.fst, TERM))
            rest = rest.snd
        parts.append(self.go(rest, TERM))
        return "(" + ", ".join(parts) + ")"

    def _p_id(self, t: s.Id, prec: int) -> str:
        lhs = self.go(t.lhs, ARROW)
        rhs = self.go(t.rhs, ARROW)
        ty = self.go(t.type, ARROW)
        return self._wrap(f"{lhs} = {rhs} in {ty}", TERM, prec)

    def _p_ascribe(self, t: s.Ascribe, prec: int) -> str:
        return f"({self.go(t.term, TERM)} : {self.go(t.annotation, TERM)})"


def print_term(t: s.Term, names: Sequence[str] = (),
               reserved: Iterable[str] = (),
               uvars: Sequence[str] = ()) -> str:
    """Render a core term as surface syntax.

    names are display names for the free variables, innermost last; reserved
    is every identifier binders must not capture (normally the global
    environment's names); uvars are the enclosing declaration's universe
    variable names for rendering level variables.
    """
    return _Printer(names, reserved, uvars).go(t, TERM)
