"""The loop calculus: reading circle loops as words and counting windings.

A loop word is a proof of `base = base in S1` written with nothing but
reflexivity, the loop constructor, path inverse, and path concatenation
(through any chain of definitions). `recognize` checks a term at the loop
space and reads the word back; `winding` is the unique homomorphism from
words to the integers sending the loop to 1. `oracle_exponent_sum` computes
the same number by a deliberately different route (flattening the word to a
list of signed letters) so the two can cross-check each other in tests.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Union

from . import kernel
from .diagnostics import ErrorCode, fail
from .printer import print_term
from .syntax import App, Ascribe, Const, HitCtor, Lambda, Refl, Term, substitute


@dataclass(frozen=True, slots=True)
class LoopNames:
    """Which declarations play the circle roles. The defaults match the
    bundled corpus."""

    circle: str = "S1"
    base: str = "base"
    loop: str = "loop"
    concat: str = "concat"
    inverse: str = "inv"


DEFAULT_NAMES = LoopNames()


class LoopWord:
    __slots__ = ()


@dataclass(frozen=True, slots=True)
class WRefl(LoopWord):
    pass


@dataclass(frozen=True, slots=True)
class WLoop(LoopWord):
    pass


@dataclass(frozen=True, slots=True)
class WInverse(LoopWord):
    word: LoopWord


@dataclass(frozen=True, slots=True)
class WConcat(LoopWord):
    first: LoopWord
    second: LoopWord


def winding(word: LoopWord) -> int:
    """The winding number: the group homomorphism determined by loop -> 1."""
    if isinstance(word, WRefl):
        return 0
    if isinstance(word, WLoop):
        return 1
    if isinstance(word, WInverse):
        return -winding(word.word)
    if isinstance(word, WConcat):
        return winding(word.first) + winding(word.second)
    raise AssertionError(f"not a loop word: {word!r}")


def oracle_exponent_sum(word: LoopWord) -> int:
    """Exponent sum of the word, computed independently of `winding`: flatten
    the tree to a list of +1/-1 letters with an explicit work stack, then sum.
    """
    letters: list[int] = []
    stack: list[tuple[LoopWord, int]] = [(word, 1)]
    while stack:
        node, sign = stack.pop()
        if isinstance(node, WLoop):
            letters.append(sign)
        elif isinstance(node, WRefl):
            pass
        elif isinstance(node, WInverse):
            stack.append((node.word, -sign))
        elif isinstance(node, WConcat):
            stack.append((node.second, sign))
            stack.append((node.first, sign))
        else:
            raise AssertionError(f"not a loop word: {node!r}")
    return sum(letters)


def loop_power_word(exponent: int) -> LoopWord:
    """loop^exponent as a word: left-nested concatenations of the loop or its
    inverse, and the empty word for exponent zero."""
    if exponent == 0:
        return WRefl()
    letter: LoopWord = WLoop() if exponent > 0 else WInverse(WLoop())
    word = letter
    for _ in range(abs(exponent) - 1):
        word = WConcat(word, letter)
    return word


def word_source(word: LoopWord, names: LoopNames = DEFAULT_NAMES) -> str:
    """Surface syntax for a loop word, parenthesized enough to reparse."""
    if isinstance(word, WRefl):
        return f"(refl {names.base})"
    if isinstance(word, WLoop):
        return names.loop
    if isinstance(word, WInverse):
        return f"({names.inverse} {word_source(word.word, names)})"
    if isinstance(word, WConcat):
        return (f"({names.concat} {word_source(word.first, names)} "
                f"{word_source(word.second, names)})")
    raise AssertionError(f"not a loop word: {word!r}")


def recognize(t: Term, env: "kernel.Env",
              names: LoopNames = DEFAULT_NAMES) -> LoopWord:
    """Check t at the loop space of the circle and read it as a loop word.

    Fails with E-TYPE when t is not a proof of `base = base` in the circle,
    and with E-LOOPFORM when it is such a proof but is not built from refl,
    the loop, inverses, and concatenations (definitions unfold transparently;
    axioms and every other proof shape are opaque to the calculus).
    """
    sig = env.hits.get(names.circle)
    if sig is None:
        fail(ErrorCode.TYPE,
             f"no higher inductive type '{names.circle}' is in scope",
             kernel.span_of(t))
    if sig.point(names.base) is None or sig.path(names.loop) is None:
        fail(ErrorCode.TYPE,
             f"'{names.circle}' does not have point '{names.base}' and "
             f"path '{names.loop}'", kernel.span_of(t))
    base = kernel.eval_term(env, HitCtor(names.circle, names.base, ()), ())
    space = kernel.VId(kernel.VHitType(names.circle, ()), base, base)
    elab = kernel.check(kernel.Context(env), t, space)
    return _read(elab, env, names)


# Explicit-argument positions in the fully elaborated prelude spines:
# concat {A} {x} {y} p {z} q and inv {A} {x} {y} p.
_CONCAT_ARGS = {6: (3, 5), 2: (0, 1)}
_INVERSE_ARGS = {4: 3, 1: 0}


def _spine(t: Term) -> tuple[Term, list[Term]]:
    args: list[Term] = []
    while True:
        if isinstance(t, App):
            args.append(t.arg)
            t = t.fn
        elif isinstance(t, Ascribe):
            t = t.term
        else:
            args.reverse()
            return t, args


def _unfold(t: Term, env: "kernel.Env",
            names: LoopNames) -> tuple[Term, list[Term]]:
    """Spine of t after unfolding definition heads other than the calculus
    constants, with syntactic beta steps for any arguments they consume."""
    opaque = {names.concat, names.inverse, names.loop, names.base}
    while True:
        head, args = _spine(t)
        if isinstance(head, Lambda) and args:
            t = _rebuild(substitute(head.body, 0, args[0]), args[1:])
            continue
        if isinstance(head, Const) and head.name not in opaque:
            decl = env.declarations.get(head.name)
            if decl is not None and decl.kind == "def":
                levels = tuple(kernel._concrete(l) for l in head.levels)
                body = env.instance(head.name, levels, kernel.span_of(t)).body_term
                t = _rebuild(body, args)
                continue
        return head, args


def _rebuild(head: Term, args: list[Term]) -> Term:
    for arg in args:
        head = App(head, arg)
    return head


def _read(t: Term, env: "kernel.Env", names: LoopNames) -> LoopWord:
    head, args = _unfold(t, env, names)
    if isinstance(head, Refl) and not args:
        return WRefl()
    if (isinstance(head, HitCtor) and head.hit == names.circle
            and head.ctor == names.loop and not args):
        return WLoop()
    if isinstance(head, Const):
        if head.name == names.loop and not args:
            return WLoop()
        if head.name == names.concat and len(args) in _CONCAT_ARGS:
            first, second = _CONCAT_ARGS[len(args)]
            return WConcat(_read(args[first], env, names),
                           _read(args[second], env, names))
        if head.name == names.inverse and len(args) in _INVERSE_ARGS:
            return WInverse(_read(args[_INVERSE_ARGS[len(args)]], env, names))
    shown = print_term(_rebuild(head, args))
    fail(ErrorCode.LOOPFORM,
         "this proof is outside the loop calculus: expected refl, "
         f"'{names.loop}', '{names.inverse}', or '{names.concat}', found "
         f"{shown}", kernel.span_of(t))
