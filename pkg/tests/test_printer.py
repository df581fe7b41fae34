"""Printer goldens and the print/reparse round-trip property.

Printed output must reparse and re-resolve to the same core term, for every
term the checker can produce. That property is the real spec of the printer;
the goldens just pin the concrete notation.
"""
from hypothesis import given, settings
from hypothesis import strategies as st

from hottcheck import syntax as core
from hottcheck.printer import print_term
from hottcheck.resolver import GlobalInfo, resolve_term
from hottcheck.surface import parse_term


def reparse(source, lookup=None, univars=()):
    return resolve_term(parse_term(source), lookup or (lambda name: None),
                        univars)


def roundtrips(t, lookup=None, univars=()):
    printed = print_term(t, uvars=univars)
    assert reparse(printed, lookup, univars) == t, printed
    return printed


# ----- goldens --------------------------------------------------------------


def test_identity_lambda():
    assert print_term(core.Lambda(core.Var(0), hint="x")) == "\\x. x"


def test_lambda_chain_merges():
    t = core.Lambda(core.Lambda(core.Var(1), hint="y"), hint="x")
    assert print_term(t) == "\\x _. x"


def test_dependent_function_type():
    t = core.Pi(core.Universe(0), core.Var(0), hint="A")
    assert print_term(t) == "(A : Type 0) -> A"


def test_non_dependent_pi_prints_as_arrow():
    t = core.Pi(core.Nat(), core.Nat())
    assert print_term(t) == "Nat -> Nat"


def test_numeral():
    t = core.Succ(core.Succ(core.Succ(core.Succ(core.Zero()))))
    assert print_term(t) == "succ (succ (succ (succ zero)))"


def test_identity_type_sugar():
    t = core.Id(core.Nat(), core.Zero(), core.Zero())
    assert print_term(t) == "zero = zero in Nat"


def test_refl_forms():
    assert print_term(core.Refl(None, core.Zero())) == "refl zero"
    assert print_term(core.Refl(core.Nat(), core.Zero())) == "@refl Nat zero"


def test_pairs_always_parenthesized():
    t = core.Pair(core.Zero(), core.Pair(core.Star(), core.Zero()))
    assert print_term(t) == "(zero, star, zero)"


def test_implicit_binder_prints_braced():
    t = core.Pi(core.Universe(0), core.Pi(core.Var(0), core.Var(1)),
                hint="A", implicit=True)
    assert print_term(t) == "{A : Type 0} -> A -> A"


def test_braced_argument_prints_braced():
    t = core.App(core.Const("f", ()), core.Nat(), braced=True)
    assert print_term(t) == "f {Nat}"


def test_shadowed_hints_are_freshened():
    t = core.Lambda(core.Lambda(core.Var(1), hint="x"), hint="x")
    printed = print_term(t)
    assert reparse(printed) == t


def test_universe_variables():
    t = core.Universe(core.LVar(0))
    assert print_term(t, uvars=("i",)) == "Type i"


def test_constant_level_arguments():
    lookup = {"ap": GlobalInfo("ap", univars=2)}.get
    t = core.Const("ap", (1, 0))
    assert print_term(t) == "ap [1 0]"
    assert reparse("ap [1 0]", lookup) == t
    assert print_term(core.Const("ap", (0, 0))) == "ap"


def test_positional_constant():
    t = core.Const("f", (), positional=True)
    assert print_term(t) == "@f"


def test_path_induction():
    t = core.J(core.Nat(), core.Zero(), core.Var(1), core.Var(0))
    printed = print_term(t, names=("y", "p"))
    assert printed == "J (\\x q. Nat) zero y p"
    assert reparse("\\y p. " + printed) == core.Lambda(core.Lambda(t))


def test_hit_nodes_print_at_forms():
    former = core.HitType("Circle", ())
    ctor = core.HitCtor("Circle", "base", ())
    elim = core.HitElim("Circle", core.Var(0), (core.Zero(),), ctor)
    assert print_term(former) == "@Circle"
    assert print_term(ctor) == "@base"
    assert print_term(elim, names=("m",)) == "@Circle-elim m zero @base"


def test_reserved_names_are_avoided():
    t = core.Lambda(core.Var(0), hint="zero")
    printed = print_term(t)
    assert reparse(printed) == t


# ----- round-trip property --------------------------------------------------


@st.composite
def core_terms(draw, depth=0, fuel=3):
    leaves = [
        st.just(core.Universe(draw(st.integers(0, 2)))),
        st.just(core.Nat()),
        st.just(core.Zero()),
        st.just(core.Star()),
        st.just(core.Unit()),
        st.just(core.Empty()),
    ]
    if depth:
        leaves.append(st.just(core.Var(draw(st.integers(0, depth - 1)))))
    if not fuel:
        return draw(st.one_of(leaves))

    def sub(extra=0):
        return draw(core_terms(depth=depth + extra, fuel=fuel - 1))

    kind = draw(st.sampled_from([
        "leaf", "pi", "lambda", "app", "sigma", "pair", "fst", "snd",
        "id", "refl", "at-refl", "j", "succ", "nat-elim", "sum", "inl",
        "inr", "sum-elim", "empty-elim", "unit-elim",
    ]))
    if kind == "leaf":
        return draw(st.one_of(leaves))
    if kind == "pi":
        return core.Pi(sub(), sub(1), implicit=draw(st.booleans()))
    if kind == "lambda":
        return core.Lambda(sub(1))
    if kind == "app":
        return core.App(sub(), sub(), braced=draw(st.booleans()))
    if kind == "sigma":
        return core.Sigma(sub(), sub(1))
    if kind == "pair":
        return core.Pair(sub(), sub())
    if kind == "fst":
        return core.Fst(sub())
    if kind == "snd":
        return core.Snd(sub())
    if kind == "id":
        return core.Id(sub(), sub(), sub())
    if kind == "refl":
        return core.Refl(None, sub())
    if kind == "at-refl":
        return core.Refl(sub(), sub())
    if kind == "j":
        return core.J(sub(2), sub(), sub(), sub())
    if kind == "succ":
        return core.Succ(sub())
    if kind == "nat-elim":
        return core.NatElim(sub(), sub(), sub(), sub())
    if kind == "sum":
        return core.Sum(sub(), sub())
    if kind == "inl":
        return core.Inl(sub())
    if kind == "inr":
        return core.Inr(sub())
    if kind == "sum-elim":
        return core.SumElim(sub(), sub(), sub(), sub())
    if kind == "empty-elim":
        return core.EmptyElim(sub(), sub())
    return core.UnitElim(sub(), sub(), sub())


@settings(max_examples=300, deadline=None)
@given(core_terms())
def test_print_reparse_round_trip(t):
    assert core.is_well_scoped(t)
    roundtrips(t)


@settings(max_examples=100, deadline=None)
@given(core_terms(depth=3))
def test_round_trip_under_binders(t):
    wrapped = core.Lambda(core.Lambda(core.Lambda(t)))
    roundtrips(wrapped)
