"""Parser and resolver oracle tests.

The grammar facts pinned here: application binds tightest, then `*`, then
right-associative `->`, then the identity sugar `a = b in T`; binders are
`(x : A) ->`, `{x : A} ->`, `(x : A) *`; `(t : T)` elsewhere ascribes.
"""
import pytest

from hottcheck import syntax as core
from hottcheck.diagnostics import CheckError, ErrorCode
from hottcheck.resolver import GlobalInfo, resolve, resolve_term
from hottcheck.surface import parse_module, parse_term


def code_of(err):
    return err.value.diagnostic.code


def rt(source, lookup=None, univars=()):
    return resolve_term(parse_term(source), lookup or (lambda name: None),
                        univars)


# ----- grammar shapes -------------------------------------------------------


def test_lambda_identity():
    assert rt("\\x. x") == core.Lambda(core.Var(0))


def test_lambda_multiple_binders():
    assert rt("\\x y. x") == core.Lambda(core.Lambda(core.Var(1)))


def test_dependent_function_type():
    t = rt("(A : Type 0) -> A -> A")
    assert t == core.Pi(core.Universe(0), core.Pi(core.Var(0), core.Var(1)))


def test_arrow_is_right_associative():
    a, b, c = core.Universe(0), core.Universe(1), core.Universe(2)
    assert rt("Type 0 -> Type 1 -> Type 2") == core.Pi(a, core.Pi(b, c))


def test_product_binds_tighter_than_arrow():
    t = rt("Nat * Nat -> Nat")
    assert t == core.Pi(core.Sigma(core.Nat(), core.Nat()), core.Nat())


def test_application_binds_tighter_than_product():
    t = rt("\\f. f Nat * Nat")
    assert t == core.Lambda(
        core.Sigma(core.App(core.Var(0), core.Nat()), core.Nat()))


def test_identity_sugar_spans_arrows():
    t = rt("\\f g. f = g in Nat -> Nat")
    inner = core.Id(core.Pi(core.Nat(), core.Nat()), core.Var(1), core.Var(0))
    assert t == core.Lambda(core.Lambda(inner))


def test_implicit_binder():
    t = rt("{A : Type 0} -> A")
    assert t == core.Pi(core.Universe(0), core.Var(0))
    assert t.implicit


def test_dependent_pair_type():
    t = rt("(x : Nat) * (x = zero in Nat)")
    assert t == core.Sigma(core.Nat(),
                           core.Id(core.Nat(), core.Var(0), core.Zero()))


def test_pair_literals_nest_right():
    t = rt("(zero, star, zero)")
    assert t == core.Pair(core.Zero(), core.Pair(core.Star(), core.Zero()))


def test_ascription():
    t = rt("(\\x. x : Nat -> Nat)")
    assert t == core.Ascribe(core.Lambda(core.Var(0)),
                             core.Pi(core.Nat(), core.Nat()))


def test_unused_binder_underscore():
    assert rt("\\_. zero") == core.Lambda(core.Zero())
    assert rt("(_ : Nat) -> Nat") == core.Pi(core.Nat(), core.Nat())


def test_braced_argument():
    t = rt("\\f x. f {Nat} x")
    app = core.App(core.App(core.Var(1), core.Nat(), braced=True), core.Var(0))
    assert t == core.Lambda(core.Lambda(app))
    assert t.body.body.fn.braced


def test_braced_hole_argument():
    t = rt("\\f x. f {_} x")
    assert isinstance(t.body.body.fn.arg, core.Hole)


def test_builtin_saturation():
    t = rt("\\p. J (\\y. \\q. Nat) zero zero p")
    assert t == core.Lambda(
        core.J(core.Nat(), core.Zero(), core.Zero(), core.Var(0)))


def test_builtin_extra_arguments_are_applied():
    t = rt("\\f. nat-elim f zero f zero zero")
    elim = t.body
    assert isinstance(elim, core.App)
    assert isinstance(elim.fn, core.NatElim)


def test_refl_and_at_refl():
    assert rt("refl zero") == core.Refl(None, core.Zero())
    assert rt("@refl Nat zero") == core.Refl(core.Nat(), core.Zero())


def test_type_levels():
    assert rt("Type 2") == core.Universe(2)
    assert rt("Type i", univars=("i",)) == core.Universe(core.LVar(0))


def test_constant_levels():
    lookup = {"ap": GlobalInfo("ap", univars=2)}.get
    assert rt("ap", lookup) == core.Const("ap", (0, 0))
    assert rt("ap [1 0]", lookup) == core.Const("ap", (1, 0))
    t = rt("ap [i i]", lookup, univars=("i",))
    assert t == core.Const("ap", (core.LVar(0), core.LVar(0)))


def test_at_head_is_positional():
    lookup = {"f": GlobalInfo("f")}.get
    t = rt("@f zero", lookup)
    assert t == core.App(core.Const("f", ()), core.Zero())
    assert t.fn.positional


# ----- rejected forms -------------------------------------------------------


def test_unclosed_paren_fails():
    with pytest.raises(CheckError) as err:
        parse_module("def p := (a,")
    assert code_of(err) is ErrorCode.PARSE


def test_bare_number_is_not_a_term():
    with pytest.raises(CheckError) as err:
        parse_term("succ 3")
    assert code_of(err) is ErrorCode.PARSE


def test_unknown_identifier():
    with pytest.raises(CheckError) as err:
        rt("mystery")
    assert code_of(err) is ErrorCode.SCOPE


def test_bare_hole_is_rejected():
    with pytest.raises(CheckError) as err:
        rt("\\f. f _")
    assert code_of(err) is ErrorCode.SCOPE


def test_levels_on_local_are_rejected():
    with pytest.raises(CheckError) as err:
        rt("\\x. x [0]")
    assert code_of(err) is ErrorCode.SCOPE


def test_builtin_underapplication():
    with pytest.raises(CheckError) as err:
        rt("\\p. J p")
    assert code_of(err) is ErrorCode.SCOPE


def test_j_motive_must_be_a_lambda():
    with pytest.raises(CheckError) as err:
        rt("\\m p. J m zero zero p")
    assert code_of(err) is ErrorCode.SCOPE


def test_at_builtin_is_rejected():
    with pytest.raises(CheckError) as err:
        rt("@succ zero")
    assert code_of(err) is ErrorCode.SCOPE


def test_unknown_universe_variable():
    with pytest.raises(CheckError) as err:
        rt("Type j", univars=("i",))
    assert code_of(err) is ErrorCode.SCOPE


# ----- declarations ---------------------------------------------------------


def test_module_and_definition_forms():
    module = parse_module("""
        def idfun : (A : Type 0) -> A -> A := \\A. \\a. a
        def two := succ (succ zero)
        axiom funny [i] : Type i
    """)
    decls = resolve(module, lambda name: None)
    assert [d.name for d in decls] == ["idfun", "two", "funny"]
    assert decls[0].annotation is not None
    assert decls[1].annotation is None
    assert decls[2].univars == ("i",)


def test_later_declarations_see_earlier_ones():
    module = parse_module("""
        def one := succ zero
        def two := succ one
    """)
    decls = resolve(module, lambda name: None)
    assert decls[1].body == core.Succ(core.Const("one", ()))


def test_duplicate_universe_variables():
    with pytest.raises(CheckError) as err:
        resolve(parse_module("def f [i i] := Type i"), lambda name: None)
    assert code_of(err) is ErrorCode.SCOPE


def test_hit_declaration_resolves_self_references():
    module = parse_module("""
        hit Circle where
        | point pt : Circle
        | path rotate : pt = pt in Circle
    """)
    decls = resolve(module, lambda name: None)
    hit_decl = decls[0]
    assert hit_decl.ctors[0].type == core.HitType("Circle", ())
    assert hit_decl.ctors[1].type == core.Id(
        core.HitType("Circle", ()),
        core.HitCtor("Circle", "pt", ()),
        core.HitCtor("Circle", "pt", ()))


def test_hit_with_parameters_applies_them():
    module = parse_module("""
        hit Wrap (A : Type 0) where
        | point wrap : A -> Wrap
    """)
    decls = resolve(module, lambda name: None)
    ctor = decls[0].ctors[0]
    assert ctor.type == core.Pi(core.Var(0),
                                core.HitType("Wrap", (core.Var(1),)))


def test_hit_universe_variables_are_rejected():
    with pytest.raises(CheckError) as err:
        resolve(parse_module("hit Bad [i] where"), lambda name: None)
    assert code_of(err) is ErrorCode.HIT_SCHEMA


def test_hit_declares_eliminator_name():
    module = parse_module("""
        hit Circle where
        | point pt : Circle
        def use := Circle-elim
    """)
    decls = resolve(module, lambda name: None)
    body = decls[1].body
    assert body == core.Const("Circle-elim", (0,))
