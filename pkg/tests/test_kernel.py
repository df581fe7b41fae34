"""Checker oracle tests: declaration checking, definitional equality,
universe discipline, implicit argument solving, and higher inductive types.

Definitional equality is pinned through `conv` on checked values, so these
tests exercise evaluation, readback, and conversion together.
"""
import pytest

from hottcheck.diagnostics import CheckError, ErrorCode
from hottcheck.kernel import (
    Context,
    Env,
    check,
    check_declaration,
    check_is_type,
    conv,
    eval_term,
    infer,
    quote,
    quote_type,
)
from hottcheck.printer import print_term
from hottcheck.resolver import resolve, resolve_term
from hottcheck.surface import parse_module, parse_term

MINI_PRELUDE = """
def transport [i j] : {A : Type i} -> (P : A -> Type j) -> {x : A} -> {y : A}
    -> Id A x y -> P x -> P y
  := \\A P x y p u. J (\\w r. P x -> P w) (\\v. v) y p u

def apd [i j] : {A : Type i} -> {P : A -> Type j} -> (f : (x : A) -> P x)
    -> {x : A} -> {y : A} -> (p : Id A x y)
    -> Id (P y) (transport [i j] P p (f x)) (f y)
  := \\A P f x y p.
       J (\\w r. Id (P w) (transport [i j] P r (f x)) (f w)) (refl (f x)) y p
"""


def build(source, env=None):
    env = env if env is not None else Env()
    for rdecl in resolve(parse_module(source), env.lookup_info):
        check_declaration(env, rdecl)
    return env


def build_fails(source, code, env=None):
    env = env if env is not None else Env()
    with pytest.raises(CheckError) as err:
        build(source, env)
    assert err.value.diagnostic.code is code, err.value.diagnostic.human()
    return err.value.diagnostic


def values_at(env, type_src, *term_srcs):
    ctx = Context(env)
    ty_t = resolve_term(parse_term(type_src), env.lookup_info)
    _, ty_el = check_is_type(ctx, ty_t)
    ty_v = eval_term(env, ty_el, ())
    vals = []
    for src in term_srcs:
        t = resolve_term(parse_term(src), env.lookup_info)
        vals.append(eval_term(env, check(ctx, t, ty_v), ()))
    return ty_v, vals


def assert_defeq(env, type_src, a, b):
    ty_v, (va, vb) = values_at(env, type_src, a, b)
    assert conv(env, 0, va, vb, ty_v), f"{a} /= {b} at {type_src}"


def assert_not_defeq(env, type_src, a, b):
    ty_v, (va, vb) = values_at(env, type_src, a, b)
    assert not conv(env, 0, va, vb, ty_v), f"{a} == {b} at {type_src}"


def normal_form(env, type_src, src):
    ty_v, (v,) = values_at(env, type_src, src)
    return print_term(quote(env, 0, v, ty_v))


def infer_type(env, src):
    t = resolve_term(parse_term(src), env.lookup_info)
    ty, _ = infer(Context(env), t)
    return print_term(quote_type(env, 0, ty))


# ----- plain declarations ---------------------------------------------------


def test_annotated_definition_checks():
    env = build("def idfun : (A : Type 0) -> A -> A := \\A a. a")
    assert "idfun" in env


def test_unannotated_definition_infers():
    env = build("def two := succ (succ zero)")
    assert infer_type(env, "two") == "Nat"


def test_axiom_checks_its_type():
    env = build("axiom oracle : Nat")
    assert infer_type(env, "oracle") == "Nat"


def test_axiom_type_must_be_a_type():
    build_fails("axiom bad : zero", ErrorCode.TYPE)


def test_body_type_mismatch():
    build_fails("def bad : Nat := star", ErrorCode.TYPE)


def test_duplicate_declaration():
    build_fails("def a := zero\ndef a := zero", ErrorCode.SCOPE)


def test_bare_lambda_needs_annotation():
    build_fails("def bad := \\x. x", ErrorCode.TYPE)


def test_bare_pair_needs_annotation():
    build_fails("def bad := (zero, zero)", ErrorCode.TYPE)
    env = build("def ok := ((zero, zero) : Nat * Nat)")
    assert infer_type(env, "ok") == "Nat * Nat"


def test_bare_injection_needs_annotation():
    build_fails("def bad := inl zero", ErrorCode.TYPE)
    env = build("def ok := (inl zero : Sum Nat Unit)")
    assert infer_type(env, "ok") == "Sum Nat Unit"


# ----- universes ------------------------------------------------------------


def test_universe_in_next_universe():
    build("def u : Type 1 := Type 0")


def test_type_in_type_is_rejected():
    build_fails("def u : Type 0 := Type 0", ErrorCode.UNIV)


def test_no_cumulativity():
    build_fails("def u : Type 2 := Type 0", ErrorCode.UNIV)
    build_fails("def f : Type 1 -> Type 1 := \\A. A\n"
                "def bad := f Nat", ErrorCode.UNIV)


def test_pi_lands_in_max_level():
    build("def t : Type 1 := Nat -> Type 0\n"
          "def s : Type 1 := Type 0 -> Nat\n"
          "def small : Type 0 := Nat -> Nat")
    build_fails("def t : Type 0 := Nat -> Type 0", ErrorCode.UNIV)


def test_level_polymorphic_definition():
    env = build("def idf [i] : (A : Type i) -> A -> A := \\A a. a\n"
                "def at-zero := idf Nat zero\n"
                "def at-one := idf [1] (Type 0) Nat")
    assert_defeq(env, "Nat", "at-zero", "zero")
    assert_defeq(env, "Type 0", "at-one", "Nat")


def test_level_instance_mismatch():
    build_fails("def idf [i] : (A : Type i) -> A -> A := \\A a. a\n"
                "def bad := idf (Type 0) Nat", ErrorCode.UNIV)


def test_wrong_level_count():
    build_fails("def idf [i] : (A : Type i) -> A -> A := \\A a. a\n"
                "def bad := idf [0 1] Nat zero", ErrorCode.SCOPE)


# ----- definitional equality ------------------------------------------------


def test_beta():
    env = build("def f : Nat -> Nat := \\x. x")
    assert_defeq(env, "Nat", "f zero", "zero")


def test_delta():
    env = build("def one := succ zero")
    assert_defeq(env, "Nat", "one", "succ zero")


def test_eta_for_functions():
    env = build("axiom f : Nat -> Nat")
    assert_defeq(env, "Nat -> Nat", "\\x. f x", "f")


def test_eta_for_pairs():
    env = build("axiom p : Nat * Nat")
    assert_defeq(env, "Nat * Nat", "(fst p, snd p)", "p")


def test_no_eta_for_unit():
    env = build("axiom u : Unit")
    assert_not_defeq(env, "Unit", "u", "star")


def test_projections_compute():
    env = build("def p := ((zero, succ zero) : Nat * Nat)")
    assert_defeq(env, "Nat", "fst p", "zero")
    assert_defeq(env, "Nat", "snd p", "succ zero")


def test_path_induction_computes_on_refl():
    env = build("axiom A : Type 0\naxiom a : A")
    assert_defeq(env, "Nat", "J (\\y p. Nat) zero a (refl a)", "zero")


def test_neutral_path_does_not_compute():
    env = build("axiom A : Type 0\naxiom a : A\naxiom p : Id A a a")
    assert_not_defeq(env, "Id A a a", "p", "refl a")


def test_nat_elim_computes():
    env = build(
        "def add : Nat -> Nat -> Nat\n"
        "  := \\m n. nat-elim (\\_. Nat) n (\\k ih. succ ih) m\n"
        "def two := succ (succ zero)")
    assert normal_form(env, "Nat", "add two two") == \
        "succ (succ (succ (succ zero)))"


def test_sum_elim_computes():
    env = build("def pick : Sum Nat Unit -> Nat\n"
                "  := \\s. sum-elim (\\_. Nat) (\\n. succ n) (\\u. zero) s")
    assert_defeq(env, "Nat", "pick ((inl zero : Sum Nat Unit))", "succ zero")
    assert_defeq(env, "Nat", "pick ((inr star : Sum Nat Unit))", "zero")


def test_unit_elim_computes():
    env = build("")
    assert_defeq(env, "Nat", "unit-elim (\\_. Nat) zero star", "zero")


def test_refl_requires_matching_endpoints():
    build("def r : Id Nat zero zero := refl zero")
    build_fails("def r : Id Nat zero (succ zero) := refl zero", ErrorCode.TYPE)


def test_refl_checks_its_point_against_the_identity_type():
    # Pairs and injections cannot be inferred, but under a known identity
    # type the expected type reaches the point, so no ascription is needed.
    build("def r : Id (Nat * Nat) (zero, zero) (zero, zero)"
          " := refl (zero, zero)")
    build("def r : Id (Sum Nat Unit) (inl zero) (inl zero)"
          " := refl (inl zero)")
    build_fails("def r : Id (Sum Nat Unit) (inl zero) (inr star)"
                " := refl (inl zero)", ErrorCode.TYPE)


def test_dependent_pair_checks_against_first_component():
    build("def d : (n : Nat) * Id Nat n zero := (zero, refl zero)")
    build_fails("def d : (n : Nat) * Id Nat n zero := (succ zero, refl zero)",
                ErrorCode.TYPE)


def test_normalization_is_idempotent():
    env = build(MINI_PRELUDE)
    ctx = Context(env)
    for src in ("transport", "apd", "J (\\y p. Nat) zero zero (refl zero)"):
        t = resolve_term(parse_term(src), env.lookup_info)
        ty, elab = infer(ctx, t)
        once = quote(env, 0, eval_term(env, elab, ()), ty)
        twice = quote(env, 0, eval_term(env, once, ()), ty)
        assert once == twice


# ----- implicit arguments ---------------------------------------------------


CONCAT = """
def concat [i] : {A : Type i} -> {x : A} -> {y : A} -> Id A x y
    -> {z : A} -> Id A y z -> Id A x z
  := \\A x y p z q. J (\\w r. Id A x w) p z q
"""


def test_implicit_solving_from_argument_types():
    env = build(MINI_PRELUDE + CONCAT)
    assert_defeq(env, "Id Nat zero zero",
                 "concat (refl zero) (refl zero)", "refl zero")


def test_transport_computes_on_refl():
    env = build(MINI_PRELUDE + "axiom P : Nat -> Type 0\naxiom u : P zero")
    assert_defeq(env, "P zero", "transport P (refl zero) u", "u")


def test_braced_arguments_fill_directly():
    env = build(MINI_PRELUDE + "axiom P : Nat -> Type 0\naxiom u : P zero")
    assert_defeq(env, "P zero",
                 "transport {Nat} P {zero} {zero} (refl zero) u", "u")


def test_braced_holes_defer_to_solving():
    env = build("def id2 : {A : Type 0} -> A -> A := \\A a. a")
    assert_defeq(env, "Nat", "id2 {_} zero", "zero")
    assert_defeq(env, "Nat", "id2 {Nat} zero", "zero")
    assert_defeq(env, "Nat", "id2 zero", "zero")


def test_positional_form_skips_solving():
    env = build("def id2 : {A : Type 0} -> A -> A := \\A a. a")
    assert_defeq(env, "Nat", "@id2 Nat zero", "zero")


def test_braced_argument_at_explicit_position():
    build_fails("def idfun : (A : Type 0) -> A -> A := \\A a. a\n"
                "def bad := idfun {Nat} zero", ErrorCode.TYPE)


def test_unsolvable_implicit_reports_type_error():
    diag = build_fails("axiom g : {A : Type 0} -> Nat -> Nat\n"
                       "def bad := g zero", ErrorCode.TYPE)
    assert "@" in diag.message


def test_lambda_argument_cannot_drive_solving():
    diag = build_fails("axiom g : {A : Type 0} -> (A -> A) -> Nat\n"
                       "def bad := g (\\x. x)", ErrorCode.TYPE)
    assert "name it in a definition" in diag.message


def test_no_explicit_argument_after_implicits():
    diag = build_fails("axiom g : {A : Type 0} -> Nat\n"
                       "def bad := g zero", ErrorCode.TYPE)
    assert diag.code is ErrorCode.TYPE


# ----- higher inductive types -----------------------------------------------


CIRCLE = """
hit Circle where
| point pt : Circle
| path rot : pt = pt in Circle
"""


def test_circle_declares_former_and_constructors():
    env = build(MINI_PRELUDE + CIRCLE)
    assert infer_type(env, "Circle") == "Type 0"
    assert infer_type(env, "pt") == "@Circle"
    assert infer_type(env, "rot") == "@pt = @pt in @Circle"
    assert "Circle-elim" in env
    assert "Circle-elim-rot" in env


def test_circle_eliminator_point_rule():
    env = build(MINI_PRELUDE + CIRCLE + """
axiom P : Circle -> Type 0
axiom b : P pt
axiom l : Id (P pt) (transport P rot b) b
""")
    assert_defeq(env, "P pt", "Circle-elim P b l pt", "b")


def test_circle_path_axiom_is_usable():
    env = build(MINI_PRELUDE + CIRCLE + """
axiom P : Circle -> Type 0
axiom b : P pt
axiom l : Id (P pt) (transport P rot b) b
def both := Circle-elim-rot P b l
""")
    assert "both" in env


def test_path_constructor_is_not_refl():
    env = build(MINI_PRELUDE + CIRCLE)
    assert_not_defeq(env, "Id Circle pt pt", "rot", "refl pt")


def test_parameterized_hit():
    env = build(MINI_PRELUDE + """
hit Wrap (A : Type 0) where
| point wrap : A -> Wrap

def unwrap : (A : Type 0) -> Wrap A -> A := \\A. Wrap-elim A (\\_. A) (\\a. a)
""")
    assert_defeq(env, "Nat", "unwrap Nat (wrap Nat zero)", "zero")


def test_saturated_eliminator_form():
    env = build(MINI_PRELUDE + """
hit Wrap (A : Type 0) where
| point wrap : A -> Wrap
""")
    assert_defeq(env, "Nat",
                 "@Wrap-elim (\\_. Nat) (\\a. succ a) (wrap Nat zero)",
                 "succ zero")


def test_recursive_points():
    env = build(MINI_PRELUDE + """
hit Tree where
| point leaf : Tree
| point node : Tree -> Tree -> Tree

def add : Nat -> Nat -> Nat
  := \\m n. nat-elim (\\_. Nat) n (\\k ih. succ ih) m

def size : Tree -> Nat
  := Tree-elim (\\_. Nat) zero (\\l lih r rih. succ (add lih rih))
""")
    assert normal_form(env, "Nat", "size (node leaf (node leaf leaf))") == \
        "succ (succ zero)"


def test_recursive_function_field():
    env = build(MINI_PRELUDE + """
hit Hub where
| point base : Hub
| point spoke : (Nat -> Hub) -> Hub

def probe : Hub -> Nat
  := Hub-elim (\\_. Nat) zero (\\f fih. succ (fih zero))
""")
    assert_defeq(env, "Nat", "probe (spoke (\\n. spoke (\\m. base)))",
                 "succ (succ zero)")


def test_path_over_constructor_fields():
    env = build(MINI_PRELUDE + """
hit Blob where
| point mk : Nat -> Blob
| path smooth : (n : Nat) -> (mk n = mk zero in Blob)
""")
    assert infer_type(env, "mk") == "Nat -> @Blob"
    assert "Blob-elim-smooth" in env


# ----- rejected higher inductive schemas ------------------------------------


def test_negative_occurrence_is_rejected():
    build_fails(MINI_PRELUDE + """
hit Neg where
| point mk : (Neg -> Nat) -> Neg
""", ErrorCode.HIT_SCHEMA)


def test_nested_occurrence_is_rejected():
    build_fails(MINI_PRELUDE + """
hit Neg where
| point mk : ((Nat -> Neg) -> Neg) -> Neg
""", ErrorCode.HIT_SCHEMA)


def test_two_dimensional_path_is_rejected():
    diag = build_fails(MINI_PRELUDE + """
hit TwoD where
| point b : TwoD
| path q : refl b = refl b in (b = b in TwoD)
""", ErrorCode.HIT_SCHEMA)
    assert "two-dimensional" in diag.message


def test_points_after_paths_are_rejected():
    build_fails(MINI_PRELUDE + """
hit Late where
| point b : Late
| path l : b = b in Late
| point c : Late
""", ErrorCode.HIT_SCHEMA)


def test_large_constructor_field_is_rejected():
    build_fails(MINI_PRELUDE + """
hit Big where
| point mk : Type 0 -> Big
""", ErrorCode.HIT_SCHEMA)


def test_implicit_constructor_argument_is_rejected():
    build_fails(MINI_PRELUDE + """
hit Imp where
| point mk : {n : Nat} -> Imp
""", ErrorCode.HIT_SCHEMA)


def test_point_target_must_be_the_hit():
    build_fails(MINI_PRELUDE + """
hit W where
| point mk : Nat
""", ErrorCode.HIT_SCHEMA)


def test_path_target_must_be_an_identity():
    build_fails(MINI_PRELUDE + """
hit P2 where
| point b : P2
| path p : P2
""", ErrorCode.HIT_SCHEMA)


def test_path_must_relate_hit_elements():
    build_fails(MINI_PRELUDE + """
hit P3 where
| point b : P3
| path p : zero = zero in Nat
""", ErrorCode.HIT_SCHEMA)


def test_unprojectable_boundary_is_rejected():
    build_fails(MINI_PRELUDE + """
hit BadB where
| point mk : BadB
| path q : (((\\x. x) : BadB -> BadB) mk = mk in BadB)
""", ErrorCode.HIT_SCHEMA)


def test_hub_and_spoke_path_constructor():
    env = build(MINI_PRELUDE + """
hit Squash where
| point put : Nat -> Squash
| point hub : (Nat -> Squash) -> Squash
| path spoke : (r : Nat -> Squash) -> (n : Nat) -> (r n = hub r in Squash)

def star-eta : (u : Unit) -> (u = star in Unit)
  := \\u. unit-elim (\\w. (w = star in Unit)) (refl star) u

def collapse : Squash -> Unit
  := Squash-elim (\\_. Unit) (\\n. star) (\\r rih. star)
       (\\r rih n. star-eta (transport {Squash} (\\_. Unit) (spoke r n) (rih n)))
""")
    assert "Squash-elim-spoke" in env.declarations
    # The spoke method receives the induction hypothesis for r as a function,
    # and the eliminator computes through the hub point constructor.
    assert_defeq(env, "Unit", "collapse (hub (\\n. put n))", "star")


def test_paths_need_transport_and_apd_in_scope():
    build_fails(CIRCLE, ErrorCode.HIT_SCHEMA)


def test_failed_hit_rolls_back_cleanly():
    env = build(MINI_PRELUDE)
    with pytest.raises(CheckError):
        build("hit R where\n"
              "| point ok : R\n"
              "| point bad : (R -> Nat) -> R", env)
    assert "R" not in env
    assert env.lookup_info("ok") is None
    env2 = build("hit R where\n| point ok : R", env)
    assert "R-elim" in env2
