import pytest
from hypothesis import given, settings, strategies as st

from nsacomp import formulas as fm
from nsacomp import principles
from nsacomp import semantics as sm
from nsacomp.sexp import SExpSyntaxError
from nsacomp.terms import NAT, Arrow

FUN1 = Arrow(NAT, NAT)


def test_parse_standard_quantifier_over_st():
    f = fm.parse_formula("(forall-st (f (-> Nat Nat)) (st f))")
    assert isinstance(f, fm.Quant) and f.kind == "forall-st" and f.type == FUN1
    assert isinstance(f.body, fm.St)


def test_parse_transfer_matches_stored_principle():
    f = fm.parse_formula("""
      (forall-st (g (-> Nat Nat))
        (=> (forall-st (i Nat) (!= (g i) 0)) (forall (j Nat) (!= (g j) 0))))""")
    assert fm.alpha_eq(f, principles.get("PI01-TRANS").schema)


def test_truncated_input_is_a_syntax_error():
    with pytest.raises(SExpSyntaxError):
        fm.parse_formula("(forall (x")


def test_is_internal():
    matrix = fm.parse_formula("(=> (exists (m Nat) (= (f m) 0)) (= (f n) 0))")
    assert fm.is_internal(matrix)
    assert not fm.is_internal(principles.get("PI01-TRANS").schema)
    assert fm.is_internal(fm.parse_formula("(= 0 0)"))


def test_relativize_st():
    f = fm.parse_formula("(forall (m Nat) (!= (f m) 0))")
    assert fm.relativize_st(f) == fm.parse_formula("(forall-st (m Nat) (!= (f m) 0))")
    bounded = fm.parse_formula("(forall (n Nat) (=> (<= n k) (!= (f n) 0)))")
    assert fm.relativize_st(bounded) == bounded
    atom = fm.parse_formula("(= (f 0) 1)")
    assert fm.relativize_st(atom) == atom
    with pytest.raises(fm.NotInternal):
        fm.relativize_st(principles.get("PI01-TRANS").schema)


def test_is_normal_form():
    nf = fm.parse_formula("""
      (forall-st (f (-> Nat Nat))
        (exists-st (n Nat) (=> (exists (m Nat) (= (f m) 0)) (= (f n) 0))))""")
    assert fm.is_normal_form(nf)
    assert not fm.is_normal_form(principles.get("MCT-NS").schema)
    assert fm.is_normal_form(fm.parse_formula("(= 1 1)"))
    assert not fm.is_normal_form(fm.parse_formula("(exists-st (n Nat) (forall-st (m Nat) (<= m n)))"))


def test_in_omega_and_approx_macros():
    f = fm.parse_formula("(in-omega N)")
    assert f == fm.Not(fm.St(fm.terms.Var("N")))
    g = fm.expand_macros(fm.parse_formula("(approx a b)"))
    assert isinstance(g, fm.Quant) and g.kind == "forall-st"
    assert g.body.rel == "close"


def test_alpha_equivalence_ignores_bound_names():
    a = fm.parse_formula("(forall (x Nat) (exists (y Nat) (<= x y)))")
    b = fm.parse_formula("(forall (u Nat) (exists (v Nat) (<= u v)))")
    c = fm.parse_formula("(forall (u Nat) (exists (v Nat) (<= v u)))")
    assert fm.alpha_eq(a, b)
    assert not fm.alpha_eq(a, c)


def test_format_round_trip_on_principles():
    for p in principles.PRINCIPLES.values():
        assert fm.parse_formula(fm.format_formula(p.schema)) == p.schema


def test_principle_sources_parse_to_schemas():
    for name, src in principles.SOURCES.items():
        assert fm.parse_formula(src) == principles.get(name).schema


def test_instantiate_slots():
    mct_ef = principles.get("MCT-EF")
    assert mct_ef.term_slots == ["?t"]
    inst = mct_ef.instantiate(**{"?t": fm.terms.Var("Psi")})
    assert "?t" not in fm.free_vars(inst)
    idealisation = principles.get("I")
    assert idealisation.formula_slots == ["?phi"]
    body = fm.parse_formula("(<= x y)")
    inst = idealisation.instantiate(**{"?phi": (("x", "y"), body)})
    assert not any(isinstance(g, fm.Atom) and g.rel.startswith("?") for _, g in fm.walk(inst))


# -- random internal formulas: relativization properties --------------------

names = st.sampled_from(["x", "y", "z"])


@st.composite
def internal(draw, depth=3):
    if depth == 0 or draw(st.booleans()):
        a, b = draw(names), draw(names)
        rel = draw(st.sampled_from(["=", "<=", "<", "!="]))
        return fm.parse_formula(f"({rel} {a} {b})")
    kind = draw(st.sampled_from(["and", "or", "=>", "not", "forall", "exists", "bounded"]))
    if kind == "not":
        return fm.Not(draw(internal(depth - 1)))
    if kind in ("forall", "exists"):
        return fm.Quant(kind, draw(names), NAT, draw(internal(depth - 1)))
    if kind == "bounded":
        v = draw(names)
        return fm.Quant("forall", v, NAT, fm.Implies(
            fm.parse_formula(f"(<= {v} w)"), draw(internal(depth - 1))))
    left, right = draw(internal(depth - 1)), draw(internal(depth - 1))
    return {"and": fm.And, "or": fm.Or, "=>": fm.Implies}[kind](left, right)


@settings(max_examples=60, deadline=None)
@given(internal())
def test_relativize_erase_and_truth(f):
    r = fm.relativize_st(f)
    assert fm.erase_st(r) == f
    assert fm.relativize_st(fm.erase_st(r)) == r
    free = {v: NAT for v in fm.free_vars(f)}
    _, bad = sm.check_equivalence(f, r, free, max_domain=3)
    assert bad is None


def test_relativized_forall_exists_is_normal():
    f = fm.parse_formula("(forall (x Nat) (exists (y Nat) (<= x y)))")
    assert fm.is_normal_form(fm.relativize_st(f))
