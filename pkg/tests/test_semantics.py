import pytest

from nsacomp import formulas as fm
from nsacomp import semantics as sm
from nsacomp.terms import NAT, Arrow, Seq

P = fm.parse_formula
FUN1 = Arrow(NAT, NAT)


def test_value_counts():
    assert len(sm.values(NAT, 3)) == 3
    assert len(sm.values(Seq(NAT), 2)) == 1 + 2 + 4
    assert len(sm.values(FUN1, 3)) == 27
    assert len(sm.values(Arrow(FUN1, NAT), 2)) == 2 ** 4


def test_budget():
    assert not sm.fits(Arrow(FUN1, NAT), 3)
    with pytest.raises(sm.TooLarge):
        sm.values(Arrow(FUN1, NAT), 3)


def test_saturating_successor():
    interp = sm.Interpretation(3)
    assert interp.holds(P("(= (succ (succ (succ 0))) 2)"))


def test_st_is_true_everywhere():
    assert sm.Interpretation(2).holds(P("(forall (x Nat) (st x))"))


def test_quantifier_order_is_distinguished():
    a = P("(forall (N Nat) (exists-st (n Nat) (= n N)))")
    b = P("(exists-st (n Nat) (forall (N Nat) (= n N)))")
    sizes, bad = sm.check_equivalence(a, b, {}, max_domain=3)
    assert bad is not None and bad[0] == 2


def test_bounded_search_formula():
    f = P("(exists (i Nat) (and (<= i n) (= (f i) 0)))")
    interp = sm.Interpretation(3)
    zero_at_2 = sm.values(FUN1, 3)[[v.table for v in sm.values(FUN1, 3)].index((1, 1, 0))]
    assert interp.holds(f, {"n": 2, "f": zero_at_2})
    assert not interp.holds(f, {"n": 1, "f": zero_at_2})


def test_sequence_membership():
    f = P("(exists-in (x s) (= x 1))")
    interp = sm.Interpretation(3)
    assert interp.holds(f, {"s": (0, 1)})
    assert not interp.holds(f, {"s": (0, 2)})
    assert not interp.holds(f, {"s": ()})


def test_environment_restored_after_quantifier():
    interp = sm.Interpretation(2)
    env = {"x": 1}
    assert interp.holds(P("(and (forall (x Nat) (<= x 1)) (= x 1))"), env)
    assert env == {"x": 1}


def test_unknown_relation():
    with pytest.raises(fm.FormulaError):
        sm.Interpretation(2).holds(fm.Atom("?phi", ()))
