import pytest
from hypothesis import given, strategies as st

from nsacomp import terms
from nsacomp.terms import NAT, Arrow, Seq, evaluate, parse_term, seq_max, type_check


def test_identity_has_arrow_type():
    assert type_check(parse_term("(lam (x Nat) x)")) == Arrow(NAT, NAT)


def test_singleton_sequence_type():
    assert type_check(parse_term("(seq 5)")) == Seq(NAT)


def test_applying_a_number_is_a_type_error():
    with pytest.raises(terms.TypeMismatch):
        type_check(terms.App(terms.NatLit(3), terms.NatLit(4)))


def test_builtin_evaluation():
    assert evaluate(parse_term("(concat (seq 1 2) (seq 3))")) == (1, 2, 3)
    assert evaluate(parse_term("(restrict (seq 7 8 9) 1)")) == (7, 8)
    assert evaluate(parse_term("(len (nil Nat))")) == 0


@pytest.mark.parametrize("s, want", [((3, 1, 2), 3), ((), 0), ((5,), 5)])
def test_seq_max(s, want):
    assert seq_max(s) == want


def test_application_and_arguments():
    add2 = parse_term("(lam (x Nat) (succ (succ x)))")
    assert evaluate(add2, [5]) == 7
    assert evaluate(parse_term("(lam (s (Seq Nat)) (max s))"), [(4, 9, 2)]) == 9


def test_recursor():
    # rec base step n = step(n-1)(... step(0)(base))
    plus = parse_term("(lam (a Nat) (b Nat) ((rec Nat) a (lam (i Nat) (acc Nat) (succ acc)) b))")
    assert evaluate(plus, [3, 4]) == 7


def test_unbound_variable():
    with pytest.raises(terms.UnboundVariable):
        evaluate(parse_term("y"))


seqs = st.lists(st.integers(min_value=0, max_value=20), max_size=8).map(tuple)


@given(seqs, seqs, seqs)
def test_concat_laws(s, t, u):
    assert len(s + t) == len(s) + len(t)
    lit = lambda xs: terms.SeqLit(tuple(terms.NatLit(x) for x in xs), NAT)
    cat = lambda a, b: terms.Builtin("concat", (a, b))
    assert evaluate(cat(lit(s), lit(()))) == s
    assert evaluate(cat(cat(lit(s), lit(t)), lit(u))) == evaluate(cat(lit(s), cat(lit(t), lit(u))))


@given(seqs.filter(bool), st.data())
def test_restrict_is_inclusive(s, data):
    n = data.draw(st.integers(min_value=0, max_value=len(s) - 1))
    r = terms.restrict(s, n)
    assert len(r) == n + 1
    assert all(terms.index(r, i) == terms.index(s, i) for i in range(n + 1))


@given(seqs)
def test_seq_max_properties(s):
    m = seq_max(s)
    assert all(x <= m for x in s)
    assert m in s or not s


def test_evaluation_is_deterministic():
    t = parse_term("(lam (s (Seq Nat)) (concat s (seq 1)))")
    assert evaluate(t, [(2, 3)]) == evaluate(t, [(2, 3)])


def test_format_round_trip():
    src = "(lam (f (-> Nat Nat)) (x Nat) (f (succ x)))"
    t = parse_term(src)
    assert parse_term(terms.format_term(t)) == t
