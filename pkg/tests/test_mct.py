from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from nsacomp import machines as mc
from nsacomp import mct
from nsacomp.pairing import unpair

F = Fraction
F110 = mct.f_from_list([1, 1, 0])
BRUTE = mct.brute_modulus_functional(64)
MU = mct.brute_mu(4096)


def geometric(n):
    return 1 - F(1, 2 ** n)


def test_partial_sum():
    assert mct.partial_sum(0) == 0
    assert mct.partial_sum(3) == F(7, 8)
    assert mct.partial_sum(3, start=0) == F(15, 8)


def test_t_of_f_examples():
    assert all(mct.t_of_f(lambda i: 1)(k) == 0 for k in range(20))
    c = mct.t_of_f(F110)
    assert [c(k) for k in range(4)] == [0, 0, F(3, 4), F(7, 8)]
    c0 = mct.t_of_f(mct.f_from_list([0]))
    assert (c0(0), c0(1)) == (0, F(1, 2))


def test_brute_modulus_examples():
    assert mct.brute_modulus(lambda n: F(1, 2), 5, 64) == 0
    assert mct.brute_modulus(mct.t_of_f(F110), 3, 64) == 2
    assert mct.brute_modulus(geometric, 4, 64) == 2


def test_brute_modulus_checks_hypotheses():
    with pytest.raises(mct.NotMonotoneWithinCap):
        mct.brute_modulus(lambda n: F(1, n + 1), 2, 10)
    with pytest.raises(mct.NotMonotoneWithinCap):
        mct.brute_modulus(lambda n: F(n), 2, 10)
    with pytest.raises(ValueError):
        mct.brute_modulus(geometric, 0, 10)


def test_mu_from_mct_examples():
    assert mct.mu_from_mct(BRUTE, F110) == 2
    assert F110(2) == 0
    assert isinstance(mct.mu_from_mct(BRUTE, lambda i: 1), int)
    f = mct.f_from_list([0])
    assert f(0) == 0 and mct.mu_from_mct(BRUTE, f) >= 0


def test_mct_from_mu_examples():
    assert mct.mct_from_mu(MU, lambda n: F(1, 2), 3) == 0
    assert mct.mct_from_mu(MU, mct.t_of_f(F110), 3) == 2
    assert mct.mct_from_mu(MU, geometric, 4) == 2


def test_faulty_mu_is_caught():
    lazy = lambda g: 0
    got = mct.mct_from_mu(lazy, mct.t_of_f(F110), 3)
    assert got != mct.brute_modulus(mct.t_of_f(F110), 3, 64)


def test_broken_pairing_disagrees():
    broken = lambda j: (j // 2, j // 2)
    c = mct.t_of_f(F110)
    assert mct.mct_from_mu(MU, c, 3, unpair_fn=broken) != mct.brute_modulus(c, 3, 64)
    assert mct.mct_from_mu(MU, c, 3, unpair_fn=unpair) == 2


patterns = st.lists(st.sampled_from([0, 1, 2]), max_size=32)


@settings(max_examples=60, deadline=None)
@given(patterns)
def test_t_of_f_is_monotone_in_unit_interval(bits):
    c = mct.t_of_f(mct.f_from_list(bits))
    mct.check_monotone(c, 40)


@settings(max_examples=60, deadline=None)
@given(patterns)
def test_jump_property(bits):
    f = mct.f_from_list(bits)
    if 0 not in bits:
        return
    m0 = bits.index(0)
    c = mct.t_of_f(f)
    if m0 >= 1:
        assert c(m0) - c(m0 - 1) == 1 - F(1, 2 ** m0)
    else:
        assert c(1) - c(0) == F(1, 2)


@settings(max_examples=40, deadline=None)
@given(patterns)
def test_mu_transfer_on_long_patterns(bits):
    f = mct.f_from_list(bits)
    if 0 in bits:
        n = mct.mu_from_mct(BRUTE, f)
        assert any(f(i) == 0 for i in range(n + 1))


def test_sum_from_zero_breaks_unit_interval():
    c = mct.t_of_f(mct.f_from_list([0]), start=0)
    with pytest.raises(mct.NotMonotoneWithinCap):
        mct.check_monotone(c, 8)


# -- reals -----------------------------------------------------------------

def test_real_certificates():
    third = mct.Real(lambda k: F(round(F(2 ** k, 3)), 2 ** k))
    assert third.check_certificate()
    bad = mct.Real(lambda k: F(k % 2))
    assert not bad.check_certificate()
    assert mct.approx_equal(third, mct.real_from_rational(F(1, 3)))
    assert not mct.approx_equal(third, mct.real_from_rational(F(1, 2)))


# -- verify_equivalence ---------------------------------------------------------

SMALL = {"e_max": 3, "n_max": 2, "s_cap": 128, "m_max": 8}


def _rows(**kw):
    rows = mct.verify_equivalence(SMALL, **kw)
    return {(r["e"], r["n"], r["oracle"], r["variant"]): r for r in rows}


def test_loop_rows_are_vacuous():
    rows = _rows()
    assert all(r["verdict"] == mc.VACUOUS for (e, *_), r in rows.items() if e == 1)


def test_echo_rows_pass_with_nu_above_halting_step():
    rows = _rows()
    for (e, n, *_), r in rows.items():
        if e == 0:
            assert r["verdict"] == mc.PASS
            assert r["nu"] >= r["halting_step"] and r["nu"] >= n


def test_zero_nu_fails_on_echo():
    rows = _rows(nu_override=lambda e, n: 0)
    assert any(r["verdict"] == mc.FAIL for (e, *_), r in rows.items() if e == 0)


def test_variants_coincide():
    rows = _rows()
    for (e, n, o, v), r in rows.items():
        if v == "uniform":
            other = rows[(e, n, o, "per-index")]
            assert (other["nu"], other["verdict"]) == (r["nu"], r["verdict"])


def test_sequence_for_matches_direct_values():
    e = mc.E_ECHO
    c = mct.sequence_for(mc.smn_monotone_index(e, 2), e, 2, mc.ALL0, 8)
    assert [c(m) for m in range(4)] == [0, 0, F(3, 4), F(7, 8)]
    assert c(20) == 1 - F(1, 2 ** 20)
