import pytest
from hypothesis import given, settings, strategies as st

from nsacomp import machines as mc
from nsacomp.pairing import decode_rational, encode_rational, pair
from fractions import Fraction

ANY = mc.STANDARD_ORACLES


# -- encoding ----------------------------------------------------------------

def test_worked_encodings():
    assert mc.E_ECHO == 274
    assert mc.E_LOOP == 76
    assert mc.E_QUERY == 52647
    assert mc.encode([]) == 0
    assert mc.encode(mc.parse_program("HALT 1")) == 2344


def test_encoding_is_nested_pairing():
    halt0 = pair(mc.HALT, pair(0, 0))
    assert mc.encode_instr(mc.Instr(mc.HALT, 0)) == halt0
    assert mc.E_ECHO == pair(1, pair(halt0, 0))


@pytest.mark.parametrize("i", range(16))
def test_canonical_programs_decode(i):
    assert mc.decode(mc.CANONICAL_INDICES[i]) == mc.CANONICAL_PROGRAMS[i]


@given(st.integers(min_value=0, max_value=10 ** 9))
def test_decode_is_total(e):
    assert isinstance(mc.decode(e), mc.Program)


def test_invalid_codes_decode_to_loop():
    bad_op = pair(1, pair(pair(7, 0), 0))
    assert mc.decode(bad_op) == mc.LOOP


def test_large_index_is_refused():
    with pytest.raises(mc.IndexTooLarge):
        mc.encode(mc.smn_program(mc.E_ECHO, 3))


def test_parse_program_errors():
    with pytest.raises(ValueError):
        mc.parse_program("HALT")
    with pytest.raises(ValueError):
        mc.parse_program("DECJZ 0 9")


# -- running -----------------------------------------------------------------

@pytest.mark.parametrize("A", ANY)
def test_echo(A):
    assert mc.run_bounded(mc.E_ECHO, 7, A, 1) == (7, 1)
    assert mc.run_bounded(mc.E_ECHO, 7, A, 0) is None


def test_loop_never_halts():
    for A in ANY:
        assert mc.run_bounded(mc.E_LOOP, 3, A, 100) is None


def test_query():
    assert mc.run_bounded(mc.E_QUERY, 4, mc.ALL1, 2) == (1, 2)
    assert mc.run_bounded(mc.E_QUERY, 4, mc.ALL0, 2) == (0, 2)


def test_fall_off_is_non_halting():
    assert mc.run_bounded(mc.canonical(8), 0, mc.ALL0, 1000) is None


def test_check_tot_up_to():
    assert mc.check_tot_up_to(mc.E_ECHO, mc.ALL0, 10, 1)
    assert not mc.check_tot_up_to(mc.E_LOOP, mc.ALL0, 10, 1000)
    even = mc.canonical(3)
    assert mc.run_bounded(even, 4, mc.ALL0, 100) is not None
    assert mc.run_bounded(even, 3, mc.ALL0, 100) is None
    assert not mc.check_tot_up_to(even, mc.ALL0, 1, 100)


def test_f0():
    assert mc.f0(mc.E_ECHO, 3, mc.ALL0, 3) == 0
    assert mc.f0(mc.E_ECHO, 3, mc.ALL0, 2) == 1  # output 3 exceeds k
    assert mc.f0(mc.E_LOOP, 2, mc.PARITY, 1000) == 1
    for e in mc.CANONICAL_INDICES[:8]:
        assert mc.f0(e, 1, mc.ALL1, 0) == 1


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 15), st.integers(0, 6), st.sampled_from(ANY), st.integers(0, 60))
def test_step_monotonicity_and_f0_antitone(i, n, A, s):
    e = mc.canonical(i)
    r = mc.run_bounded(e, n, A, s)
    if r is not None:
        assert mc.run_bounded(e, n, A, s + 7) == r
    if mc.f0(e, n, A, s) == 0:
        assert mc.f0(e, n, A, s + 1) == 0


def test_use_principle():
    # the result depends only on the oracle bits that were read
    e = mc.canonical(14)
    tape = mc.OracleTape(mc.PARITY)
    r = mc.simulate(mc.as_program(e), 3, tape, 50)
    read = {k for k, _ in tape.log}
    assert read
    agree = mc.Oracle("agree", lambda k: mc.PARITY(k) if k in read else 1 - mc.PARITY(k))
    assert mc.run_bounded(e, 3, agree, 50) == r


def test_file_oracle(tmp_path):
    p = tmp_path / "bits.txt"
    p.write_text("1101\n")
    A = mc.oracle_from_spec(f"file:{p}")
    assert [A(k) for k in range(6)] == [1, 1, 0, 1, 0, 0]
    with pytest.raises(ValueError):
        mc.oracle_from_spec("nope")


# -- s-m-n ------------------------------------------------------------------

def _direct_t(e, n, A, m):
    # t(lambda k. f0(e,n,A,k))(m): 0 before the first k with f0 = 0, else sum_{i=1}^{m} 2^-i
    hit = any(mc.f0(e, n, A, k) == 0 for k in range(m + 1))
    return Fraction(2 ** m - 1, 2 ** m) if hit else Fraction(0)


def _run_smn(e, n, A, m):
    r = mc.run_bounded(mc.smn_program(e, n), m, A, mc.smn_step_bound(e, n, m))
    assert r is not None
    return decode_rational(r.output)


def test_smn_of_loop_is_constant_zero():
    for m in range(9):
        assert _run_smn(mc.E_LOOP, 2, mc.ALL0, m) == 0


def test_smn_of_echo():
    for m in range(9):
        assert _run_smn(mc.E_ECHO, 5, mc.ALL0, m) == _direct_t(mc.E_ECHO, 5, mc.ALL0, m)
    assert _run_smn(mc.E_ECHO, 5, mc.ALL0, 8) == Fraction(255, 256)
    assert _run_smn(mc.E_ECHO, 5, mc.ALL0, 4) == 0


def test_smn_ignores_oracle_without_queries():
    for m in range(9):
        assert _run_smn(mc.E_ECHO, 1, mc.ALL0, m) == _run_smn(mc.E_ECHO, 1, mc.PARITY, m)


def test_smn_depends_on_oracle_with_queries():
    e = mc.canonical(7)  # halts iff A(n) = 1
    assert _run_smn(e, 2, mc.ALL1, 8) > 0
    assert _run_smn(e, 2, mc.ALL0, 8) == 0


@pytest.mark.parametrize("i", [0, 1, 2, 3, 9, 13])
def test_smn_matches_direct_evaluation(i):
    e = mc.canonical(i)
    for A in ANY:
        for n in range(3):
            for m in range(9):
                assert _run_smn(e, n, A, m) == _direct_t(e, n, A, m)
                assert encode_rational(_direct_t(e, n, A, m)) == mc.t_code(e, n, A, m)


def test_smn_index_is_symbolic():
    idx = mc.smn_monotone_index(mc.E_ECHO, 5)
    assert isinstance(idx, mc.MachineIndex)
    assert mc.as_program(idx) == mc.smn_program(mc.E_ECHO, 5)


# -- MU^A verdicts ---------------------------------------------------------------

def test_check_mu_a():
    assert mc.check_mu_a(lambda e, n: 2, mc.E_ECHO, 2, mc.ALL0, 64).verdict == mc.PASS
    assert mc.check_mu_a(lambda e, n: 9, mc.E_LOOP, 2, mc.ALL0, 64).verdict == mc.VACUOUS
    assert mc.check_mu_a(lambda e, n: 1, mc.E_ECHO, 5, mc.ALL0, 64).verdict == mc.FAIL
