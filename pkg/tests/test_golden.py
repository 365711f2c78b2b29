"""Golden formulas: hand-transcribed normal forms checked against the pipeline."""
import pytest

from nsacomp import formulas as fm
from nsacomp import normalizer as nz
from nsacomp import semantics as sm
from nsacomp import suites

# trace index at which each chain formula first appears (frozen)
CHAIN_POSITIONS = {
    "transfer_normal": 4,
    "convergence_modulus": 7,
    "pulled_implication": 8,
    "witness_functional": 9,
    "dropped_st": 10,
    "mct_normal_form": 11,
}


@pytest.mark.parametrize("name", suites.GOLDEN_NAMES)
def test_golden_files_parse_and_round_trip(name):
    f = suites.golden(name)
    assert fm.parse_formula(fm.format_formula(f)) == f


def test_chain_positions():
    d = suites.golden_chain()
    assert {n: d[n] for n in CHAIN_POSITIONS} == CHAIN_POSITIONS
    assert d["final_mct_normal_form"] and d["final_restricted_normal_form"] and d["bound_instance"]


@pytest.mark.parametrize("name", ["transfer_normal", "mct_normal_form", "restricted_normal_form"])
def test_normal_forms(name):
    assert fm.is_normal_form(suites.golden(name))


def test_restricted_chain_contains_bounded_pieces():
    states = nz.normalize_formula(suites.input_formula("restricted_mct")).formulas()
    for name in ("bounded_transfer", "convergence_of_t"):
        target = suites.golden(name)
        assert any(fm.alpha_eq(g, target) for f in states for _, g in fm.walk(f)), name


def test_suite_passes():
    assert suites.suite_golden_chain().passed


def test_wrong_prenexing_is_caught():
    # swapping the standard quantifiers of a golden formula changes its truth value
    good = suites.golden("transfer_normal").body
    swapped = fm.parse_formula("""
      (exists-st (n Nat) (forall-st (f (-> Nat Nat))
        (=> (exists (m Nat) (= (f m) 0)) (= (f n) 0))))""")
    _, bad = sm.check_equivalence(suites.golden("transfer_normal"), swapped, {}, max_domain=3)
    assert bad is not None
    assert not fm.alpha_eq(good, swapped)
