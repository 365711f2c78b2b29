from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from nsacomp.pairing import decode_list, decode_rational, encode_list, encode_rational, pair, unpair

nat = st.integers(min_value=0, max_value=10 ** 12)


def test_pair_small_table():
    # diagonal enumeration: (0,0) (1,0) (0,1) (2,0) (1,1) (0,2) ...
    order = [(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2), (3, 0)]
    assert [pair(x, y) for x, y in order] == list(range(len(order)))


def test_pair_rejects_negatives():
    with pytest.raises(ValueError):
        pair(-1, 0)
    with pytest.raises(ValueError):
        unpair(-3)


@given(nat, nat)
def test_unpair_inverts_pair(x, y):
    assert unpair(pair(x, y)) == (x, y)


@given(st.integers(min_value=0, max_value=10 ** 15))
def test_pair_inverts_unpair(z):
    assert pair(*unpair(z)) == z


@given(st.lists(st.integers(min_value=0, max_value=50), max_size=6))
def test_list_round_trip(xs):
    assert decode_list(encode_list(xs)) == xs


def test_list_codes():
    assert encode_list([]) == 0
    assert encode_list([6]) == 274
    assert decode_list(pair(1, 5)) is None  # trailing garbage after one element
    assert decode_list(encode_list([1, 2, 3]), max_length=2) is None


def test_rational_codes():
    assert encode_rational(0) == 2
    for m in range(1, 6):
        assert encode_rational(1 - Fraction(1, 2 ** m)) == pair(2 ** m - 1, 2 ** m)
    assert decode_rational(pair(3, 4)) == Fraction(3, 4)
    assert decode_rational(pair(2, 4)) is None  # not in lowest terms
    assert decode_rational(pair(1, 0)) is None
