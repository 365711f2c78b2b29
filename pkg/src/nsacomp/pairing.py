"""Cantor pairing, used repo-wide for coding pairs, lists and rationals.

``pair(x, y) = (x + y)(x + y + 1)/2 + y``.
"""
from fractions import Fraction
from math import isqrt


def pair(x: int, y: int) -> int:
    if x < 0 or y < 0:
        raise ValueError("pair() takes natural numbers")
    s = x + y
    return s * (s + 1) // 2 + y


def unpair(z: int) -> tuple[int, int]:
    if z < 0:
        raise ValueError("unpair() takes a natural number")
    w = (isqrt(8 * z + 1) - 1) // 2
    y = z - w * (w + 1) // 2
    return w - y, y


def encode_list(xs) -> int:
    """Length-prefixed list code: ``pair(len, pair(x0, pair(x1, ... pair(x_last, 0))))``."""
    xs = list(xs)
    body = 0
    for x in reversed(xs):
        body = pair(x, body)
    return pair(len(xs), body)


def decode_list(code: int, max_length: int | None = None):
    """Inverse of :func:`encode_list`.

    Returns ``None`` for non-canonical codes (trailing garbage) and for lists
    longer than ``max_length`` when that is given.
    """
    length, body = unpair(code)
    if max_length is not None and length > max_length:
        return None
    out = []
    for _ in range(length):
        x, body = unpair(body)
        out.append(x)
    if body != 0:
        return None
    return out


def encode_rational(q) -> int:
    """Code a nonnegative rational as ``pair(num, den)`` in lowest terms."""
    q = Fraction(q)
    if q < 0:
        raise ValueError("only nonnegative rationals are coded")
    return pair(q.numerator, q.denominator)


def decode_rational(code: int) -> Fraction | None:
    num, den = unpair(code)
    if den == 0:
        return None
    q = Fraction(num, den)
    if q.numerator != num:
        return None
    return q
