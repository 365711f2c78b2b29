"""Monotone convergence versus the mu-operator, computed at desk scale.

Sequences of rationals are plain callables ``Nat -> Fraction``; moduli and
mu-operators are ordinary functions, so brute-force instances and faulty
mutants plug into the same checks.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable

from . import machines as mc
from .pairing import decode_rational, unpair


class NotMonotoneWithinCap(ValueError):
    pass


class NotFoundWithinCap(LookupError):
    pass


class SearchCapExceeded(LookupError):
    pass


# -- reals -------------------------------------------------------------------

@dataclass(frozen=True)
class Real:
    """A real given by a fast-converging Cauchy sequence of rationals."""
    approx: Callable[[int], Fraction]

    def __call__(self, k: int) -> Fraction:
        return Fraction(self.approx(k))

    def check_certificate(self, depth: int = 16, spread: int = 16) -> bool:
        """``|q_n - q_(n+i)| <= 2^-n`` for ``n < depth``, ``i < spread``."""
        for n in range(depth):
            qn = self(n)
            for i in range(spread):
                if abs(qn - self(n + i)) > Fraction(1, 2 ** n):
                    return False
        return True


def real_from_rational(q) -> Real:
    q = Fraction(q)
    return Real(lambda k: q)


def approx_equal(x: Real, y: Real, depth: int = 16) -> bool:
    """Finite check of ``x = y``: ``|x(n) - y(n)| <= 2^(1-n)`` for ``n < depth``."""
    return all(abs(x(n) - y(n)) <= Fraction(2, 2 ** n) for n in range(depth))


# -- the sequence t(f) -------------------------------------------------------

def partial_sum(k: int, start: int = 1) -> Fraction:
    """``sum_{i=start}^{k} 2^-i``."""
    if k < start:
        return Fraction(0)
    return Fraction(2 ** (k - start + 1) - 1, 2 ** k)


def t_of_f(f: Callable[[int], int], start: int = 1) -> Callable[[int], Fraction]:
    """``c(k) = 0`` while ``f`` has no zero in ``[0, k]``, else ``sum_{i=start}^{k} 2^-i``.

    ``start=0`` gives the variant whose values reach up to 2; it is kept for
    mutation tests only.
    """
    first_zero = [None]
    scanned = [-1]

    def c(k: int) -> Fraction:
        while first_zero[0] is None and scanned[0] < k:
            scanned[0] += 1
            if f(scanned[0]) == 0:
                first_zero[0] = scanned[0]
        if first_zero[0] is not None and first_zero[0] <= k:
            return partial_sum(k, start)
        return Fraction(0)

    return c


def f_from_list(values, default: int = 1) -> Callable[[int], int]:
    values = tuple(values)
    return lambda i: values[i] if i < len(values) else default


def check_monotone(c, cap: int, upper=Fraction(1)) -> None:
    prev = Fraction(c(0))
    if prev < 0 or prev > upper:
        raise NotMonotoneWithinCap(f"c(0) = {prev} is outside [0, {upper}]")
    for n in range(1, cap + 1):
        cur = Fraction(c(n))
        if cur < prev:
            raise NotMonotoneWithinCap(f"c({n}) = {cur} < c({n - 1}) = {prev}")
        if cur > upper:
            raise NotMonotoneWithinCap(f"c({n}) = {cur} > {upper}")
        prev = cur


def brute_modulus(c, k: int, cap: int) -> int:
    """Least ``K <= cap`` with ``c(cap) - c(K) <= 1/k``; by monotonicity every
    ``K <= N, M <= cap`` then satisfies ``|c(N) - c(M)| <= 1/k``."""
    if k < 1:
        raise ValueError("k must be at least 1")
    check_monotone(c, cap)
    top = Fraction(c(cap))
    eps = Fraction(1, k)
    for K in range(cap + 1):
        if top - Fraction(c(K)) <= eps:
            return K
    raise NotFoundWithinCap(f"no modulus below {cap}")


def brute_modulus_functional(cap: int):
    """``Psi(c, k)`` as brute search with a fixed cap."""
    return lambda c, k: brute_modulus(c, k, cap)


def mu_from_mct(Psi, f, k: int = 3) -> int:
    """Bound ``n`` with ``(exists m) f(m) = 0 -> (exists i <= n) f(i) = 0``.

    Every jump of ``t_of_f(f)`` is at least 1/2, so a modulus for 1/3 lies
    past the first zero of ``f``.
    """
    return Psi(t_of_f(f), k)


# -- mu-operators and the converse direction ---------------------------------

def brute_mu(cap: int = 4096):
    """Least zero of ``g`` below ``cap``, or 0 when there is none."""
    def mu(g):
        for j in range(cap):
            if g(j) == 0:
                return j
        return 0
    return mu


@lru_cache(maxsize=16)
def _decoded_pairs(cap: int, unpair_fn):
    return tuple(unpair_fn(j) for j in range(cap))


def mct_from_mu(mu, c, k: int, n_cap: int = 512, pair_cap: int = 4096, unpair_fn=unpair) -> int:
    """Modulus of convergence of ``c`` at ``1/k`` obtained from a mu-operator.

    For ``n = 0, 1, ...`` the function ``g_n(j) = 0`` iff ``j`` codes
    ``(N, M)`` with ``N, M >= n`` and ``|c(N) - c(M)| > 1/k``; the first ``n``
    for which ``mu`` finds no such pair is returned.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    pairs = _decoded_pairs(pair_cap, unpair_fn)
    eps = Fraction(1, k)
    values = {}

    def val(i):
        if i not in values:
            values[i] = Fraction(c(i))
        return values[i]

    # whether pair j is more than 1/k apart does not depend on n
    far = [abs(val(N) - val(M)) > eps for N, M in pairs]
    low = [min(N, M) for N, M in pairs]

    for n in range(n_cap + 1):
        def g(j, n=n):
            if j < len(pairs):
                return 0 if far[j] and low[j] >= n else 1
            N, M = unpair_fn(j)
            return 0 if N >= n and M >= n and abs(val(N) - val(M)) > eps else 1
        if g(mu(g)) != 0:
            return n
    raise SearchCapExceeded(f"no modulus found for n <= {n_cap}")


# -- desk-scale verification ------------------------------------------------

DEFAULT_CAPS = {"e_max": 16, "n_max": 4, "s_cap": 512, "m_max": 8}


def sequence_for(e_prime: int, e: int, n: int, A, m_max: int, horizon: int = 512):
    """``m -> phi^A_{e'}(m)`` as rationals: simulated for ``m <= m_max``, evaluated directly beyond.

    The direct part uses that ``f0`` is antitone in ``k``: one run up to
    ``horizon`` steps finds the point where it drops to 0.
    """
    program = mc.as_program(e_prime)
    cache = {}
    jump = mc.jump_point(e, n, A, horizon)

    def c(m: int) -> Fraction:
        if m not in cache:
            if m <= m_max:
                r = mc.run_bounded(program, m, A, mc.smn_step_bound(e, n, m))
                if r is None:
                    raise RuntimeError(f"s-m-n program did not halt on {m}")
                q = decode_rational(r.output)
                if q is None:
                    raise RuntimeError(f"s-m-n program produced a non-rational code on {m}")
                cache[m] = q
            else:
                hit = jump is not None and jump <= m if m <= horizon else mc.f0(e, n, A, m) == 0
                cache[m] = Fraction(1) - Fraction(1, 2 ** m) if hit else Fraction(0)
        return cache[m]

    return c


def verify_equivalence(caps=None, oracles=None, programs=None, nu_override=None, k: int = 3):
    """Rows ``{e, n, oracle, e_prime, nu, verdict, halting_step, variant}``.

    For every program, input and oracle: ``e' = smn(e, n)``; the brute-force
    modulus of ``phi^A_{e'}`` at ``1/k`` plays the modulus functional and
    gives ``nu(e, n)``; ``check_mu_a`` then judges the cell.  Each cell is
    reported twice: once in the uniform form (``variant = "uniform"``, the
    modulus over all indices) and once per index (``variant = "per-index"``,
    with the index ``e'`` handed to the modulus).
    """
    caps = {**DEFAULT_CAPS, **(caps or {})}
    oracles = oracles or mc.STANDARD_ORACLES
    if programs is None:
        programs = mc.CANONICAL_INDICES[: caps["e_max"]]
    rows = []
    for oracle in oracles:
        for ei, e in enumerate(programs):
            for n in range(caps["n_max"] + 1):
                e_prime = mc.smn_monotone_index(e, n)
                seq = sequence_for(e_prime, e, n, oracle, caps["m_max"], caps["s_cap"])
                nu_value = brute_modulus(seq, k, caps["s_cap"])
                if nu_override is not None:
                    nu_value = nu_override(e, n)
                for variant in ("uniform", "per-index"):
                    verdict = mc.check_mu_a(lambda _e, _n: nu_value, e, n, oracle, caps["s_cap"])
                    rows.append({
                        "e": ei,
                        "index": e,
                        "n": n,
                        "oracle": oracle.name,
                        "e_prime": str(e_prime),
                        "nu": nu_value,
                        "verdict": verdict.verdict,
                        "halting_step": verdict.halting_step,
                        "variant": variant,
                    })
    return rows


def summarize(rows):
    out = {mc.PASS: 0, mc.VACUOUS: 0, mc.FAIL: 0}
    for r in rows:
        out[r["verdict"]] += 1
    return out
