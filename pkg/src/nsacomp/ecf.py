"""Associates (neighbourhood functions) for continuous type-two functionals.

An associate ``alpha`` maps finite sequences to numbers; ``alpha(s) > 0``
means ``s`` is long enough to determine the value ``alpha(s) - 1``.  Initial
segments are inclusive: ``bar(beta, k)`` has the ``k + 1`` entries
``beta(0), ..., beta(k)``.  Undefined results are ``None``.
"""
from __future__ import annotations

import itertools
import random
from collections.abc import Sequence
from dataclasses import dataclass, field
from typing import Callable

from . import machines as mc
from . import mct
from .pairing import pair, unpair

DEFAULT_PROBE_CAP = 1 << 16


class Prefix(Sequence):
    """The first ``length`` values of ``beta`` without materializing them."""

    def __init__(self, beta, length: int, memo: dict | None = None):
        self.beta = beta
        self.length = length
        self.memo = {} if memo is None else memo

    def __len__(self):
        return self.length

    def __getitem__(self, i):
        if isinstance(i, slice):
            return tuple(self[j] for j in range(*i.indices(self.length)))
        if i < 0:
            i += self.length
        if not 0 <= i < self.length:
            raise IndexError(i)
        if i not in self.memo:
            self.memo[i] = self.beta(i)
        return self.memo[i]

    def __repr__(self):
        return f"Prefix({list(self)!r})" if self.length <= 16 else f"Prefix(len={self.length})"


def bar(beta, k: int, memo: dict | None = None) -> Prefix:
    """``beta(0), ..., beta(k)``."""
    return Prefix(beta, k + 1, memo)


def extend_zeros(sigma) -> Callable[[int], int]:
    """``sigma * 0^omega``."""
    n = len(sigma)
    return lambda i: sigma[i] if i < n else 0


def prepend(n: int, beta):
    """``<n> * beta``."""
    return lambda i: n if i == 0 else beta(i - 1)


def shift(beta):
    return lambda i: beta(i + 1)


def oplus(beta, gamma):
    """Interleaving: even positions from ``beta``, odd ones from ``gamma``."""
    return lambda i: beta(i // 2) if i % 2 == 0 else gamma(i // 2)


def evens(beta):
    return lambda k: beta(2 * k)


def odds(beta):
    return lambda k: beta(2 * k + 1)


# -- associates ----------------------------------------------------------------

@dataclass(frozen=True)
class Associate:
    alpha: Callable[[Sequence], int]
    name: str = field(default="alpha", compare=False)

    def __call__(self, sigma) -> int:
        return self.alpha(sigma)

    def table(self, depth: int, alphabet: int):
        """Values on all sequences of length ``<= depth`` over ``{0..alphabet-1}``."""
        out = {}
        for length in range(depth + 1):
            for sigma in itertools.product(range(alphabet), repeat=length):
                out[sigma] = self.alpha(sigma)
        return out


def _alpha(a):
    return a.alpha if isinstance(a, Associate) else a


def is_neighborhood(alpha, sample_depth: int) -> bool:
    """Consistency ``alpha(s) > 0, s prefix of t -> alpha(s) = alpha(t)`` for
    ``|t| <= sample_depth`` over the alphabet ``{0..sample_depth}``."""
    alpha = _alpha(alpha)
    letters = range(sample_depth + 1)
    for length in range(sample_depth + 1):
        for tau in itertools.product(letters, repeat=length):
            value = alpha(tau)
            for cut in range(length):
                a = alpha(tau[:cut])
                if a > 0 and a != value:
                    return False
    return True


def apply_associate(alpha, beta, probe_cap: int = DEFAULT_PROBE_CAP):
    """``alpha(bar(beta, k)) - 1`` for the least ``k <= probe_cap`` with a positive value."""
    alpha = _alpha(alpha)
    memo = {}
    for k in range(probe_cap + 1):
        v = alpha(bar(beta, k, memo))
        if v > 0:
            return v - 1
    return None


def least_defining_k(alpha, beta, probe_cap: int = DEFAULT_PROBE_CAP):
    alpha = _alpha(alpha)
    memo = {}
    for k in range(probe_cap + 1):
        if alpha(bar(beta, k, memo)) > 0:
            return k
    return None


def restrict_apply(alpha, beta, probe_cap: int = DEFAULT_PROBE_CAP):
    """``alpha|beta``: ``n -> apply_associate(alpha, <n> * beta)``."""
    return lambda n: apply_associate(alpha, prepend(n, beta), probe_cap)


def defined_up_to(partial, n_max: int) -> bool:
    return all(partial(n) is not None for n in range(n_max + 1))


def associate_of(F, modulus, probe_alphabet: int | None = None) -> Associate:
    """Associate of ``F`` from a pointwise modulus given as a length.

    ``alpha(s) = F(s * 0^omega) + 1`` when ``|s| >= modulus(s * 0^omega)``,
    and 0 otherwise.
    """
    def alpha(sigma):
        ext = extend_zeros(sigma)
        if len(sigma) >= modulus(ext):
            return F(ext) + 1
        return 0
    return Associate(alpha, name=f"assoc[{getattr(F, '__name__', 'F')}]")


class _OutOfPrefix(Exception):
    pass


def associate_by_queries(F) -> Associate:
    """Associate of ``F`` using its own queries as the modulus.

    ``F`` is run on ``s * 0^omega`` through a reader that aborts as soon as a
    position outside ``s`` is read, in which case the value is 0; this is
    the same as taking the modulus to be one past the largest position read.
    """
    def alpha(sigma):
        n = len(sigma)

        def reader(i):
            if i >= n:
                raise _OutOfPrefix
            return sigma[i]
        try:
            return F(reader) + 1
        except _OutOfPrefix:
            return 0
    return Associate(alpha, name=f"assoc[{getattr(F, '__name__', 'F')}]")


class QueryLog:
    """Wraps ``beta`` and records every position read."""

    def __init__(self, beta):
        self.beta = beta
        self.positions = []

    def __call__(self, i):
        self.positions.append(i)
        return self.beta(i)

    @property
    def modulus(self):
        return max(self.positions) + 1 if self.positions else 0


def query_modulus(F):
    """Pointwise modulus of ``F`` at ``beta``: one past the largest position read."""
    def modulus(beta):
        log = QueryLog(beta)
        F(log)
        return log.modulus
    return modulus


def random_functional(rng: random.Random, max_position: int = 8):
    """A continuous ``F(beta) = c + sum a_i * beta(p_i)`` together with its modulus length."""
    count = rng.randint(1, 3)
    positions = sorted(rng.sample(range(max_position), count))
    coeffs = [rng.randint(1, 3) for _ in positions]
    const = rng.randint(0, 5)

    def F(beta):
        return const + sum(a * beta(p) for a, p in zip(coeffs, positions))
    F.__name__ = f"F[{const}+{list(zip(coeffs, positions))}]"
    return F, positions[-1] + 1


def associate_round_trip(count: int = 20, seed: int = 0, probe_cap: int = 64):
    """``apply_associate(associate_of(F, m), beta) == F(beta)`` on seeded functionals."""
    rng = random.Random(seed)
    results = []
    for _ in range(count):
        F, m = random_functional(rng)
        values = [rng.randint(0, 9) for _ in range(32)]
        beta = lambda i, v=tuple(values): v[i] if i < len(v) else 0
        a = associate_of(F, lambda _b, m=m: m)
        got = apply_associate(a, beta, probe_cap)
        results.append((F.__name__, F(beta), got))
    return results


# -- mu has no associate -----------------------------------------------------

def mu_discontinuity_witness(mu, depth: int):
    """``f = 1^omega`` and ``g = 1^(depth+1) 0^omega`` agree up to ``depth``, yet ``mu`` separates them."""
    f = lambda i: 1
    g = lambda i: 1 if i <= depth else 0
    return f, g, mu(f), mu(g)


# -- the associate desk run ---------------------------------------------------

def psi_table(e_max: int, n_max: int, oracle, s_cap: int, m_max: int = 8):
    """``psi(pair(pair(e, n), k))`` = brute modulus at ``1/k`` of the s-m-n sequence of ``(e, n)``, lazily."""
    programs = mc.CANONICAL_INDICES
    sequences = {}
    cache = {}

    def psi(i: int) -> int:
        if i in cache:
            return cache[i]
        en, k = unpair(i)
        e_idx, n = unpair(en)
        value = 0
        if e_idx < len(programs) and k >= 1:
            key = (e_idx, n)
            if key not in sequences:
                e = programs[e_idx]
                sequences[key] = mct.sequence_for(mc.smn_monotone_index(e, n), e, n, oracle, m_max, s_cap)
            value = mct.brute_modulus(sequences[key], k, s_cap)
        cache[i] = value
        return value

    return psi


def make_nu_functional(k: int = 3):
    """``Phi(<j> * (psi + A))``: the MU^A bound for ``(e, n) = unpair(j)``.

    Reads ``psi`` at ``pair(pair(e, n), k)`` and then runs ``e`` on ``n``
    for that many steps with the oracle read from the odd positions; the
    answer is the exact halting bound when the run halts within it.
    """
    def Phi(beta):
        j = beta(0)
        gamma = shift(beta)
        psi, A = evens(gamma), odds(gamma)
        e_idx, n = unpair(j)
        nu0 = psi(pair(pair(e_idx, n), k))
        if e_idx >= len(mc.CANONICAL_INDICES):
            return nu0
        r = mc.run_bounded(mc.CANONICAL_INDICES[e_idx], n, A, nu0)
        if r is not None and max(r.steps, r.output) <= nu0:
            return max(r.steps, r.output)
        return nu0
    Phi.__name__ = "Phi"
    return Phi


def run_cor45(e_max: int = 8, n_max: int = 3, s_cap: int = 256, oracles=None,
              probe_cap: int = DEFAULT_PROBE_CAP, m_max: int = 8):
    """Rows ``{e, n, oracle, nu, defined, verdict, halting_step, a_bits}``.

    ``z`` is the associate of the bound functional; for each oracle ``A`` and
    cell ``(e, n)`` the value ``(z | (psi + A))(pair(e, n))`` must be
    defined and pass ``check_mu_a``.
    """
    oracles = oracles or (mc.ALL0, mc.ALL1)
    Phi = make_nu_functional()
    z = associate_by_queries(Phi)
    rows = []
    for oracle in oracles:
        psi = psi_table(e_max, n_max, oracle, s_cap, m_max)
        beta = oplus(psi, oracle)
        applied = restrict_apply(z, beta, probe_cap)
        for e_idx in range(e_max):
            e = mc.CANONICAL_INDICES[e_idx]
            for n in range(n_max + 1):
                j = pair(e_idx, n)
                nu = applied(j)
                log = QueryLog(prepend(j, beta))
                Phi(log)
                a_positions = sorted({(p - 1) // 2 for p in log.positions if p >= 1 and (p - 1) % 2 == 1})
                a_consistent = all(log.beta(2 * q + 2) == oracle(q) for q in a_positions)
                row = {
                    "e": e_idx,
                    "n": n,
                    "oracle": oracle.name,
                    "nu": nu,
                    "defined": nu is not None,
                    "a_bits": len(a_positions),
                    "a_bits_consistent": a_consistent,
                    "modulus": log.modulus,
                }
                if nu is None:
                    row.update(verdict=mc.FAIL, halting_step=None)
                else:
                    v = mc.check_mu_a(lambda _e, _n: nu, e, n, oracle, s_cap)
                    row.update(verdict=v.verdict, halting_step=v.halting_step)
                rows.append(row)
    return rows
