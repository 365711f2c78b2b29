"""Exhaustive evaluation of formulas on finite interpretations.

The domain of ``Nat`` is ``{0, ..., d-1}`` with saturating successor, every
element is standard (``st`` is true everywhere), sequences have length at
most ``d``, and arrow types range over *all* functions between the finite
value sets.  Types whose value set would exceed ``budget`` elements raise
:class:`TooLarge`; callers skip that domain size.
"""
from __future__ import annotations

import itertools
from functools import lru_cache

from . import formulas as fm
from . import terms
from .terms import Arrow, Nat, Seq


class TooLarge(Exception):
    pass


DEFAULT_BUDGET = 4096


class FinFun:
    """A total function on a finite value set, stored as a table."""

    __slots__ = ("_index", "table", "_hash")

    def __init__(self, index: dict, table: tuple):
        self._index = index
        self.table = table
        self._hash = hash(table)

    def __call__(self, x):
        return self.table[self._index[x]]

    def __eq__(self, other):
        return isinstance(other, FinFun) and self.table == other.table and self._index is other._index

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"FinFun{self.table}"


def _count(ty, d):
    if isinstance(ty, Nat):
        return d
    if isinstance(ty, Seq):
        n = _count(ty.element, d)
        return sum(n ** k for k in range(d + 1))
    dom = _count(ty.domain, d)
    cod = _count(ty.codomain, d)
    return cod ** dom


@lru_cache(maxsize=None)
def _values(ty, d, budget):
    if _count(ty, d) > budget:
        raise TooLarge(f"{ty} has {_count(ty, d)} values at domain size {d}")
    if isinstance(ty, Nat):
        return tuple(range(d))
    if isinstance(ty, Seq):
        elems = _values(ty.element, d, budget)
        return tuple(s for k in range(d + 1) for s in itertools.product(elems, repeat=k))
    dom = _values(ty.domain, d, budget)
    cod = _values(ty.codomain, d, budget)
    index = {v: i for i, v in enumerate(dom)}
    return tuple(FinFun(index, table) for table in itertools.product(cod, repeat=len(dom)))


def values(ty, d: int, budget: int = DEFAULT_BUDGET):
    """All values of type ``ty`` over the domain ``{0..d-1}``."""
    return _values(ty, d, budget)


def fits(ty, d: int, budget: int = DEFAULT_BUDGET) -> bool:
    return _count(ty, d) <= budget


def _t_constant(d):
    # a fixed, weakly increasing stand-in for the sequence term t(f)(k)
    def t(f):
        def at(k):
            for i in range(k + 1):
                if f(i) == 0:
                    return min(k, d - 1)
            return 0
        return at
    return t


class Interpretation:
    def __init__(self, d: int, predicates: dict | None = None, budget: int = DEFAULT_BUDGET):
        if d < 1:
            raise ValueError("domain size must be positive")
        self.d = d
        self.budget = budget
        self.predicates = dict(predicates or {})
        self.constants = {"t": _t_constant(d)}
        self._compiled = {}

    def clip(self, n):
        return min(n, self.d - 1)

    # -- terms -------------------------------------------------------------

    def term(self, t, env):
        return self.compile_term(t)(env)

    def compile_term(self, t):
        """Closure ``env -> value`` for a term."""
        if isinstance(t, terms.Var):
            name = t.name
            const = self.constants.get(name)

            def var(env):
                try:
                    return env[name]
                except KeyError:
                    if const is not None:
                        return const
                    raise terms.UnboundVariable(name) from None
            return var
        if isinstance(t, terms.NatLit):
            value = self.clip(t.value)
            return lambda env: value
        if isinstance(t, terms.App):
            fn, arg = self.compile_term(t.fn), self.compile_term(t.arg)
            return lambda env: fn(env)(arg(env))
        if isinstance(t, terms.Lam):
            binder, body = t.binder, self.compile_term(t.body)

            def lam(env):
                captured = dict(env)

                def call(v):
                    inner = dict(captured)
                    inner[binder] = v
                    return body(inner)
                return call
            return lam
        if isinstance(t, terms.SeqLit):
            elems = [self.compile_term(e) for e in t.elements]
            return lambda env: tuple(e(env) for e in elems)
        if isinstance(t, terms.Builtin):
            args = [self.compile_term(a) for a in t.args]
            op = t.op
            top = self.d - 1
            if op == "succ":
                a, = args
                return lambda env: min(a(env) + 1, top)
            if op == "len":
                a, = args
                return lambda env: min(len(a(env)), top)
            if op == "max":
                a, = args
                return lambda env: terms.seq_max(a(env))
            if op == "concat":
                a, b = args
                return lambda env: tuple(a(env)) + tuple(b(env))
            if op == "restrict":
                a, b = args
                return lambda env: tuple(a(env)[: b(env) + 1])
            if op == "index":
                a, b = args

                def index(env):
                    s, i = a(env), b(env)
                    return s[i] if i < len(s) else 0
                return index
        raise terms.TermError(f"cannot interpret {t!r}")

    # -- formulas ----------------------------------------------------------

    def relation(self, rel):
        if rel == "true":
            return lambda: True
        if rel == "false":
            return lambda: False
        if rel == "=":
            return lambda a, b: a == b
        if rel == "!=":
            return lambda a, b: a != b
        if rel in ("<=", "mono"):
            return lambda a, b: a <= b
        if rel == "<":
            return lambda a, b: a < b
        if rel == "close":
            top = self.d - 1
            return lambda a, b, k: k == 0 or abs(a - b) * k <= top
        if rel in self.predicates:
            pred = self.predicates[rel]
            return lambda *args: bool(pred(*args))
        raise fm.FormulaError(f"no interpretation for relation {rel!r}")

    def atom(self, rel, args):
        return self.relation(rel)(*args)

    def holds(self, f, env=None) -> bool:
        return self.compile(f)(dict(env or {}))

    def compile(self, f):
        """Closure ``env -> bool``; ``env`` is mutated during evaluation and restored."""
        if f in self._compiled:
            return self._compiled[f]
        out = self._compile(f)
        self._compiled[f] = out
        return out

    def _compile(self, f):
        if isinstance(f, fm.Atom):
            rel = self.relation(f.rel)
            args = [self.compile_term(a) for a in f.args]
            if len(args) == 2:
                a, b = args
                return lambda env: rel(a(env), b(env))
            return lambda env: rel(*[a(env) for a in args])
        if isinstance(f, fm.St):
            t = self.compile_term(f.term)

            def st(env):
                t(env)
                return True
            return st
        if isinstance(f, fm.Not):
            body = self.compile(f.body)
            return lambda env: not body(env)
        if isinstance(f, fm.And):
            left, right = self.compile(f.left), self.compile(f.right)
            return lambda env: left(env) and right(env)
        if isinstance(f, fm.Or):
            left, right = self.compile(f.left), self.compile(f.right)
            return lambda env: left(env) or right(env)
        if isinstance(f, fm.Implies):
            ante, cons = self.compile(f.ante), self.compile(f.cons)
            return lambda env: (not ante(env)) or cons(env)
        if isinstance(f, (fm.Quant, fm.ExistsIn)):
            body, var = self.compile(f.body), f.var
            universal = isinstance(f, fm.Quant) and f.kind in ("forall", "forall-st")
            if isinstance(f, fm.Quant):
                vals = values(f.type, self.d, self.budget)
                source = lambda env: vals
            else:
                source = self.compile_term(f.seq)

            def quant(env):
                missing = object()
                old = env.get(var, missing)
                result = universal
                for v in source(env):
                    env[var] = v
                    if body(env) != universal:
                        result = not universal
                        break
                if old is missing:
                    env.pop(var, None)
                else:
                    env[var] = old
                return result
            return quant
        if isinstance(f, fm.Macro):
            return self.compile(fm.expand_macros(f))
        raise fm.FormulaError(f"cannot evaluate {f!r}")


def quantified_types(f) -> set:
    return {g.type for _, g in fm.walk(f) if isinstance(g, fm.Quant)}


def evaluable(f, d: int, free_types: dict | None = None, budget: int = DEFAULT_BUDGET) -> bool:
    tys = quantified_types(f) | set((free_types or {}).values())
    return all(fits(ty, d, budget) for ty in tys)


def assignments(free_types: dict, d: int, budget: int = DEFAULT_BUDGET):
    names = sorted(free_types)
    pools = [values(free_types[n], d, budget) for n in names]
    for combo in itertools.product(*pools):
        yield dict(zip(names, combo))


def equivalent_on(f, g, d: int, free_types: dict | None = None, predicates=None,
                  budget: int = DEFAULT_BUDGET):
    """Compare truth values of ``f`` and ``g`` under every assignment at size ``d``.

    Returns ``None`` when they agree everywhere, otherwise the first
    counterexample assignment.
    """
    interp = Interpretation(d, predicates, budget)
    cf, cg = interp.compile(f), interp.compile(g)
    for env in assignments(free_types or {}, d, budget):
        if cf(dict(env)) != cg(dict(env)):
            return env
    return None


def check_equivalence(f, g, free_types: dict | None = None, max_domain: int = 3,
                      predicates=None, budget: int = DEFAULT_BUDGET):
    """Check ``f`` and ``g`` on all domain sizes ``1..max_domain`` that fit the budget.

    Returns ``(checked_sizes, counterexample)`` where the counterexample is
    ``(d, env)`` or ``None``.
    """
    checked = []
    for d in range(1, max_domain + 1):
        if not (evaluable(f, d, free_types, budget) and evaluable(g, d, free_types, budget)):
            continue
        checked.append(d)
        bad = equivalent_on(f, g, d, free_types, predicates, budget)
        if bad is not None:
            return checked, (d, bad)
    return checked, None
