"""Finite types with sequence types, closed terms, and their evaluator.

Values are plain Python objects: ``int`` for ``Nat``, ``tuple`` for ``Seq``
and callables for arrow types.  Sequence restriction follows the inclusive
convention: ``restrict(s, N) = <s(0), ..., s(N)>`` has length ``N + 1``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Union

from . import sexp
from .sexp import SExpSyntaxError, is_atom


class TermError(Exception):
    pass


class TypeMismatch(TermError):
    pass


class UnboundVariable(TermError):
    pass


class OutOfDomain(TermError):
    pass


# -- types -----------------------------------------------------------------

@dataclass(frozen=True)
class Nat:
    def __str__(self):
        return "Nat"


@dataclass(frozen=True)
class Arrow:
    domain: "FinType"
    codomain: "FinType"

    def __str__(self):
        parts = [self.domain]
        cod = self.codomain
        while isinstance(cod, Arrow):
            parts.append(cod.domain)
            cod = cod.codomain
        parts.append(cod)
        return "(-> " + " ".join(str(p) for p in parts) + ")"


@dataclass(frozen=True)
class Seq:
    element: "FinType"

    def __str__(self):
        return f"(Seq {self.element})"


FinType = Union[Nat, Arrow, Seq]
NAT = Nat()


def arrow(*types: FinType) -> FinType:
    """``arrow(A, B, C) == Arrow(A, Arrow(B, C))``."""
    out = types[-1]
    for t in reversed(types[:-1]):
        out = Arrow(t, out)
    return out


def type_level(t: FinType) -> int:
    """Type level: 0 for Nat, ``max(level(dom) + 1, level(cod))`` for arrows."""
    if isinstance(t, Nat):
        return 0
    if isinstance(t, Seq):
        return type_level(t.element)
    return max(type_level(t.domain) + 1, type_level(t.codomain))


# -- terms -----------------------------------------------------------------

@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Lam:
    binder: str
    binder_type: FinType
    body: "Term"


@dataclass(frozen=True)
class App:
    fn: "Term"
    arg: "Term"


@dataclass(frozen=True)
class NatLit:
    value: int


@dataclass(frozen=True)
class Rec:
    """Primitive recursor at type ``rho``: ``rho -> (Nat -> rho -> rho) -> Nat -> rho``."""
    result_type: FinType


@dataclass(frozen=True)
class SeqLit:
    elements: tuple
    element_type: FinType


@dataclass(frozen=True)
class Builtin:
    """Sequence/arithmetic builtin: len, concat, restrict, index, max, succ."""
    op: str
    args: tuple


Term = Union[Var, Lam, App, NatLit, Rec, SeqLit, Builtin]

BUILTIN_ARITY = {"len": 1, "concat": 2, "restrict": 2, "index": 2, "max": 1, "succ": 1}


def apply(fn: Term, *args: Term) -> Term:
    for a in args:
        fn = App(fn, a)
    return fn


def spine(term: Term) -> tuple[Term, list]:
    """Split ``f a b c`` into ``(f, [a, b, c])``."""
    args = []
    while isinstance(term, App):
        args.append(term.arg)
        term = term.fn
    return term, args[::-1]


def free_vars(term: Term) -> frozenset:
    if isinstance(term, Var):
        return frozenset([term.name])
    if isinstance(term, Lam):
        return free_vars(term.body) - {term.binder}
    if isinstance(term, App):
        return free_vars(term.fn) | free_vars(term.arg)
    if isinstance(term, SeqLit):
        return frozenset().union(*(free_vars(e) for e in term.elements))
    if isinstance(term, Builtin):
        return frozenset().union(*(free_vars(a) for a in term.args))
    return frozenset()


def is_closed(term: Term) -> bool:
    return not free_vars(term)


def fresh_name(base: str, avoid) -> str:
    if base not in avoid:
        return base
    i = 1
    while f"{base}{i}" in avoid:
        i += 1
    return f"{base}{i}"


def substitute(term: Term, name: str, replacement: Term) -> Term:
    """Capture-avoiding substitution of ``replacement`` for free ``name``."""
    if isinstance(term, Var):
        return replacement if term.name == name else term
    if isinstance(term, App):
        return App(substitute(term.fn, name, replacement), substitute(term.arg, name, replacement))
    if isinstance(term, SeqLit):
        return SeqLit(tuple(substitute(e, name, replacement) for e in term.elements), term.element_type)
    if isinstance(term, Builtin):
        return Builtin(term.op, tuple(substitute(a, name, replacement) for a in term.args))
    if isinstance(term, Lam):
        if term.binder == name:
            return term
        rfv = free_vars(replacement)
        if term.binder in rfv:
            new = fresh_name(term.binder, rfv | free_vars(term.body) | {name})
            body = substitute(term.body, term.binder, Var(new))
            return Lam(new, term.binder_type, substitute(body, name, replacement))
        return Lam(term.binder, term.binder_type, substitute(term.body, name, replacement))
    return term


def rename_vars(term: Term, mapping: dict) -> Term:
    """Rename free variables simultaneously (targets assumed fresh)."""
    if not mapping:
        return term
    if isinstance(term, Var):
        return Var(mapping.get(term.name, term.name))
    if isinstance(term, App):
        return App(rename_vars(term.fn, mapping), rename_vars(term.arg, mapping))
    if isinstance(term, SeqLit):
        return SeqLit(tuple(rename_vars(e, mapping) for e in term.elements), term.element_type)
    if isinstance(term, Builtin):
        return Builtin(term.op, tuple(rename_vars(a, mapping) for a in term.args))
    if isinstance(term, Lam):
        inner = {k: v for k, v in mapping.items() if k != term.binder}
        return Lam(term.binder, term.binder_type, rename_vars(term.body, inner))
    return term


# -- typing ----------------------------------------------------------------

def _expect(actual: FinType, expected: FinType, what: str):
    if actual != expected:
        raise TypeMismatch(f"{what}: expected {expected}, got {actual}")


def type_check(term: Term, context: dict | None = None) -> FinType:
    """Return the unique type of ``term`` under ``context`` (name -> FinType)."""
    ctx = dict(context or {})
    if isinstance(term, Var):
        if term.name not in ctx:
            raise UnboundVariable(term.name)
        return ctx[term.name]
    if isinstance(term, NatLit):
        if term.value < 0:
            raise TypeMismatch("negative literal")
        return NAT
    if isinstance(term, Lam):
        ctx[term.binder] = term.binder_type
        return Arrow(term.binder_type, type_check(term.body, ctx))
    if isinstance(term, App):
        ft = type_check(term.fn, ctx)
        if not isinstance(ft, Arrow):
            raise TypeMismatch(f"cannot apply a term of type {ft}")
        _expect(type_check(term.arg, ctx), ft.domain, "argument")
        return ft.codomain
    if isinstance(term, Rec):
        rho = term.result_type
        return arrow(rho, arrow(NAT, rho, rho), NAT, rho)
    if isinstance(term, SeqLit):
        for e in term.elements:
            _expect(type_check(e, ctx), term.element_type, "sequence element")
        return Seq(term.element_type)
    if isinstance(term, Builtin):
        arity = BUILTIN_ARITY.get(term.op)
        if arity is None:
            raise TypeMismatch(f"unknown builtin {term.op}")
        if len(term.args) != arity:
            raise TypeMismatch(f"{term.op} takes {arity} argument(s)")
        ts = [type_check(a, ctx) for a in term.args]
        if term.op == "succ":
            _expect(ts[0], NAT, "succ")
            return NAT
        if not isinstance(ts[0], Seq):
            raise TypeMismatch(f"{term.op} expects a sequence, got {ts[0]}")
        if term.op == "len":
            return NAT
        if term.op == "max":
            _expect(ts[0], Seq(NAT), "max")
            return NAT
        if term.op == "concat":
            _expect(ts[1], ts[0], "concat")
            return ts[0]
        if term.op == "restrict":
            _expect(ts[1], NAT, "restrict bound")
            return ts[0]
        if term.op == "index":
            _expect(ts[1], NAT, "index")
            return ts[0].element
    raise TypeMismatch(f"not a term: {term!r}")


# -- evaluation ------------------------------------------------------------

def seq_max(s) -> int:
    """Maximum of a finite sequence of naturals; 0 for the empty sequence."""
    return max(s, default=0)


def restrict(s, n: int):
    if not 0 <= n < len(s):
        raise OutOfDomain(f"restrict needs N < |s| (N={n}, |s|={len(s)})")
    return tuple(s[: n + 1])


def index(s, i: int):
    if not 0 <= i < len(s):
        raise OutOfDomain(f"index {i} outside sequence of length {len(s)}")
    return s[i]


def _rec_value(base):
    def with_step(step):
        def at(n):
            acc = base
            for i in range(n):
                acc = step(i)(acc)
            return acc
        return at
    return with_step


def _eval(term: Term, env: dict):
    if isinstance(term, Var):
        try:
            return env[term.name]
        except KeyError:
            raise UnboundVariable(term.name) from None
    if isinstance(term, NatLit):
        return term.value
    if isinstance(term, Lam):
        def closure(v, _t=term, _env=env):
            inner = dict(_env)
            inner[_t.binder] = v
            return _eval(_t.body, inner)
        return closure
    if isinstance(term, App):
        return _eval(term.fn, env)(_eval(term.arg, env))
    if isinstance(term, Rec):
        return _rec_value
    if isinstance(term, SeqLit):
        return tuple(_eval(e, env) for e in term.elements)
    if isinstance(term, Builtin):
        vals = [_eval(a, env) for a in term.args]
        op = term.op
        if op == "succ":
            return vals[0] + 1
        if op == "len":
            return len(vals[0])
        if op == "max":
            return seq_max(vals[0])
        if op == "concat":
            return tuple(vals[0]) + tuple(vals[1])
        if op == "restrict":
            return restrict(vals[0], vals[1])
        if op == "index":
            return index(vals[0], vals[1])
    raise TermError(f"cannot evaluate {term!r}")


def evaluate(term: Term, args=(), env: dict | None = None):
    """Evaluate ``term`` and apply the result to ``args`` in order."""
    value = _eval(term, dict(env or {}))
    for a in args:
        value = value(a)
    return value


# -- concrete syntax -------------------------------------------------------

def parse_type(x) -> FinType:
    if isinstance(x, str):
        x = sexp.read(x)
    if is_atom(x):
        if x.text in ("Nat", "0"):
            return NAT
        raise SExpSyntaxError(f"unknown type {x.text!r}", x.position)
    if not x:
        raise SExpSyntaxError("empty type", x.position)
    head = x[0]
    if is_atom(head, "->"):
        if len(x) < 3:
            raise SExpSyntaxError("arrow type needs at least two components", x.position)
        return arrow(*(parse_type(y) for y in x[1:]))
    if is_atom(head, "Seq"):
        if len(x) != 2:
            raise SExpSyntaxError("Seq takes one element type", x.position)
        return Seq(parse_type(x[1]))
    raise SExpSyntaxError("malformed type", x.position)


def _parse_binder(b):
    if not isinstance(b, list) or len(b) != 2 or not is_atom(b[0]):
        raise SExpSyntaxError("binder must look like (x T)", getattr(b, "position", 0))
    return b[0].text, parse_type(b[1])


def parse_term(x) -> Term:
    """Parse the term syntax, e.g. ``(lam (x Nat) (succ x))`` or ``(restrict (seq 7 8 9) 1)``."""
    if isinstance(x, str):
        x = sexp.read(x)
    if is_atom(x):
        if x.text.isdigit():
            return NatLit(int(x.text))
        return Var(x.text)
    if not x:
        raise SExpSyntaxError("empty application", x.position)
    head = x[0]
    if is_atom(head):
        h = head.text
        if h == "lam":
            if len(x) < 3:
                raise SExpSyntaxError("lam needs binders and a body", x.position)
            body = parse_term(x[-1])
            for b in reversed(x[1:-1]):
                name, ty = _parse_binder(b)
                body = Lam(name, ty, body)
            return body
        if h == "seq":
            elems = tuple(parse_term(y) for y in x[1:])
            if not elems:
                raise SExpSyntaxError("empty (seq) needs a type: use (nil T)", x.position)
            elem_type = _literal_type(elems[0])
            return SeqLit(elems, elem_type)
        if h == "nil":
            if len(x) != 2:
                raise SExpSyntaxError("nil takes one element type", x.position)
            return SeqLit((), parse_type(x[1]))
        if h == "rec":
            if len(x) != 2:
                raise SExpSyntaxError("rec takes one result type", x.position)
            return Rec(parse_type(x[1]))
        if h in BUILTIN_ARITY:
            args = tuple(parse_term(y) for y in x[1:])
            if len(args) != BUILTIN_ARITY[h]:
                raise SExpSyntaxError(f"{h} takes {BUILTIN_ARITY[h]} argument(s)", x.position)
            return Builtin(h, args)
    if len(x) == 1:
        raise SExpSyntaxError("application needs an argument", x.position)
    return apply(parse_term(head), *(parse_term(y) for y in x[1:]))


def _literal_type(t: Term) -> FinType:
    # element type of a (seq ...) literal is read off its first element
    try:
        return type_check(t, {})
    except UnboundVariable:
        return NAT


def format_term(term: Term) -> str:
    if isinstance(term, Var):
        return term.name
    if isinstance(term, NatLit):
        return str(term.value)
    if isinstance(term, Lam):
        return f"(lam ({term.binder} {term.binder_type}) {format_term(term.body)})"
    if isinstance(term, App):
        head, args = spine(term)
        return "(" + " ".join(format_term(t) for t in [head, *args]) + ")"
    if isinstance(term, Rec):
        return f"(rec {term.result_type})"
    if isinstance(term, SeqLit):
        if not term.elements:
            return f"(nil {term.element_type})"
        return "(seq " + " ".join(format_term(e) for e in term.elements) + ")"
    if isinstance(term, Builtin):
        return "(" + " ".join([term.op, *(format_term(a) for a in term.args)]) + ")"
    raise TermError(f"cannot format {term!r}")
