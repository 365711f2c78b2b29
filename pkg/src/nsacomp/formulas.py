"""Internal/external formulas over the term language.

Quantifier kinds are ``forall``, ``exists``, ``forall-st`` and ``exists-st``;
``exists-in`` is the bounded membership quantifier ``(exists n in z)``.
Macro atoms ``approx``, ``req`` and ``in-omega`` stay as :class:`Macro`
nodes until :func:`expand_macros` is called, except ``in-omega`` which the
parser expands to ``(not (st N))`` immediately.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Union

from . import sexp, terms
from .sexp import SExpSyntaxError, is_atom
from .terms import NAT, Term, Var


class FormulaError(Exception):
    pass


class ArityError(FormulaError):
    pass


class NotInternal(FormulaError):
    pass


# relation name -> arity; "close a b k" reads |a - b| <= 1/k and
# "mono a b" reads 0 <= a <= b <= 1 for rational codes a, b
RELATIONS = {"=": 2, "!=": 2, "<=": 2, "<": 2, "close": 3, "mono": 2, "true": 0, "false": 0}
MACROS = {"approx": 2, "req": 2, "in-omega": 1}
QUANTIFIERS = ("forall", "exists", "forall-st", "exists-st")
ST_KIND = {"forall": "forall-st", "exists": "exists-st"}
UNST_KIND = {"forall-st": "forall", "exists-st": "exists"}
DUAL = {"forall": "exists", "exists": "forall", "forall-st": "exists-st", "exists-st": "forall-st"}

# closed constants available to formulas, e.g. the sequence term t(f)(k)
SIGNATURE = {
    "t": terms.arrow(terms.arrow(NAT, NAT), NAT, NAT),
}


@dataclass(frozen=True)
class Atom:
    rel: str
    args: tuple = ()


@dataclass(frozen=True)
class St:
    term: Term


@dataclass(frozen=True)
class Not:
    body: "Formula"


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Implies:
    ante: "Formula"
    cons: "Formula"


@dataclass(frozen=True)
class Quant:
    kind: str
    var: str
    type: terms.FinType
    body: "Formula"

    @property
    def is_st(self):
        return self.kind.endswith("-st")


@dataclass(frozen=True)
class ExistsIn:
    """``(exists var in seq) body`` -- a bounded, internal quantifier."""
    var: str
    seq: Term
    body: "Formula"


@dataclass(frozen=True)
class Macro:
    name: str
    args: tuple


Formula = Union[Atom, St, Not, And, Or, Implies, Quant, ExistsIn, Macro]

TRUE = Atom("true")
FALSE = Atom("false")


def forall(var, ty, body):
    return Quant("forall", var, ty, body)


def exists(var, ty, body):
    return Quant("exists", var, ty, body)


def forall_st(var, ty, body):
    return Quant("forall-st", var, ty, body)


def exists_st(var, ty, body):
    return Quant("exists-st", var, ty, body)


def conj(*fs):
    out = fs[-1]
    for f in reversed(fs[:-1]):
        out = And(f, out)
    return out


# -- traversal -------------------------------------------------------------

def children(f: Formula) -> tuple:
    if isinstance(f, Not):
        return (f.body,)
    if isinstance(f, (And, Or)):
        return (f.left, f.right)
    if isinstance(f, Implies):
        return (f.ante, f.cons)
    if isinstance(f, (Quant, ExistsIn)):
        return (f.body,)
    return ()


def with_children(f: Formula, kids) -> Formula:
    kids = tuple(kids)
    if isinstance(f, Not):
        return Not(kids[0])
    if isinstance(f, And):
        return And(*kids)
    if isinstance(f, Or):
        return Or(*kids)
    if isinstance(f, Implies):
        return Implies(*kids)
    if isinstance(f, (Quant, ExistsIn)):
        return replace(f, body=kids[0])
    return f


def subformula(f: Formula, path) -> Formula:
    for i in path:
        f = children(f)[i]
    return f


def replace_at(f: Formula, path, new: Formula) -> Formula:
    if not path:
        return new
    kids = list(children(f))
    kids[path[0]] = replace_at(kids[path[0]], path[1:], new)
    return with_children(f, kids)


def walk(f: Formula, path=()):
    """Yield ``(path, subformula)`` pairs, pre-order."""
    yield path, f
    for i, k in enumerate(children(f)):
        yield from walk(k, path + (i,))


def atom_terms(f: Formula) -> tuple:
    if isinstance(f, Atom):
        return f.args
    if isinstance(f, St):
        return (f.term,)
    if isinstance(f, Macro):
        return f.args
    if isinstance(f, ExistsIn):
        return (f.seq,)
    return ()


def free_vars(f: Formula) -> frozenset:
    out = frozenset().union(*(terms.free_vars(t) for t in atom_terms(f))) if atom_terms(f) else frozenset()
    if isinstance(f, (Quant, ExistsIn)):
        return out | (free_vars(f.body) - {f.var})
    for k in children(f):
        out |= free_vars(k)
    return out


def bound_vars(f: Formula) -> set:
    return {g.var for _, g in walk(f) if isinstance(g, (Quant, ExistsIn))}


def all_names(f: Formula) -> set:
    return set(free_vars(f)) | bound_vars(f)


def subst(f: Formula, name: str, t: Term) -> Formula:
    """Capture-avoiding substitution of term ``t`` for free variable ``name``."""
    if isinstance(f, Atom):
        return Atom(f.rel, tuple(terms.substitute(a, name, t) for a in f.args))
    if isinstance(f, St):
        return St(terms.substitute(f.term, name, t))
    if isinstance(f, Macro):
        return Macro(f.name, tuple(terms.substitute(a, name, t) for a in f.args))
    if isinstance(f, (Quant, ExistsIn)):
        seq = None
        if isinstance(f, ExistsIn):
            seq = terms.substitute(f.seq, name, t)
        if f.var == name:
            return f if seq is None else replace(f, seq=seq)
        body = f.body
        var = f.var
        if var in terms.free_vars(t):
            var = terms.fresh_name(var, all_names(body) | terms.free_vars(t) | {name})
            body = rename_free(body, {f.var: var})
        new = replace(f, var=var, body=subst(body, name, t))
        return new if seq is None else replace(new, seq=seq)
    return with_children(f, [subst(k, name, t) for k in children(f)])


def rename_free(f: Formula, mapping: dict) -> Formula:
    if not mapping:
        return f
    if isinstance(f, Atom):
        return Atom(f.rel, tuple(terms.rename_vars(a, mapping) for a in f.args))
    if isinstance(f, St):
        return St(terms.rename_vars(f.term, mapping))
    if isinstance(f, Macro):
        return Macro(f.name, tuple(terms.rename_vars(a, mapping) for a in f.args))
    if isinstance(f, (Quant, ExistsIn)):
        inner = {k: v for k, v in mapping.items() if k != f.var}
        new = replace(f, body=rename_free(f.body, inner))
        if isinstance(f, ExistsIn):
            new = replace(new, seq=terms.rename_vars(f.seq, mapping))
        return new
    return with_children(f, [rename_free(k, mapping) for k in children(f)])


def freshen(f: Formula, avoid=()) -> Formula:
    """Rename binders so that every bound variable is unique and distinct from free ones."""
    used = set(free_vars(f)) | set(avoid)

    def go(g):
        if isinstance(g, (Quant, ExistsIn)):
            var, body = g.var, g.body
            if var in used:
                new = terms.fresh_name(var, used | all_names(body))
                body = rename_free(body, {var: new})
                var = new
            used.add(var)
            return replace(g, var=var, body=go(body))
        return with_children(g, [go(k) for k in children(g)])

    return go(f)


# -- predicates ------------------------------------------------------------

def is_internal(f: Formula) -> bool:
    """True iff no ``st`` predicate and no st-quantifier occurs in ``f``.

    Macro atoms count by their expansion: ``approx`` hides a standard
    quantifier, ``req`` does not.
    """
    for _, g in walk(f):
        if isinstance(g, St) or (isinstance(g, Quant) and g.is_st):
            return False
        if isinstance(g, Macro) and g.name in ("approx", "in-omega"):
            return False
    return True


def split_prefix(f: Formula):
    """Return ``(prefix, matrix)`` where prefix lists the leading ``Quant`` nodes."""
    prefix = []
    while isinstance(f, Quant):
        prefix.append((f.kind, f.var, f.type))
        f = f.body
    return prefix, f


def build_prefix(prefix, matrix: Formula) -> Formula:
    for kind, var, ty in reversed(prefix):
        matrix = Quant(kind, var, ty, matrix)
    return matrix


def is_normal_form(f: Formula) -> bool:
    """``forall-st`` block, then ``exists-st`` block, then an internal matrix."""
    seen_exists = False
    while isinstance(f, Quant) and f.is_st:
        if f.kind == "forall-st":
            if seen_exists:
                return False
        else:
            seen_exists = True
        f = f.body
    return is_internal(f)


def _bounded_var(f: Quant):
    """If ``f`` is a syntactically bounded number quantifier, return its bound term."""
    if f.type != NAT:
        return None
    body = f.body
    guard = None
    if f.kind == "forall" and isinstance(body, Implies):
        guard = body.ante
    elif f.kind == "exists" and isinstance(body, And):
        guard = body.left
    if isinstance(guard, Atom) and guard.rel in ("<=", "<") and guard.args[0] == Var(f.var):
        bound = guard.args[1]
        if f.var not in terms.free_vars(bound):
            return bound
    return None


def is_bounded_quantifier(f: Formula) -> bool:
    return isinstance(f, Quant) and not f.is_st and _bounded_var(f) is not None


def relativize_st(f: Formula) -> Formula:
    """``f^st``: add ``st`` to every quantifier except bounded number quantifiers."""
    if not is_internal(f):
        raise NotInternal("relativize_st expects an internal formula")
    return _relativize(f)


def _relativize(f):
    if isinstance(f, Quant):
        body = _relativize(f.body)
        kind = f.kind if is_bounded_quantifier(f) else ST_KIND[f.kind]
        return Quant(kind, f.var, f.type, body)
    return with_children(f, [_relativize(k) for k in children(f)])


def erase_st(f: Formula) -> Formula:
    """Drop all ``st`` annotations: st-quantifiers become plain ones, ``st(t)`` becomes true."""
    if isinstance(f, St):
        return TRUE
    if isinstance(f, Quant) and f.is_st:
        return Quant(UNST_KIND[f.kind], f.var, f.type, erase_st(f.body))
    if isinstance(f, Macro) and f.name == "approx":
        return Macro("req", f.args)
    return with_children(f, [erase_st(k) for k in children(f)])


def expand_macros(f: Formula) -> Formula:
    """Replace ``approx``/``req``/``in-omega`` by their quantified definitions."""
    avoid = all_names(f)

    def go(g):
        if isinstance(g, Macro):
            if g.name == "in-omega":
                return Not(St(g.args[0]))
            k = terms.fresh_name("k", avoid | set().union(*(terms.free_vars(a) for a in g.args)))
            avoid.add(k)
            kind = "forall-st" if g.name == "approx" else "forall"
            return Quant(kind, k, NAT, Atom("close", (g.args[0], g.args[1], Var(k))))
        return with_children(g, [go(c) for c in children(g)])

    return go(f)


# -- alpha equivalence -----------------------------------------------------

def _term_alpha_eq(a: Term, b: Term, left: dict, right: dict) -> bool:
    if isinstance(a, Var) and isinstance(b, Var):
        la, rb = left.get(a.name), right.get(b.name)
        if la is None and rb is None:
            return a.name == b.name
        return la is not None and la == rb
    if type(a) is not type(b):
        return False
    if isinstance(a, terms.Lam):
        if a.binder_type != b.binder_type:
            return False
        depth = object()
        return _term_alpha_eq(a.body, b.body, {**left, a.binder: depth}, {**right, b.binder: depth})
    if isinstance(a, terms.App):
        return _term_alpha_eq(a.fn, b.fn, left, right) and _term_alpha_eq(a.arg, b.arg, left, right)
    if isinstance(a, terms.SeqLit):
        return (a.element_type == b.element_type and len(a.elements) == len(b.elements)
                and all(_term_alpha_eq(x, y, left, right) for x, y in zip(a.elements, b.elements)))
    if isinstance(a, terms.Builtin):
        return a.op == b.op and len(a.args) == len(b.args) and all(
            _term_alpha_eq(x, y, left, right) for x, y in zip(a.args, b.args))
    return a == b


def alpha_eq(f: Formula, g: Formula, _left=None, _right=None) -> bool:
    left = _left or {}
    right = _right or {}
    if type(f) is not type(g):
        return False
    if isinstance(f, (Atom, Macro)):
        tag_f = f.rel if isinstance(f, Atom) else f.name
        tag_g = g.rel if isinstance(g, Atom) else g.name
        return tag_f == tag_g and len(f.args) == len(g.args) and all(
            _term_alpha_eq(a, b, left, right) for a, b in zip(f.args, g.args))
    if isinstance(f, St):
        return _term_alpha_eq(f.term, g.term, left, right)
    if isinstance(f, Quant):
        if f.kind != g.kind or f.type != g.type:
            return False
        marker = object()
        return alpha_eq(f.body, g.body, {**left, f.var: marker}, {**right, g.var: marker})
    if isinstance(f, ExistsIn):
        if not _term_alpha_eq(f.seq, g.seq, left, right):
            return False
        marker = object()
        return alpha_eq(f.body, g.body, {**left, f.var: marker}, {**right, g.var: marker})
    return all(alpha_eq(a, b, left, right) for a, b in zip(children(f), children(g)))


# -- concrete syntax -------------------------------------------------------

def _binders(items, position):
    out = []
    for b in items:
        if not isinstance(b, list) or len(b) != 2 or not is_atom(b[0]):
            raise SExpSyntaxError("binder must look like (x T)", getattr(b, "position", position))
        out.append((b[0].text, terms.parse_type(b[1])))
    return out


def _parse(x) -> Formula:
    if is_atom(x):
        if x.text in ("true", "false"):
            return Atom(x.text)
        raise SExpSyntaxError(f"expected a formula, got atom {x.text!r}", x.position)
    if not x or not is_atom(x[0]):
        raise SExpSyntaxError("formula must start with an operator", x.position)
    head = x[0].text
    args = x[1:]
    if head in QUANTIFIERS:
        if len(args) < 2:
            raise SExpSyntaxError(f"{head} needs binders and a body", x.position)
        body = _parse(args[-1])
        for var, ty in reversed(_binders(args[:-1], x.position)):
            body = Quant(head, var, ty, body)
        return body
    if head == "exists-in":
        if len(args) != 2 or not isinstance(args[0], list) or len(args[0]) != 2 or not is_atom(args[0][0]):
            raise SExpSyntaxError("exists-in looks like (exists-in (n z) F)", x.position)
        return ExistsIn(args[0][0].text, terms.parse_term(args[0][1]), _parse(args[1]))
    if head == "not":
        if len(args) != 1:
            raise ArityError("not takes one formula")
        return Not(_parse(args[0]))
    if head in ("and", "or"):
        if len(args) < 2:
            raise ArityError(f"{head} takes at least two formulas")
        parts = [_parse(a) for a in args]
        cls = And if head == "and" else Or
        out = parts[-1]
        for p in reversed(parts[:-1]):
            out = cls(p, out)
        return out
    if head == "=>":
        if len(args) != 2:
            raise ArityError("=> takes two formulas")
        return Implies(_parse(args[0]), _parse(args[1]))
    if head == "st":
        if len(args) != 1:
            raise ArityError("st takes one term")
        return St(terms.parse_term(args[0]))
    if head in MACROS:
        if len(args) != MACROS[head]:
            raise ArityError(f"{head} takes {MACROS[head]} argument(s)")
        ts = tuple(terms.parse_term(a) for a in args)
        if head == "in-omega":
            return Not(St(ts[0]))
        return Macro(head, ts)
    if head in RELATIONS or head.startswith("?"):
        if head in RELATIONS and len(args) != RELATIONS[head]:
            raise ArityError(f"relation {head} takes {RELATIONS[head]} argument(s), got {len(args)}")
        return Atom(head, tuple(terms.parse_term(a) for a in args))
    raise SExpSyntaxError(f"unknown formula operator {head!r}", x.position)


def parse_formula(text) -> Formula:
    """Parse and alpha-normalize a formula."""
    x = sexp.read(text) if isinstance(text, str) else text
    return freshen(_parse(x))


def _fmt_binder_chain(f: Quant):
    kind = f.kind
    binders = []
    while isinstance(f, Quant) and f.kind == kind:
        binders.append(f"({f.var} {f.type})")
        f = f.body
    return kind, binders, f


def format_formula(f: Formula) -> str:
    if isinstance(f, Atom):
        if not f.args:
            return f.rel if f.rel in ("true", "false") else f"({f.rel})"
        return "(" + " ".join([f.rel, *(terms.format_term(a) for a in f.args)]) + ")"
    if isinstance(f, Macro):
        return "(" + " ".join([f.name, *(terms.format_term(a) for a in f.args)]) + ")"
    if isinstance(f, St):
        return f"(st {terms.format_term(f.term)})"
    if isinstance(f, Not):
        return f"(not {format_formula(f.body)})"
    if isinstance(f, (And, Or)):
        cls = type(f)
        parts = []
        while isinstance(f, cls):
            parts.append(f.left)
            f = f.right
        parts.append(f)
        name = "and" if cls is And else "or"
        return f"({name} " + " ".join(format_formula(p) for p in parts) + ")"
    if isinstance(f, Implies):
        return f"(=> {format_formula(f.ante)} {format_formula(f.cons)})"
    if isinstance(f, Quant):
        kind, binders, body = _fmt_binder_chain(f)
        return f"({kind} " + " ".join(binders) + f" {format_formula(body)})"
    if isinstance(f, ExistsIn):
        return f"(exists-in ({f.var} {terms.format_term(f.seq)}) {format_formula(f.body)})"
    raise FormulaError(f"cannot format {f!r}")


# -- typing ----------------------------------------------------------------

def check_formula(f: Formula, context: dict | None = None) -> None:
    """Raise ``TypeMismatch`` unless every atom compares Nat-typed terms."""
    ctx = {**SIGNATURE, **(context or {})}
    if isinstance(f, (Atom, Macro)):
        for a in f.args:
            ty = terms.type_check(a, ctx)
            if ty != NAT:
                raise terms.TypeMismatch(f"atom argument {terms.format_term(a)} has type {ty}")
        return
    if isinstance(f, St):
        terms.type_check(f.term, ctx)
        return
    if isinstance(f, Quant):
        check_formula(f.body, {**ctx, f.var: f.type})
        return
    if isinstance(f, ExistsIn):
        if terms.type_check(f.seq, ctx) != terms.Seq(NAT):
            raise terms.TypeMismatch("exists-in ranges over a Seq Nat")
        check_formula(f.body, {**ctx, f.var: NAT})
        return
    for k in children(f):
        check_formula(k, ctx)
