"""Rewrite rules turning external implications into normal forms.

Every rule is a function ``Formula -> Formula`` addressed by name in
:data:`RULES`; a :class:`RewriteTrace` records the rule, the position it was
applied at and any fresh names it introduced, so traces replay exactly.

Rule order used by :func:`normalize_implication`: macro expansion, pulling
standard quantifiers, contraposed idealisation (innermost first), collapse by
maximum, witness functional, dropping ``st`` in the antecedent, final pull.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

from . import formulas as fm
from . import terms
from .formulas import (And, Atom, ExistsIn, Implies, Not, Or, Quant, St,
                       build_prefix, is_internal, is_normal_form, split_prefix)
from .terms import NAT, Var


class RewriteError(Exception):
    pass


class ShapeMismatch(RewriteError):
    pass


class NotMonotone(RewriteError):
    pass


class BlockedByBinding(RewriteError):
    pass


class PipelineStuck(RewriteError):
    def __init__(self, message, subformula=None):
        super().__init__(message)
        self.subformula = subformula


# -- pulling standard quantifiers -------------------------------------------

def _flip(prefix):
    return [(fm.DUAL[k], v, t) for k, v, t in prefix]


def _merge(left, right):
    """Interleave two independent prefixes, universals first where possible."""
    out, i, j = [], 0, 0
    while i < len(left) and j < len(right):
        if left[i][0] == "forall-st":
            out.append(left[i]); i += 1
        elif right[j][0] == "forall-st":
            out.append(right[j]); j += 1
        else:
            out.append(left[i]); i += 1
    return out + left[i:] + right[j:]


def _pull(f):
    if isinstance(f, Quant):
        prefix, matrix = _pull(f.body)
        if f.is_st:
            return [(f.kind, f.var, f.type)] + prefix, matrix
        same = fm.ST_KIND[f.kind]
        n = 0
        while n < len(prefix) and prefix[n][0] == same:
            n += 1
        return prefix[:n], Quant(f.kind, f.var, f.type, build_prefix(prefix[n:], matrix))
    if isinstance(f, ExistsIn):
        prefix, matrix = _pull(f.body)
        n = 0
        while n < len(prefix) and prefix[n][0] == "exists-st":
            n += 1
        return prefix[:n], ExistsIn(f.var, f.seq, build_prefix(prefix[n:], matrix))
    if isinstance(f, Not):
        prefix, matrix = _pull(f.body)
        return _flip(prefix), Not(matrix)
    if isinstance(f, (And, Or)):
        pl, ml = _pull(f.left)
        pr, mr = _pull(f.right)
        return _merge(pl, pr), type(f)(ml, mr)
    if isinstance(f, Implies):
        pa, ma = _pull(f.ante)
        pc, mc = _pull(f.cons)
        return _merge(_flip(pa), pc), Implies(ma, mc)
    return [], f


def _check_unique_binders(f):
    seen = set(fm.free_vars(f))
    for _, g in fm.walk(f):
        if isinstance(g, (Quant, ExistsIn)):
            if g.var in seen:
                raise BlockedByBinding(f"binder {g.var!r} is not unique; alpha-normalize first")
            seen.add(g.var)


def pull_standard_quantifiers(f):
    """Move st-quantifiers outward as far as classical prenexing allows.

    A standard quantifier passes an internal one only when both are of the
    same kind; ``(forall-st n) A -> B`` becomes ``(exists-st n)(A -> B)``.
    """
    _check_unique_binders(f)
    prefix, matrix = _pull(f)
    return build_prefix(prefix, matrix)


# -- negation and contraposition -------------------------------------------

_NEG_REL = {"=": "!=", "!=": "=", "true": "false", "false": "true"}


def negate(f):
    """Push a negation inward through connectives and quantifiers."""
    if isinstance(f, Not):
        return f.body
    if isinstance(f, Atom):
        if f.rel in _NEG_REL:
            return Atom(_NEG_REL[f.rel], f.args)
        if f.rel == "<=":
            return Atom("<", (f.args[1], f.args[0]))
        if f.rel == "<":
            return Atom("<=", (f.args[1], f.args[0]))
        return Not(f)
    if isinstance(f, And):
        return Or(negate(f.left), negate(f.right))
    if isinstance(f, Or):
        return And(negate(f.left), negate(f.right))
    if isinstance(f, Implies):
        return And(f.ante, negate(f.cons))
    if isinstance(f, Quant):
        return Quant(fm.DUAL[f.kind], f.var, f.type, negate(f.body))
    return Not(f)


def contrapose(f):
    """``A -> B`` to ``not B -> not A`` with negations pushed inward."""
    if not isinstance(f, Implies):
        raise ShapeMismatch("contrapose expects an implication")
    return Implies(negate(f.cons), negate(f.ante))


# -- idealisation and collapse ----------------------------------------------

def _idealisation_parts(f):
    block = []
    g = f
    while isinstance(g, Quant) and g.kind == "forall":
        block.append((g.kind, g.var, g.type))
        g = g.body
    if not (isinstance(g, Quant) and g.kind == "exists-st"):
        raise ShapeMismatch("expected (forall ...)(exists-st n) psi")
    if not is_internal(g.body):
        raise ShapeMismatch("the matrix under exists-st must be internal")
    return block, g


def contrapose_idealisation(f, z: str | None = None):
    """``(forall xs)(exists-st n) psi`` to ``(exists-st z)(forall xs)(exists n in z) psi``."""
    block, g = _idealisation_parts(f)
    z = z or terms.fresh_name("z", fm.all_names(f))
    body = build_prefix(block, ExistsIn(g.var, Var(z), g.body))
    return Quant("exists-st", z, terms.Seq(g.type), body)


def _polar_atoms(f, positive=True):
    """Yield ``(atom, polarity)`` for every atom-like node in ``f``."""
    if isinstance(f, (Atom, St, fm.Macro)):
        yield f, positive
    elif isinstance(f, Not):
        yield from _polar_atoms(f.body, not positive)
    elif isinstance(f, Implies):
        yield from _polar_atoms(f.ante, not positive)
        yield from _polar_atoms(f.cons, positive)
    elif isinstance(f, (And, Or)):
        yield from _polar_atoms(f.left, positive)
        yield from _polar_atoms(f.right, positive)
    elif isinstance(f, (Quant, ExistsIn)):
        yield from _polar_atoms(f.body, positive)


def _polar_nodes(f, target, positive=True):
    """Yield ``(path, polarity)`` of subformulas satisfying ``target``."""
    def go(g, path, pol):
        if target(g):
            yield path, pol
            return
        if isinstance(g, Not):
            yield from go(g.body, path + (0,), not pol)
        elif isinstance(g, Implies):
            yield from go(g.ante, path + (0,), not pol)
            yield from go(g.cons, path + (1,), pol)
        else:
            for i, k in enumerate(fm.children(g)):
                yield from go(k, path + (i,), pol)
    yield from go(f, (), positive)


def _mentions(t, name):
    return name in terms.free_vars(t)


def collapse_witness_by_max(f, K: str | None = None):
    """``(exists-st z) Body`` to ``(exists-st K) Body'`` replacing ``exists n in z``.

    When ``n`` occurs only as a lower bound ``n <= t`` in negative position
    the membership quantifier disappears and ``n`` becomes ``K``; otherwise
    it turns into the bounded ``(exists n)(n <= K and ...)``.
    """
    if not (isinstance(f, Quant) and f.kind == "exists-st" and f.type == terms.Seq(NAT)):
        raise ShapeMismatch("expected (exists-st z (Seq Nat)) ...")
    z = f.var
    body = f.body
    K = K or terms.fresh_name("K", fm.all_names(f))
    sites = list(_polar_nodes(body, lambda g: isinstance(g, ExistsIn) and g.seq == Var(z)))
    if not sites:
        raise ShapeMismatch(f"no (exists-in (n {z})) occurs in the body")
    for path, pol in sites:
        if not pol:
            raise NotMonotone(f"exists-in over {z} occurs negatively")
    # z may occur nowhere else
    stripped = body
    for path, _ in sites:
        stripped = fm.replace_at(stripped, path, fm.TRUE)
    if z in fm.free_vars(stripped):
        raise NotMonotone(f"{z} occurs outside membership quantifiers")
    for path, _ in sorted(sites, reverse=True):
        node = fm.subformula(body, path)
        n, chi = node.var, node.body
        lower_only = True
        for atom, pol in _polar_atoms(chi):
            ts = fm.atom_terms(atom)
            if not any(_mentions(t, n) for t in ts):
                continue
            if isinstance(atom, Atom) and atom.rel in ("<=", "<") and _mentions(atom.args[1], n):
                raise NotMonotone(f"{n} occurs in an upper-bound position")
            if not (isinstance(atom, Atom) and atom.rel == "<=" and atom.args[0] == Var(n)
                    and not _mentions(atom.args[1], n) and not pol):
                lower_only = False
        if any(isinstance(g, (Quant, ExistsIn)) and g.var == K for _, g in fm.walk(chi)):
            raise BlockedByBinding(f"{K} is bound inside the matrix")
        if lower_only:
            new = fm.subst(chi, n, Var(K))
        else:
            new = Quant("exists", n, NAT, And(Atom("<=", (Var(n), Var(K))), chi))
        body = fm.replace_at(body, path, new)
    return Quant("exists-st", K, NAT, body)


# -- witness functionals -----------------------------------------------------

def _st_chain(f, kind):
    out = []
    while isinstance(f, Quant) and f.kind == kind:
        out.append((f.var, f.type))
        f = f.body
    return out, f


def introduce_witness_functional(f, names=None, drop_antecedent_st: bool = False):
    """``[(forall-st xs)(exists-st ys) D] -> G`` to ``(forall-st Psi)[(forall-st xs) D[ys:=Psi(xs)] -> G]``.

    Arguments of each ``Psi`` are ordered by type level (numbers first).
    With ``drop_antecedent_st`` the remaining ``st`` in the antecedent is
    dropped as well.
    """
    if not isinstance(f, Implies):
        raise ShapeMismatch("expected an implication")
    ante, goal = f.ante, f.cons
    if not is_normal_form(ante) or not is_normal_form(goal):
        raise ShapeMismatch("both sides must be normal forms")
    xs, rest = _st_chain(ante, "forall-st")
    ys, matrix = _st_chain(rest, "exists-st")
    if not ys:
        raise ShapeMismatch("antecedent has no exists-st block")
    avoid = fm.all_names(f)
    if names is None:
        names = []
        for i in range(len(ys)):
            nm = terms.fresh_name("Psi" if len(ys) == 1 else f"Psi{i}", avoid)
            avoid.add(nm)
            names.append(nm)
    args = sorted(xs, key=lambda vt: terms.type_level(vt[1]))
    psis = []
    for (y, yty), nm in zip(ys, names):
        ty = terms.arrow(*(t for _, t in args), yty) if args else yty
        psis.append((nm, ty))
        matrix = fm.subst(matrix, y, terms.apply(Var(nm), *(Var(v) for v, _ in args)))
    kind = "forall" if drop_antecedent_st else "forall-st"
    new_ante = build_prefix([(kind, v, t) for v, t in xs], matrix)
    return build_prefix([("forall-st", nm, ty) for nm, ty in psis], Implies(new_ante, goal))


def drop_antecedent_st(f):
    """``(forall-st Psi)[(forall-st xs) D -> G]`` to ``(forall-st Psi)[(forall xs) D -> G]``."""
    psis, imp = _st_chain(f, "forall-st")
    if not isinstance(imp, Implies):
        raise ShapeMismatch("expected (forall-st ...)[A -> G]")
    xs, matrix = _st_chain(imp.ante, "forall-st")
    if not xs or not is_internal(matrix):
        raise ShapeMismatch("antecedent must be (forall-st xs) internal")
    new_ante = build_prefix([("forall", v, t) for v, t in xs], matrix)
    return build_prefix([("forall-st", v, t) for v, t in psis], Implies(new_ante, imp.cons))


# -- Omega as an unbounded lower bound --------------------------------------

def _omega_vars(f):
    parts = []
    while isinstance(f, And):
        parts.append(f.left)
        f = f.right
    parts.append(f)
    out = []
    for p in parts:
        if isinstance(p, Not) and isinstance(p.body, St) and isinstance(p.body.term, Var):
            out.append(p.body.term)
        else:
            return None
    return out


def omega_bound(f, names=None):
    """Rewrite hypotheses ``N in Omega`` as ``(forall-st n)(n <= N)``.

    Valid in the nonstandard theory (a number is nonstandard iff it exceeds
    every standard number) but not in the all-standard finite models, so it
    is excluded from truth-preservation checks.
    """
    names = list(names) if names is not None else None
    avoid = fm.all_names(f)
    used = []

    def go(g):
        if isinstance(g, Implies):
            vs = _omega_vars(g.ante)
            if vs:
                if names is not None:
                    n = names[len(used)]
                else:
                    n = terms.fresh_name("n", avoid)
                avoid.add(n)
                used.append(n)
                bound = fm.conj(*(Atom("<=", (Var(n), v)) for v in vs))
                return Implies(Quant("forall-st", n, NAT, bound), go(g.cons))
        return fm.with_children(g, [go(k) for k in fm.children(g)])

    out = go(f)
    if not used:
        raise ShapeMismatch("no (in-omega N) hypotheses found")
    return out


# -- rule table and traces ----------------------------------------------------

RULES = {
    "expand-macros": lambda f: fm.expand_macros(f),
    "omega-bound": omega_bound,
    "pull": pull_standard_quantifiers,
    "contrapose": contrapose,
    "idealise": contrapose_idealisation,
    "collapse": collapse_witness_by_max,
    "witness": introduce_witness_functional,
    "drop-st": drop_antecedent_st,
}

# rules sound in P but not truth-preserving in all-standard finite models
NONSTANDARD_ONLY = frozenset({"omega-bound"})


@dataclass(frozen=True)
class RewriteStep:
    rule: str
    position: tuple
    before: fm.Formula
    after: fm.Formula
    args: dict = field(default_factory=dict, hash=False, compare=False)

    def to_json(self):
        out = {
            "rule": self.rule,
            "position": list(self.position),
            "before": fm.format_formula(self.before),
            "after": fm.format_formula(self.after),
        }
        if self.args:
            out["args"] = self.args
        return out


@dataclass
class RewriteTrace:
    steps: list
    final: fm.Formula

    def to_json(self):
        return [s.to_json() for s in self.steps]

    def dumps(self):
        return json.dumps(self.to_json(), indent=2)

    def formulas(self):
        if not self.steps:
            return [self.final]
        return [self.steps[0].before] + [s.after for s in self.steps]


def apply_rule(rule: str, formula, position=(), **args):
    sub = fm.subformula(formula, position)
    new = RULES[rule](sub, **args)
    return fm.replace_at(formula, position, new)


def replay(trace: RewriteTrace) -> bool:
    """Re-apply every step; True iff each reproduces its recorded after-formula."""
    for step in trace.steps:
        again = apply_rule(step.rule, step.before, step.position, **step.args)
        if again != step.after:
            return False
    return not trace.steps or trace.steps[-1].after == trace.final


class _Pipeline:
    def __init__(self, formula):
        self.state = formula
        self.steps = []

    def names(self):
        return fm.all_names(self.state)

    def fresh(self, base):
        return terms.fresh_name(base, self.names())

    def apply(self, rule, path=(), **args):
        path = tuple(path)
        after = apply_rule(rule, self.state, path, **args)
        if after == self.state:
            return False
        self.steps.append(RewriteStep(rule, path, self.state, after, dict(args)))
        self.state = after
        return True

    def sub(self, path):
        return fm.subformula(self.state, path)

    # components: strip a quantifier prefix, then the children of a connective
    def components(self, path):
        path = tuple(path)
        g = self.sub(path)
        while isinstance(g, Quant):
            path += (0,)
            g = g.body
        if isinstance(g, (And, Or, Not)):
            return [path + (i,) for i in range(len(fm.children(g)))]
        if isinstance(g, Implies):
            return [path + (1,), path + (0,)]
        return []

    def normalize(self, path, style="pointwise"):
        path = tuple(path)
        if is_normal_form(self.sub(path)):
            return
        for cp in self.components(path):
            self.normalize(cp, style)
        # witness functional at an implication between normal forms
        wpath = path
        g = self.sub(path)
        while isinstance(g, Quant) and g.kind == "forall-st":
            wpath += (0,)
            g = g.body
        if isinstance(g, Implies) and is_normal_form(g.ante) and is_normal_form(g.cons):
            _, rest = _st_chain(g.ante, "forall-st")
            if isinstance(rest, Quant) and rest.kind == "exists-st":
                ys, _ = _st_chain(rest, "exists-st")
                names = []
                for i in range(len(ys)):
                    nm = terms.fresh_name("Psi" if len(ys) == 1 else f"Psi{i}", self.names() | set(names))
                    names.append(nm)
                self.apply("witness", wpath, names=names)
                self.apply("drop-st", wpath)
        self.apply("pull", path)
        guard = 0
        while not is_normal_form(self.sub(path)):
            guard += 1
            if guard > 32 or not self.fix_blocked(path):
                raise PipelineStuck("no rule applies", self.sub(path))
            self.apply("pull", path)

    def fix_blocked(self, path):
        """Idealise and collapse the innermost blocked exists-st under path."""
        candidates = []
        for rel, g in fm.walk(self.sub(path)):
            if isinstance(g, Quant) and g.kind == "forall":
                try:
                    _idealisation_parts(g)
                except ShapeMismatch:
                    continue
                candidates.append(rel)
        # only block heads: drop candidates whose parent is also a candidate
        heads = [c for c in candidates if c[:-1] not in candidates or not c]
        if not heads:
            return False
        target = path + max(heads, key=len)
        z = self.fresh("z")
        self.apply("idealise", target, z=z)
        self.apply("collapse", target, K=self.fresh("K"))
        return True

    def monotone_witnesses(self, path):
        """Idealise and collapse every exists-st over an internal body (bounded style)."""
        targets = [rel for rel, g in fm.walk(self.sub(path))
                   if isinstance(g, Quant) and g.kind == "exists-st"
                   and g.type == NAT and is_internal(g.body)]
        for rel in sorted(targets, key=len, reverse=True):
            target = path + rel
            self.apply("idealise", target, z=self.fresh("z"))
            self.apply("collapse", target, K=self.fresh("K"))


def _consequent_style(cons):
    prefix, _ = split_prefix(pull_standard_quantifiers(fm.freshen(fm.expand_macros(cons))))
    return "pointwise" if any(k == "forall-st" for k, _, _ in prefix) else "bounded"


def normalize_implication(ante, cons, shared=(), style: str | None = None) -> RewriteTrace:
    """Normal form of ``(forall-st shared)[ante -> cons]`` with its rewrite trace.

    ``style`` controls the consequent: ``"pointwise"`` pulls first and then
    contraposes the matrix; ``"bounded"`` contraposes first and collapses the
    witness into a monotone bound ``(exists i <= n)``.  By default the
    bounded style is used when the consequent has no standard universal.
    """
    style = style or _consequent_style(cons)
    formula = build_prefix([("forall-st", v, t) for v, t in shared], Implies(ante, cons))
    p = _Pipeline(fm.freshen(formula))
    root = tuple(0 for _ in shared)
    p.apply("expand-macros")
    if any(isinstance(g, Not) and isinstance(g.body, St) for _, g in fm.walk(p.state)):
        try:
            p.apply("omega-bound", names=[p.fresh("n")])
        except ShapeMismatch:
            pass
    cpath, apath = root + (1,), root + (0,)
    if style == "pointwise":
        p.normalize(cpath, style)
        _, matrix_path = _prefix_path(p.sub(cpath))
        if isinstance(fm.subformula(p.sub(cpath), matrix_path), Implies):
            p.apply("contrapose", cpath + matrix_path)
    else:
        _, matrix_path = _prefix_path(p.sub(cpath))
        p.apply("contrapose", cpath + matrix_path)
        p.monotone_witnesses(cpath)
        p.normalize(cpath, style)
    p.normalize(apath, style)
    p.normalize((), style)
    if not is_normal_form(p.state):
        raise PipelineStuck("pipeline ended outside normal form", p.state)
    return RewriteTrace(p.steps, p.state)


def _prefix_path(f):
    path = ()
    while isinstance(f, Quant):
        f = f.body
        path += (0,)
    return f, path


def normalize_formula(f, style: str | None = None) -> RewriteTrace:
    """Normalize a formula read from a file: ``(forall-st ...)(=> A B)`` or any formula."""
    shared = []
    g = f
    while isinstance(g, Quant) and g.kind == "forall-st":
        shared.append((g.var, g.type))
        g = g.body
    if isinstance(g, Implies):
        return normalize_implication(g.ante, g.cons, shared, style)
    p = _Pipeline(fm.freshen(f))
    p.apply("expand-macros")
    p.normalize(())
    return RewriteTrace(p.steps, p.state)


# -- Herbrand terms to single bounds ----------------------------------------

def herbrand_to_bound(t, context=None, monotone_matrix=None, witness: str | None = None):
    """Compose a sequence-valued term with ``max``: ``lam xs. max (t xs)``.

    ``t`` must have type ``A1 -> ... -> An -> Seq Nat``; when a matrix and
    its witness variable are given, the witness must not occur as an upper
    bound in it.
    """
    ty = terms.type_check(t, context or {})
    arg_types = []
    while isinstance(ty, terms.Arrow):
        arg_types.append(ty.domain)
        ty = ty.codomain
    if ty != terms.Seq(NAT):
        raise terms.TypeMismatch(f"expected a term producing Seq Nat, got {ty}")
    if monotone_matrix is not None and witness is not None:
        for atom, _ in _polar_atoms(monotone_matrix):
            if isinstance(atom, Atom) and atom.rel in ("<=", "<") and _mentions(atom.args[1], witness):
                raise NotMonotone(f"{witness} occurs in an upper-bound position")
    avoid = terms.free_vars(t) | set((context or {}).keys())
    names = []
    for i, _ in enumerate(arg_types):
        nm = terms.fresh_name(f"x{i}", avoid | set(names))
        names.append(nm)
    body = terms.Builtin("max", (terms.apply(t, *(Var(n) for n in names)),))
    for nm, aty in reversed(list(zip(names, arg_types))):
        body = terms.Lam(nm, aty, body)
    return body


def bound_instance(normal_form, bound_name: str = "s"):
    """From ``(forall-st xs)(exists-st n) M`` build ``(forall xs) M[n := s(xs)]``."""
    xs, rest = _st_chain(normal_form, "forall-st")
    ys, matrix = _st_chain(rest, "exists-st")
    if len(ys) != 1 or not is_internal(matrix):
        raise ShapeMismatch("expected (forall-st xs)(exists-st n) internal")
    y, _ = ys[0]
    matrix = fm.subst(matrix, y, terms.apply(Var(bound_name), *(Var(v) for v, _ in xs)))
    return build_prefix([("forall", v, t) for v, t in xs], matrix)
