"""Verification suites shared by the command line and the test-suite.

Each ``suite_*`` function returns a :class:`SuiteResult`; ``mutation`` hooks
let the same harness run against deliberately broken components.
"""
from __future__ import annotations

import itertools
import random
import time
from fractions import Fraction
from dataclasses import dataclass, field
from importlib import resources

from . import ecf
from . import formulas as fm
from . import machines as mc
from . import mct
from . import normalizer as nz
from . import semantics as sm
from . import terms
from .pairing import unpair

NAT = terms.NAT
FUN1 = terms.arrow(NAT, NAT)


@dataclass
class SuiteResult:
    name: str
    passed: bool
    details: dict = field(default_factory=dict)
    seconds: float = 0.0

    def line(self):
        status = "PASS" if self.passed else "FAIL"
        return f"{status} {self.name} ({self.seconds:.2f}s)"


def _timed(name, fn):
    start = time.perf_counter()
    passed, details = fn()
    return SuiteResult(name, passed, details, time.perf_counter() - start)


# -- data files ---------------------------------------------------------------

def data_text(name: str) -> str:
    return resources.files("nsacomp").joinpath("data", name).read_text()


def golden(name: str) -> fm.Formula:
    return fm.parse_formula(data_text(f"golden/{name}.sexp"))


GOLDEN_NAMES = (
    "transfer_normal", "convergence_modulus", "pulled_implication", "witness_functional",
    "dropped_st", "mct_normal_form", "bounded_transfer", "convergence_of_t",
    "restricted_normal_form", "bound_instance",
)

# free variables of the golden formulas
GOLDEN_FREE = {"c": FUN1, "f": FUN1}


def input_formula(name: str) -> fm.Formula:
    return fm.parse_formula(data_text(f"{name}.sexp"))


# -- 1: golden rewrite chain ---------------------------------------------------

def _contains(formulas, target):
    return any(fm.alpha_eq(g, target) for f in formulas for _, g in fm.walk(f))


# golden formulas met in this order while normalizing MCT_ns -> Pi01-TRANS
CHAIN = GOLDEN_NAMES[:6]


def golden_chain():
    """Positions in the trace where each golden formula first appears."""
    out = {}
    trace = nz.normalize_formula(input_formula("mct_to_trans"))
    states = trace.formulas()
    for name in CHAIN:
        target = golden(name)
        hits = [i for i, f in enumerate(states) if any(fm.alpha_eq(g, target) for _, g in fm.walk(f))]
        out[name] = hits[0] if hits else None
    out["replay"] = nz.replay(trace)
    out["final_mct_normal_form"] = fm.alpha_eq(trace.final, golden("mct_normal_form"))
    trace_r = nz.normalize_formula(input_formula("restricted_mct"))
    out["final_restricted_normal_form"] = fm.alpha_eq(trace_r.final, golden("restricted_normal_form"))
    out["replay_restricted"] = nz.replay(trace_r)
    out["bound_instance"] = fm.alpha_eq(nz.bound_instance(trace_r.final), golden("bound_instance"))
    return out


def suite_golden_chain():
    def run():
        d = golden_chain()
        order = [d[n] for n in CHAIN]
        in_order = None not in order and order == sorted(order)
        ok = in_order and all(d[key] for key in (
            "replay", "final_mct_normal_form", "final_restricted_normal_form",
            "replay_restricted", "bound_instance"))
        return ok, {**d, "in_order": in_order}
    return _timed("golden rewrite chain", run)


# -- 2: truth preservation ------------------------------------------------------

class FormulaGen:
    """Seeded random formulas shaped so that each rewrite rule applies."""

    def __init__(self, seed: int):
        self.rng = random.Random(seed)
        self.counter = 0

    def fresh(self, base):
        self.counter += 1
        return f"{base}{self.counter}"

    def term(self, vs):
        r = self.rng
        pool = [terms.Var(v) for v in vs] + [terms.NatLit(0), terms.NatLit(1)]
        t = r.choice(pool)
        if r.random() < 0.3:
            t = terms.App(terms.Var("f"), t)
        return t

    def atom(self, vs, lower_only=None):
        r = self.rng
        if lower_only is not None:
            rest = [v for v in vs if v != lower_only] or ["a"]
            choice = r.randrange(3)
            if choice == 0:
                return fm.Atom("<=", (terms.Var(lower_only), self.term(rest)))
            if choice == 1:
                return fm.Atom("=", (terms.App(terms.Var("f"), terms.Var(lower_only)), self.term(rest)))
            return fm.Atom("!=", (terms.App(terms.Var("f"), terms.Var(lower_only)), self.term(rest)))
        rel = r.choice(["=", "!=", "<=", "<"])
        return fm.Atom(rel, (self.term(vs), self.term(vs)))

    def internal(self, vs, depth, lower_only=None):
        r = self.rng
        if depth <= 0 or r.random() < 0.3:
            return self.atom(vs, lower_only)
        k = r.randrange(4 if lower_only is None else 2)
        if k == 0:
            return fm.And(self.internal(vs, depth - 1, lower_only), self.internal(vs, depth - 1, lower_only))
        if k == 1:
            return fm.Or(self.internal(vs, depth - 1, lower_only), self.internal(vs, depth - 1, lower_only))
        if k == 2:
            return fm.Implies(self.internal(vs, depth - 1), self.internal(vs, depth - 1))
        v = self.fresh("x")
        return fm.Quant(r.choice(["forall", "exists"]), v, NAT, self.internal(vs + [v], depth - 1))

    def external(self, vs, depth):
        r = self.rng
        if depth <= 0 or r.random() < 0.2:
            return self.atom(vs)
        k = r.randrange(6)
        if k == 0:
            return fm.And(self.external(vs, depth - 1), self.external(vs, depth - 1))
        if k == 1:
            return fm.Or(self.external(vs, depth - 1), self.external(vs, depth - 1))
        if k == 2:
            return fm.Implies(self.external(vs, depth - 1), self.external(vs, depth - 1))
        if k == 3:
            return fm.Not(self.external(vs, depth - 1))
        v = self.fresh("x")
        kind = r.choice(fm.QUANTIFIERS)
        return fm.Quant(kind, v, NAT, self.external(vs + [v], depth - 1))

    def normal(self, vs):
        u, w = self.fresh("u"), self.fresh("w")
        return fm.forall_st(u, NAT, fm.exists_st(w, NAT, self.internal(vs + [u, w], 2)))

    def shaped(self, kind):
        vs = ["a"]
        if kind == "pull":
            # a standard quantifier below a connective, so there is something to pull
            v = self.fresh("x")
            inner = fm.Quant(self.rng.choice(("forall-st", "exists-st")), v, NAT, self.external(vs + [v], 2))
            other = self.external(vs, 3)
            make = self.rng.choice((fm.And, fm.Or, fm.Implies))
            return make(inner, other) if self.rng.random() < 0.5 else make(other, inner)
        if kind == "contrapose":
            return fm.Implies(self.external(vs, 2), self.external(vs, 2))
        if kind == "idealise":
            block = [self.fresh("x") for _ in range(self.rng.randrange(3))]
            n = self.fresh("n")
            body = fm.exists_st(n, NAT, self.internal(vs + block + [n], 2))
            return fm.build_prefix([("forall", v, NAT) for v in block], body)
        if kind == "collapse":
            z, n = self.fresh("z"), self.fresh("n")
            block = [self.fresh("x") for _ in range(self.rng.randrange(2))]
            chi = self.internal(vs + block + [n], 2, lower_only=n)
            body = fm.build_prefix([("forall", v, NAT) for v in block], fm.ExistsIn(n, terms.Var(z), chi))
            return fm.Quant("exists-st", z, terms.Seq(NAT), body)
        if kind == "witness":
            x, y = self.fresh("x"), self.fresh("y")
            ante = fm.forall_st(x, NAT, fm.exists_st(y, NAT, self.internal(vs + [x, y], 2)))
            return fm.Implies(ante, self.normal(vs))
        if kind == "drop-st":
            psi, x = self.fresh("Psi"), self.fresh("x")
            d = fm.subst(self.internal(vs + [x, "y0"], 2), "y0", terms.App(terms.Var(psi), terms.Var(x)))
            return fm.forall_st(psi, FUN1, fm.Implies(fm.forall_st(x, NAT, d), self.normal(vs)))
        raise ValueError(kind)


RANDOM_KINDS = ("pull", "contrapose", "idealise", "collapse", "witness", "drop-st")
RANDOM_FREE = {"a": NAT, "f": FUN1}


def random_corpus(count: int = 200, seed: int = 0):
    gen = FormulaGen(seed)
    return [fm.freshen(gen.shaped(RANDOM_KINDS[i % len(RANDOM_KINDS)])) for i in range(count)]


def binder_context(formula, path, free: dict) -> dict:
    """Types of the variables in scope at ``path``."""
    ctx = dict(free)
    g = formula
    for i in path:
        if isinstance(g, fm.Quant):
            ctx[g.var] = g.type
        elif isinstance(g, fm.ExistsIn):
            seq_ty = ctx.get(g.seq.name) if isinstance(g.seq, terms.Var) else None
            ctx[g.var] = seq_ty.element if isinstance(seq_ty, terms.Seq) else NAT
        g = fm.children(g)[i]
    return ctx


def rule_applications(formula):
    """Every ``(rule, position, before, after)`` where a checked rule changes a subformula."""
    for path, sub in fm.walk(formula):
        for rule in nz.RULES:
            if rule in nz.NONSTANDARD_ONLY:
                continue
            try:
                after = nz.RULES[rule](sub)
            except (nz.RewriteError, fm.FormulaError, terms.TermError):
                continue
            if after != sub:
                yield rule, path, sub, after


def truth_preservation(count: int = 200, seed: int = 0, max_domain: int = 3):
    """Apply every rule wherever it fits and compare the rewritten subformula
    with the original, all variables in scope ranging over the finite domain
    (which implies equivalence of the whole formulas)."""
    corpus = [(f"golden:{n}", golden(n), GOLDEN_FREE) for n in GOLDEN_NAMES if n != "bound_instance"]
    for name in ("mct_to_trans", "restricted_mct"):
        trace = nz.normalize_formula(input_formula(name))
        for i, step in enumerate(trace.steps):
            corpus.append((f"trace:{name}:{i}", step.before, GOLDEN_FREE))
    corpus += [(f"random:{i}", f, RANDOM_FREE) for i, f in enumerate(random_corpus(count, seed))]
    seen = set()
    checked, failures, per_rule = 0, [], {}
    for label, formula, free in corpus:
        for rule, path, before, after in rule_applications(formula):
            ctx = binder_context(formula, path, free)
            scope = {v: ctx[v] for v in fm.free_vars(before) | fm.free_vars(after) if v in ctx}
            key = (before, after, tuple(sorted((k, str(t)) for k, t in scope.items())))
            per_rule[rule] = per_rule.get(rule, 0) + 1
            if key in seen:
                continue
            seen.add(key)
            sizes, bad = sm.check_equivalence(before, after, scope, max_domain=max_domain)
            checked += 1
            if bad is not None or not sizes:
                failures.append({"formula": label, "rule": rule, "position": list(path),
                                 "domain": bad[0] if bad else None})
    return {"formulas": len(corpus), "checked": checked, "per_rule": per_rule, "failures": failures}


def suite_truth_preservation(count: int = 200, seed: int = 0):
    def run():
        d = truth_preservation(count, seed)
        rules = set(nz.RULES) - nz.NONSTANDARD_ONLY - {"expand-macros"}
        covered = rules <= set(d["per_rule"])
        return not d["failures"] and covered, {**d, "all_rules_exercised": covered}
    return _timed("finite-semantics truth preservation", run)


# -- 3 and 4: modulus versus mu -------------------------------------------------

def f_patterns(max_length: int = 12):
    """All zero/nonzero patterns of length <= max_length (value 1 beyond)."""
    for length in range(max_length + 1):
        for bits in itertools.product((0, 1), repeat=length):
            yield bits


def sample_sequences(max_length: int = 12, start: int = 1):
    for bits in f_patterns(max_length):
        yield f"t(f={''.join(map(str, bits))})", mct.t_of_f(mct.f_from_list(bits), start=start)
    yield "1-2^-n", lambda n: 1 - Fraction(1, 2 ** n)
    for q in (Fraction(0), Fraction(1, 2), Fraction(1)):
        yield f"const {q}", (lambda q: lambda n: q)(q)


def modulus_mu_agreement(max_length: int = 12, ks=range(1, 9), cap: int = 64,
                         unpair_fn=unpair, start: int = 1):
    """``mct_from_mu(brute mu) == brute_modulus`` for every test sequence and ``k``."""
    mu = mct.brute_mu(4096)
    memo = {}
    checked, mismatches, violations = 0, [], []
    for name, c in sample_sequences(max_length, start):
        try:
            key = tuple((q.numerator, q.denominator) for q in map(Fraction, map(c, range(96))))
        except Exception as exc:  # noqa: BLE001 - reported as an invariant violation
            violations.append({"sequence": name, "error": str(exc)})
            continue
        per_k = memo.setdefault(key, {})
        for k in ks:
            checked += 1
            if k not in per_k:
                try:
                    per_k[k] = (mct.brute_modulus(c, k, cap),
                                mct.mct_from_mu(mu, c, k, unpair_fn=unpair_fn))
                except (mct.NotMonotoneWithinCap, mct.NotFoundWithinCap, mct.SearchCapExceeded) as exc:
                    per_k[k] = exc
            got = per_k[k]
            if isinstance(got, Exception):
                violations.append({"sequence": name, "k": k, "error": f"{type(got).__name__}: {got}"})
            elif got[0] != got[1]:
                mismatches.append({"sequence": name, "k": k, "brute_modulus": got[0], "from_mu": got[1]})
    return {"checked": checked, "distinct": len(memo), "mismatches": mismatches, "violations": violations}


def suite_modulus_mu(unpair_fn=unpair, start: int = 1, name="modulus/mu agreement"):
    def run():
        d = modulus_mu_agreement(unpair_fn=unpair_fn, start=start)
        return not d["mismatches"] and not d["violations"], d
    return _timed(name, run)


def mu_transfer(max_length: int = 12, cap: int = 64, start: int = 1):
    """For every pattern with a zero the bound from the modulus covers a zero."""
    Psi = mct.brute_modulus_functional(cap)
    checked, failures, violations = 0, [], []
    for bits in f_patterns(max_length):
        if 0 not in bits:
            continue
        f = mct.f_from_list(bits)
        checked += 1
        try:
            bound = Psi(mct.t_of_f(f, start=start), 3)
        except (mct.NotMonotoneWithinCap, mct.NotFoundWithinCap) as exc:
            violations.append({"f": "".join(map(str, bits)), "error": f"{type(exc).__name__}: {exc}"})
            continue
        if not any(f(i) == 0 for i in range(bound + 1)):
            failures.append({"f": "".join(map(str, bits)), "bound": bound})
    return {"checked": checked, "failures": failures, "violations": violations}


def suite_mu_transfer(start: int = 1, name="MU transfer"):
    def run():
        d = mu_transfer(start=start)
        return not d["failures"] and not d["violations"], d
    return _timed(name, run)


# -- 5: MCT_ef versus MU^A at desk scale -----------------------------------------

def smn_soundness(programs=None, n_max: int = 4, m_max: int = 8, oracles=None):
    programs = programs if programs is not None else mc.CANONICAL_INDICES
    oracles = oracles or mc.STANDARD_ORACLES
    cells, bad = 0, []
    for oracle in oracles:
        for ei, e in enumerate(programs):
            for n in range(n_max + 1):
                program = mc.smn_program(e, n)
                for m in range(m_max + 1):
                    cells += 1
                    r = mc.run_bounded(program, m, oracle, mc.smn_step_bound(e, n, m))
                    want = mc.t_code(e, n, oracle, m)
                    if r is None or r.output != want:
                        bad.append({"e": ei, "n": n, "oracle": oracle.name, "m": m,
                                    "got": None if r is None else r.output, "want": want})
    return {"cells": cells, "mismatches": bad}


def suite_mu_equivalence(caps=None, oracles=None, nu_override=None, name="MCT_ef/MU^A desk instance"):
    def run():
        c = {**mct.DEFAULT_CAPS, **(caps or {})}
        rows = mct.verify_equivalence(c, oracles, nu_override=nu_override)
        counts = mct.summarize(rows)
        sound = smn_soundness(mc.CANONICAL_INDICES[: c["e_max"]], c["n_max"], c["m_max"], oracles)
        ok = counts[mc.FAIL] == 0 and not sound["mismatches"]
        return ok, {"rows": len(rows), "counts": counts, "smn_cells": sound["cells"],
                    "smn_mismatches": sound["mismatches"][:10]}
    return _timed(name, run)


# -- 6: the associate desk instance ------------------------------------------------

def suite_associates(e_max: int = 8, n_max: int = 3, s_cap: int = 256, oracles=None,
                probe_cap: int = ecf.DEFAULT_PROBE_CAP, seed: int = 0, nu_mutation=None,
                name="associate desk instance"):
    def run():
        rows = ecf.run_cor45(e_max, n_max, s_cap, oracles, probe_cap)
        if nu_mutation is not None:
            rows = [_remutate(r, nu_mutation, s_cap) for r in rows]
        fails = [r for r in rows if r["verdict"] == mc.FAIL]
        undefined = [r for r in rows if not r["defined"]]
        trip = ecf.associate_round_trip(20, seed)
        trip_ok = all(want == got for _, want, got in trip)
        logs_ok = all(r["a_bits_consistent"] for r in rows)
        ok = not fails and not undefined and trip_ok and logs_ok
        return ok, {"rows": len(rows), "fails": len(fails), "undefined": len(undefined),
                    "round_trip_exact": trip_ok, "query_logs_consistent": logs_ok}
    return _timed(name, run)


def _remutate(row, nu_mutation, s_cap):
    nu = nu_mutation(row["e"], row["n"])
    e = mc.CANONICAL_INDICES[row["e"]]
    oracle = mc.oracle_from_spec(row["oracle"])
    v = mc.check_mu_a(lambda _e, _n: nu, e, row["n"], oracle, s_cap)
    return {**row, "nu": nu, "verdict": v.verdict}


# -- 7: mutations ----------------------------------------------------------------

def broken_unpair(j: int):
    return j // 2, j // 2


def suite_mutations():
    """Each mutation must make at least one of the suites above fail."""
    def run():
        zero = lambda e, n: 0
        results = {
            "nu=0 (desk instance)": not suite_mu_equivalence(nu_override=zero).passed,
            "nu=0 (associates)": not suite_associates(nu_mutation=zero).passed,
            "broken pairing": not suite_modulus_mu(unpair_fn=broken_unpair).passed,
            "sum from i=0 (modulus/mu)": not suite_modulus_mu(start=0).passed,
            "sum from i=0 (MU transfer)": not suite_mu_transfer(start=0).passed,
        }
        return all(results.values()), {"detected": results}
    return _timed("mutation sensitivity", run)


SUITES = {
    "golden": suite_golden_chain,
    "truth": suite_truth_preservation,
    "modulus-mu": suite_modulus_mu,
    "mu-transfer": suite_mu_transfer,
    "mu-equivalence": suite_mu_equivalence,
    "associates": suite_associates,
    "mutations": suite_mutations,
}
