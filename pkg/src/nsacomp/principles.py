"""Named principles stored as schemas with metavariable slots.

Formula slots are relations written ``?phi``; term slots are free variables
written ``?t``.  :func:`instantiate` fills both.
"""
from __future__ import annotations

from dataclasses import dataclass

from . import formulas as fm
from .formulas import Atom


SOURCES = {
    "PI01-TRANS": """
(forall-st (f (-> Nat Nat))
  (=> (forall-st (n Nat) (!= (f n) 0))
      (forall (m Nat) (!= (f m) 0))))""",
    "MU": """
(exists (mu (-> (-> Nat Nat) Nat))
  (forall (f (-> Nat Nat))
    (=> (exists (n Nat) (= (f n) 0)) (= (f (mu f)) 0))))""",
    "MCT-NS": """
(forall-st (c (-> Nat Nat))
  (=> (forall (n Nat) (mono (c n) (c (succ n))))
      (forall (N Nat) (M Nat)
        (=> (and (in-omega N) (in-omega M)) (approx (c M) (c N))))))""",
    "MCT-EF": """
(forall (c (-> Nat Nat)) (k Nat)
  (=> (forall (n Nat) (mono (c n) (c (succ n))))
      (forall (N Nat) (M Nat)
        (=> (and (<= (?t c k) N) (<= (?t c k) M)) (close (c M) (c N) k)))))""",
    "I": """
(=> (forall-st (z (Seq Nat))
      (exists (y Nat) (not (exists-in (x z) (not (?phi x y))))))
    (exists (y Nat) (forall-st (x Nat) (?phi x y))))""",
    "HAC-INT": """
(=> (forall-st (x Nat) (exists-st (y Nat) (?phi x y)))
    (exists-st (F (-> Nat (Seq Nat)))
      (forall-st (x Nat) (exists-in (y (F x)) (?phi x y)))))""",
}


@dataclass(frozen=True)
class NamedPrinciple:
    name: str
    schema: fm.Formula

    @property
    def formula_slots(self):
        return sorted({g.rel for _, g in fm.walk(self.schema)
                       if isinstance(g, Atom) and g.rel.startswith("?")})

    @property
    def term_slots(self):
        return sorted(v for v in fm.free_vars(self.schema) if v.startswith("?"))

    def instantiate(self, **bindings):
        return instantiate(self.schema, bindings)


def instantiate(schema, bindings: dict):
    """Fill metavariables.

    ``bindings`` maps slot names without the ``?`` to either a term (term
    slots) or a pair ``(params, formula)`` (formula slots); parameters are
    substituted by the atom's arguments.
    """
    out = schema
    for key, value in bindings.items():
        name = "?" + key.lstrip("?")
        if isinstance(value, tuple):
            params, body = value
            out = _fill_formula(out, name, tuple(params), body)
        else:
            out = fm.subst(out, name, value)
    return out


def _fill_formula(f, name, params, body):
    if isinstance(f, Atom) and f.rel == name:
        if len(f.args) != len(params):
            raise fm.ArityError(f"{name} expects {len(params)} arguments")
        g = fm.freshen(body, avoid=fm.all_names(f))
        for p, a in zip(params, f.args):
            g = fm.subst(g, p, a)
        return g
    kids = fm.children(f)
    if not kids:
        return f
    return fm.with_children(f, [_fill_formula(k, name, params, body) for k in kids])


PRINCIPLES = {name: NamedPrinciple(name, fm.parse_formula(src)) for name, src in SOURCES.items()}


def get(name: str) -> NamedPrinciple:
    return PRINCIPLES[name]
