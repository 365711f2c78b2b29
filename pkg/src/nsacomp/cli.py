"""Command-line entry point: ``nsacomp <command> [options]``.

Every command writes a JSON report (to ``--out`` or standard output) with a
stable key order and exits 0 exactly when the report has no FAIL rows.
Usage errors, unreadable inputs and malformed formulas exit with status 2.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction

from . import ecf
from . import formulas as fm
from . import machines as mc
from . import mct
from . import normalizer as nz
from . import suites
from .sexp import SExpSyntaxError

CAP_KEYS = ("e_max", "n_max", "s_cap", "m_max", "probe_cap")
DEFAULT_CAPS = {**mct.DEFAULT_CAPS, "probe_cap": ecf.DEFAULT_PROBE_CAP}
ECF_CAPS = {**DEFAULT_CAPS, "e_max": 8, "n_max": 3, "s_cap": 256}
# caps that may legitimately be zero
ZERO_OK = {"n_max", "m_max"}
CAPS_ENV = "NSA_EXTRACT_CAPS"


class UsageError(Exception):
    pass


def resolve_caps(args, env=None, defaults=DEFAULT_CAPS) -> dict:
    """Defaults, then the JSON blob in ``NSA_EXTRACT_CAPS``, then flags."""
    env = os.environ if env is None else env
    caps = dict(defaults)
    blob = env.get(CAPS_ENV)
    if blob:
        try:
            extra = json.loads(blob)
        except json.JSONDecodeError as exc:
            raise UsageError(f"{CAPS_ENV} is not valid JSON: {exc}") from None
        if not isinstance(extra, dict):
            raise UsageError(f"{CAPS_ENV} must be a JSON object")
        unknown = set(extra) - set(CAP_KEYS)
        if unknown:
            raise UsageError(f"{CAPS_ENV} has unknown caps: {', '.join(sorted(unknown))}")
        caps.update(extra)
    for key in CAP_KEYS:
        value = getattr(args, key, None)
        if value is not None:
            caps[key] = value
    for key, value in caps.items():
        if not isinstance(value, int) or isinstance(value, bool):
            raise UsageError(f"cap {key} must be an integer, got {value!r}")
        least = 0 if key in ZERO_OK else 1
        if value < least:
            raise UsageError(f"cap {key} must be at least {least}, got {value}")
    return caps


def resolve_oracles(specs, default):
    if not specs:
        return tuple(default)
    try:
        return tuple(mc.oracle_from_spec(s) for s in specs)
    except (ValueError, OSError) as exc:
        raise UsageError(str(exc)) from None


def dumps(report) -> str:
    return json.dumps(report, indent=2, default=_jsonable) + "\n"


def _jsonable(x):
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, (set, frozenset, tuple)):
        return list(x)
    return str(x)


def emit(report, out, table=None):
    """Write the JSON report; with ``--out`` the summary table goes to stdout."""
    text = dumps(report)
    if out:
        with open(out, "w") as fh:
            fh.write(text)
        if table:
            sys.stdout.write(table)
    else:
        sys.stdout.write(text)
        if table:
            sys.stderr.write(table)


def count_fails(rows) -> int:
    return sum(1 for r in rows if r.get("verdict") == mc.FAIL)


def table(rows, keys=("oracle",)) -> str:
    """Verdict counts grouped by ``keys``."""
    groups = {}
    for r in rows:
        g = groups.setdefault(tuple(r[k] for k in keys), {mc.PASS: 0, mc.VACUOUS: 0, mc.FAIL: 0})
        g[r["verdict"]] += 1
    head = "  ".join(f"{k:>10}" for k in keys) + f"  {mc.PASS:>8} {mc.VACUOUS:>8} {mc.FAIL:>8}\n"
    lines = [head]
    for key in sorted(groups, key=str):
        g = groups[key]
        lines.append("  ".join(f"{str(v):>10}" for v in key)
                     + f"  {g[mc.PASS]:>8} {g[mc.VACUOUS]:>8} {g[mc.FAIL]:>8}\n")
    return "".join(lines)


def suite_row(result: suites.SuiteResult) -> dict:
    return {
        "suite": result.name,
        "verdict": mc.PASS if result.passed else mc.FAIL,
        "details": result.details,
    }


def suite_report(results):
    rows = [suite_row(r) for r in results]
    text = "".join(r.line() + "\n" for r in results)
    return rows, text


# -- commands ------------------------------------------------------------------

def cmd_normalize(args):
    try:
        with open(args.formula_file) as fh:
            text = fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {args.formula_file}: {exc.strerror}") from None
    try:
        formula = fm.parse_formula(text)
    except (SExpSyntaxError, fm.FormulaError) as exc:
        raise UsageError(f"{args.formula_file}: {exc}") from None
    try:
        trace = nz.normalize_formula(formula, style=args.style)
    except nz.RewriteError as exc:
        raise UsageError(f"{args.formula_file}: cannot normalize: {exc}") from None
    emit(trace.to_json(), args.out)
    return 0


def _witness_table(max_length: int = 6):
    """``t(f)`` and the bound ``Psi(t(f), 3)`` on every zero pattern up to ``max_length``."""
    Psi = mct.brute_modulus_functional(64)
    rows = []
    for bits in suites.f_patterns(max_length):
        f = mct.f_from_list(bits)
        c = mct.t_of_f(f)
        bound = Psi(c, 3)
        rows.append({
            "f": "".join(map(str, bits)),
            "t": [str(c(k)) for k in range(max_length + 1)],
            "bound": bound,
            "zero_within_bound": any(f(i) == 0 for i in range(bound + 1)),
            "has_zero": 0 in bits,
        })
    return rows


def cmd_extract_mct(args):
    full = nz.normalize_formula(suites.input_formula("mct_to_trans"))
    restricted = nz.normalize_formula(suites.input_formula("restricted_mct"))
    bound = nz.bound_instance(restricted.final)
    witnesses = _witness_table()
    golden_match = {
        "mct_to_trans": fm.alpha_eq(full.final, suites.golden("mct_normal_form")),
        "restricted": fm.alpha_eq(restricted.final, suites.golden("restricted_normal_form")),
        "bound_instance": fm.alpha_eq(bound, suites.golden("bound_instance")),
    }
    ok = all(golden_match.values()) and all(
        w["zero_within_bound"] for w in witnesses if w["has_zero"])
    report = {
        "normal_forms": {
            "mct_to_trans": fm.format_formula(full.final),
            "restricted": fm.format_formula(restricted.final),
        },
        "bound_instance": fm.format_formula(bound),
        "terms": {
            "t": "t(f)(k) = 0 if f has no zero in [0, k], else sum_{i=1}^{k} 2^-i",
            "s": "s(f, psi) = psi(3)",
        },
        "golden_match": golden_match,
        "witness_table": witnesses,
        "verdict": mc.PASS if ok else mc.FAIL,
    }
    emit(report, args.out)
    return 0 if ok else 1


def cmd_verify_mct(args):
    results = [suites.suite_modulus_mu(), suites.suite_mu_transfer()]
    rows, text = suite_report(results)
    emit(rows, args.out, text)
    return 1 if count_fails(rows) else 0


def cmd_verify_mu(args):
    caps = resolve_caps(args)
    oracles = resolve_oracles(args.oracle, mc.STANDARD_ORACLES)
    if caps["e_max"] > len(mc.CANONICAL_INDICES):
        raise UsageError(f"--e-max is at most {len(mc.CANONICAL_INDICES)} (the canonical programs)")
    rows = mct.verify_equivalence(caps, oracles)
    sound = suites.smn_soundness(mc.CANONICAL_INDICES[: caps["e_max"]], caps["n_max"], caps["m_max"], oracles)
    for bad in sound["mismatches"]:
        rows.append({**bad, "variant": "smn-soundness", "verdict": mc.FAIL})
    rows.sort(key=lambda r: (r["oracle"], r["e"], r["n"], r.get("variant", ""), r.get("m", -1)))
    text = table(rows) + f"s-m-n soundness: {sound['cells']} cells, {len(sound['mismatches'])} mismatches\n"
    emit(rows, args.out, text)
    return 1 if count_fails(rows) else 0


def cmd_ecf(args):
    caps = resolve_caps(args, defaults=ECF_CAPS)
    oracles = resolve_oracles(args.oracle, (mc.ALL0, mc.ALL1))
    if caps["e_max"] > len(mc.CANONICAL_INDICES):
        raise UsageError(f"--e-max is at most {len(mc.CANONICAL_INDICES)} (the canonical programs)")
    rows = ecf.run_cor45(caps["e_max"], caps["n_max"], caps["s_cap"], oracles, caps["probe_cap"], caps["m_max"])
    for r in rows:
        if not r["defined"]:
            r["verdict"] = mc.FAIL
    trip = ecf.associate_round_trip(20, args.seed)
    for name, want, got in trip:
        rows.append({"e": -1, "n": -1, "oracle": "-", "functional": name, "want": want, "got": got,
                     "variant": "round-trip", "verdict": mc.PASS if want == got else mc.FAIL})
    rows.sort(key=lambda r: (r["oracle"], r["e"], r["n"], r.get("functional", "")))
    emit(rows, args.out, table(rows))
    return 1 if count_fails(rows) else 0


def cmd_selftest(args):
    results = [
        suites.suite_golden_chain(),
        suites.suite_truth_preservation(seed=args.seed),
        suites.suite_modulus_mu(),
        suites.suite_mu_transfer(),
        suites.suite_mu_equivalence(),
        suites.suite_associates(seed=args.seed),
        suites.suite_mutations(),
    ]
    rows, text = suite_report(results)
    emit(rows, args.out, text)
    return 1 if count_fails(rows) else 0


# -- parser --------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _add_caps(p):
    p.add_argument("--e-max", dest="e_max", type=int, help="number of canonical programs")
    p.add_argument("--n-max", dest="n_max", type=int, help="largest input n")
    p.add_argument("--s-cap", dest="s_cap", type=int, help="step and search cap")
    p.add_argument("--m-max", dest="m_max", type=int, help="largest m simulated through s-m-n")
    p.add_argument("--probe-cap", dest="probe_cap", type=int, help="longest prefix probed by an associate")
    p.add_argument("--oracle", action="append", metavar="SPEC",
                   help="all0, all1, parity or file:<path>; repeatable")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="nsacomp", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {_version()}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p):
        p.add_argument("--out", help="write the JSON report here instead of standard output")
        p.add_argument("--seed", type=int, default=0, help="seed for randomized samples")

    p = sub.add_parser("normalize", help="rewrite a formula file to normal form, print the trace")
    p.add_argument("formula_file")
    p.add_argument("--style", choices=("pointwise", "bounded"), help="consequent strategy")
    common(p)
    p.set_defaults(run=cmd_normalize)

    p = sub.add_parser("extract-mct", help="normal forms, bound instance and witness table")
    common(p)
    p.set_defaults(run=cmd_extract_mct)

    p = sub.add_parser("verify-mct", help="modulus/mu agreement and MU transfer")
    common(p)
    p.set_defaults(run=cmd_verify_mct)

    p = sub.add_parser("verify-mu", help="MCT_ef versus MU^A over the canonical programs")
    _add_caps(p)
    common(p)
    p.set_defaults(run=cmd_verify_mu)

    p = sub.add_parser("ecf", help="the associate desk run and the round-trip check")
    _add_caps(p)
    common(p)
    p.set_defaults(run=cmd_ecf)

    p = sub.add_parser("selftest", help="every property suite")
    common(p)
    p.set_defaults(run=cmd_selftest)
    return parser


def _version():
    from . import __version__
    return __version__


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.run(args)
    except UsageError as exc:
        print(f"nsacomp: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
