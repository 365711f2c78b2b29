import json
import subprocess
import sys
from importlib import resources

import pytest

from nsacomp import cli
from nsacomp import formulas as fm
from nsacomp import suites

MCT_FILE = str(resources.files("nsacomp") / "data" / "mct_to_trans.sexp")
SMALL = ["--e-max", "3", "--n-max", "1", "--s-cap", "64"]


def run(argv, capsys):
    code = cli.main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_normalize_ends_in_golden_shape(capsys):
    code, out, _ = run(["normalize", MCT_FILE], capsys)
    assert code == 0
    steps = json.loads(out)
    final = fm.parse_formula(steps[-1]["after"])
    assert fm.alpha_eq(final, suites.golden("mct_normal_form"))


def test_normalize_missing_file(capsys):
    code, _, err = run(["normalize", "missing.sexp"], capsys)
    assert code == 2
    assert "missing.sexp" in err


def test_normalize_bad_syntax(tmp_path, capsys):
    p = tmp_path / "bad.sexp"
    p.write_text("(forall (x")
    code, _, err = run(["normalize", str(p)], capsys)
    assert code == 2 and err


def test_usage_errors(capsys):
    assert run([], capsys)[0] == 2
    assert run(["frobnicate"], capsys)[0] == 2
    assert run(["verify-mu", "--s-cap", "0"], capsys)[0] == 2
    assert run(["verify-mu", "--oracle", "nope"], capsys)[0] == 2
    assert run(["verify-mu", "--e-max", "99"], capsys)[0] == 2


def test_verify_mu_report(tmp_path, capsys):
    out = tmp_path / "r.json"
    code, text, _ = run(["verify-mu", *SMALL, "--oracle", "parity", "--out", str(out)], capsys)
    assert code == 0
    rows = json.loads(out.read_text())
    assert rows and {r["oracle"] for r in rows} == {"parity"}
    assert {"e", "n", "oracle", "e_prime", "nu", "verdict", "halting_step"} <= set(rows[0])
    assert "FAIL" in text and "parity" in text


def test_reports_are_byte_identical(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    run(["verify-mu", *SMALL, "--out", str(a)], capsys)
    run(["verify-mu", *SMALL, "--out", str(b)], capsys)
    assert a.read_bytes() == b.read_bytes()
    run(["ecf", "--e-max", "2", "--n-max", "1", "--seed", "3", "--out", str(a)], capsys)
    run(["ecf", "--e-max", "2", "--n-max", "1", "--seed", "3", "--out", str(b)], capsys)
    assert a.read_bytes() == b.read_bytes()


def test_caps_from_environment(monkeypatch, tmp_path, capsys):
    monkeypatch.setenv(cli.CAPS_ENV, json.dumps({"e_max": 2, "n_max": 0, "s_cap": 64}))
    out = tmp_path / "r.json"
    assert run(["verify-mu", "--out", str(out)], capsys)[0] == 0
    rows = json.loads(out.read_text())
    assert {r["e"] for r in rows} == {0, 1} and {r["n"] for r in rows} == {0}
    # flags override the environment
    assert run(["verify-mu", "--e-max", "1", "--out", str(out)], capsys)[0] == 0
    assert {r["e"] for r in json.loads(out.read_text())} == {0}
    monkeypatch.setenv(cli.CAPS_ENV, "{not json")
    assert run(["verify-mu"], capsys)[0] == 2
    monkeypatch.setenv(cli.CAPS_ENV, json.dumps({"bogus": 1}))
    assert run(["verify-mu"], capsys)[0] == 2


def test_exit_status_counts_fail_rows(monkeypatch, capsys):
    from nsacomp import mct
    real = mct.verify_equivalence
    monkeypatch.setattr(mct, "verify_equivalence",
                        lambda caps, oracles: real(caps, oracles, nu_override=lambda e, n: 0))
    code, out, _ = run(["verify-mu", *SMALL], capsys)
    rows = json.loads(out)
    assert code == 1 and any(r["verdict"] == "FAIL" for r in rows)


def test_ecf(capsys):
    code, out, _ = run(["ecf", "--e-max", "3", "--n-max", "1"], capsys)
    rows = json.loads(out)
    assert code == 0
    assert sum(r.get("variant") == "round-trip" for r in rows) == 20
    assert all(r["verdict"] != "FAIL" for r in rows)


def test_ecf_short_probe_cap_fails(capsys):
    code, out, _ = run(["ecf", "--e-max", "2", "--n-max", "0", "--probe-cap", "1"], capsys)
    assert code == 1


def test_extract_mct(capsys):
    code, out, _ = run(["extract-mct"], capsys)
    report = json.loads(out)
    assert code == 0
    assert all(report["golden_match"].values())
    assert fm.alpha_eq(fm.parse_formula(report["bound_instance"]), suites.golden("bound_instance"))


def test_verify_mct(capsys):
    code, out, _ = run(["verify-mct"], capsys)
    assert code == 0
    assert [r["verdict"] for r in json.loads(out)] == ["PASS", "PASS"]


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "nsacomp", "normalize", "missing.sexp"],
                       capture_output=True, text=True)
    assert r.returncode == 2 and "missing.sexp" in r.stderr
