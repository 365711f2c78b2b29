"""Acceptance criteria 1-7, each with its runtime limit.

Each test prints one ``PASS``/``FAIL`` line.  The module also runs on its own:
``python3 tests/test_acceptance.py``.
"""
import sys

import pytest

from nsacomp import suites

# (number, suite, runtime limit in seconds or None)
CRITERIA = [
    (1, suites.suite_golden_chain, 1),
    (2, suites.suite_truth_preservation, 60),
    (3, suites.suite_modulus_mu, 30),
    (4, suites.suite_mu_transfer, 10),
    (5, suites.suite_mu_equivalence, 120),
    (6, suites.suite_associates, 60),
    (7, suites.suite_mutations, None),
]


def evaluate(number, suite, limit):
    result = suite()
    in_time = limit is None or result.seconds < limit
    ok = result.passed and in_time
    budget = "" if limit is None else f", limit {limit}s"
    line = f"criterion {number}: {'PASS' if ok else 'FAIL'} {result.name} ({result.seconds:.2f}s{budget})"
    return ok, line, result


@pytest.mark.parametrize("number, suite, limit", CRITERIA, ids=[f"criterion_{c[0]}" for c in CRITERIA])
def test_criterion(number, suite, limit, capsys):
    ok, line, result = evaluate(number, suite, limit)
    with capsys.disabled():
        print(f"\n{line}")
    assert result.passed, result.details
    assert ok, f"over the runtime limit: {line}"


def main():
    failed = 0
    for number, suite, limit in CRITERIA:
        ok, line, _ = evaluate(number, suite, limit)
        print(line, flush=True)
        failed += not ok
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
