"""Acceptance gate: every criterion at its frozen tolerance.

Each test prints one PASS/FAIL line for its criterion (run pytest with
-s to see them); the whole module doubles as the CLI 'verify' suite.
"""

import time

import pytest

from epiqmap import acceptance

_TOTALS = {}


@pytest.mark.parametrize(
    "name,func,description", acceptance.CRITERIA, ids=[c[0] for c in acceptance.CRITERIA]
)
def test_criterion(name, func, description):
    start = time.perf_counter()
    subchecks = func()
    elapsed = time.perf_counter() - start
    _TOTALS[name] = elapsed
    passed = all(s.passed for s in subchecks)
    print("[%s] %s - %s" % ("PASS" if passed else "FAIL", name, description))
    for sub in subchecks:
        op = "<=" if sub.kind == "max" else ">="
        assert sub.passed, "%s: %s: %.6e %s %.6e" % (
            name, sub.label, sub.value, op, sub.tolerance,
        )


def test_suite_runtime_budget():
    assert len(_TOTALS) == len(acceptance.CRITERIA)
    assert sum(_TOTALS.values()) < 30.0
