"""Acceptance criteria 1-12, run in full mode.

Run under pytest for one test per criterion (a summary block lists every
result), or directly as a script for plain pass/fail lines.
"""

import sys

import pytest

from anharmonic import validation

try:
    from conftest import ACCEPTANCE_RESULTS
except ImportError:  # running as a script from another directory
    ACCEPTANCE_RESULTS = {}


def _run(k):
    res = validation.CHECKS[k - 1](1.0, False)
    ACCEPTANCE_RESULTS[k] = res
    print(f"ACCEPTANCE {k}: {'PASS' if res.passed else 'FAIL'} {res.detail}")
    return res


@pytest.mark.parametrize("k", range(1, 13), ids=lambda k: f"criterion_{k:02d}")
def test_acceptance(k):
    res = _run(k)
    assert res.passed, res.line()


if __name__ == "__main__":
    results = validation.run_suite("full", report=None)
    for r in results:
        print(f"ACCEPTANCE {r.number}: {'PASS' if r.passed else 'FAIL'} {r.name}: {r.detail}")
    sys.exit(0 if all(r.passed for r in results) else 1)
