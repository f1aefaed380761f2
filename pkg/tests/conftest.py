import pytest

#: criterion number -> CheckResult, filled by test_acceptance.py
ACCEPTANCE_RESULTS = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE_RESULTS):
        r = ACCEPTANCE_RESULTS[k]
        status = "PASS" if r.passed else "FAIL"
        terminalreporter.write_line(f"ACCEPTANCE {k:2d}: {status}  {r.name}: {r.detail}")
    n_pass = sum(r.passed for r in ACCEPTANCE_RESULTS.values())
    terminalreporter.write_line(f"ACCEPTANCE total: {n_pass}/{len(ACCEPTANCE_RESULTS)} passed")
