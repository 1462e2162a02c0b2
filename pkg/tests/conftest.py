"""Shared acceptance-line registry for the test suite.

The acceptance tests in test_acceptance.py report one line per criterion via
record_criterion; the terminal-summary hook replays those lines at the end of
the run so pass/fail status for every criterion is visible in one block even
when individual tests fail.
"""

ACCEPTANCE: list[tuple[int, bool, str]] = []


def record_criterion(index: int, passed: bool, detail: str) -> str:
    status = "PASS" if passed else "FAIL"
    line = f"CRITERION {index}: {status} - {detail}"
    ACCEPTANCE.append((index, passed, detail))
    return line


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for index, passed, detail in sorted(ACCEPTANCE):
        status = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"CRITERION {index}: {status} - {detail}")
