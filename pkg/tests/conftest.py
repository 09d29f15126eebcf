"""Shared test plumbing: acceptance criterion reporting."""

import pytest

ACCEPTANCE_LINES = []


@pytest.fixture
def criterion_report():
    """Record and print one pass/fail line for an acceptance criterion."""
    def _report(number: int, passed: bool, detail: str) -> None:
        line = f"[{'PASS' if passed else 'FAIL'}] criterion {number}: {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        assert passed, line
    return _report


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
