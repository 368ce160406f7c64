"""Shared pytest wiring.

The acceptance tests append one line per criterion to the session log;
the terminal-summary hook prints them after the run so the measured
numbers are visible even when every test passes under captured output.
"""

import pytest

_ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def acceptance_log():
    return _ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.line(line)
