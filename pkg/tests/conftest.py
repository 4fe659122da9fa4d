"""Shared pytest wiring: the acceptance suite's verdict summary.

Each acceptance test records one PASS/FAIL line; the hook replays them in
the terminal summary so the verdicts survive output capture.
"""

import pytest

VERDICTS = []


@pytest.fixture(scope="session")
def acceptance_log():
    return VERDICTS


def pytest_terminal_summary(terminalreporter):
    if VERDICTS:
        terminalreporter.section("acceptance criteria")
        for line in VERDICTS:
            terminalreporter.write_line(line)
