"""Shared test plumbing.

Acceptance tests register one line per criterion; the terminal summary
hook reprints them after the run so the pass/fail ledger survives
pytest's output capture.
"""

import os

import pytest

ACCEPTANCE_LINES = []


def record_acceptance(line: str) -> None:
    ACCEPTANCE_LINES.append(line)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def fast_bench(monkeypatch):
    """Trim bench durations so unit tests stay quick; acceptance tests
    use their own explicit durations."""
    monkeypatch.setenv("HASHVAULT_BENCH_SECONDS", "0.05")
