"""Shared pytest hooks.

The acceptance tests record one verdict line per criterion; emitting them
from a terminal-summary hook keeps them visible in a plain `pytest -v` run,
where in-test prints are captured.
"""

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
