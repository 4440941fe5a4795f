"""Shared pytest plumbing.

The acceptance tests register one verdict line per criterion; the terminal
summary hook reprints them in one block after the run so the scoreboard is
visible without digging through captured output.
"""

_VERDICTS = []


def record_verdict(line: str) -> None:
    _VERDICTS.append(line)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if _VERDICTS:
        terminalreporter.section("acceptance criteria")
        for line in _VERDICTS:
            terminalreporter.write_line(line)
