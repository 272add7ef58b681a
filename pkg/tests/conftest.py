"""Shared acceptance scoreboard plumbing.

The acceptance tests record one verdict line each; the terminal-summary
hook replays the full scoreboard after the run, outside pytest's output
capture, so the lines always reach the console.
"""
import pytest

_SCOREBOARD: list[str] = []


@pytest.fixture
def verdict():
    def record(num: int, name: str, ok: bool) -> bool:
        line = f"ACCEPTANCE {num:02d} {'PASS' if ok else 'FAIL'}: {name}"
        print(line)
        if line not in _SCOREBOARD:
            _SCOREBOARD.append(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if _SCOREBOARD:
        terminalreporter.section("acceptance scoreboard")
        for line in sorted(_SCOREBOARD):
            terminalreporter.write_line(line)
