"""Shared pytest wiring: echo the acceptance-gate verdict lines.

The acceptance tests record one line per criterion; printing them from a
terminal-summary hook makes the verdicts visible in normal ``pytest -v``
runs, where per-test stdout is swallowed on success.
"""

import sys


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None) if mod else None
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for line in results:
        terminalreporter.write_line(line)
