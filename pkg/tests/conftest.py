import os
import sys

sys.path.insert(0, os.path.dirname(__file__))

# one line per release-checklist item, filled in by test_acceptance.py
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.write_sep("=", "acceptance checklist")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
