"""Shared pytest hooks: echo the acceptance summary after the run."""

import sys


def pytest_terminal_summary(terminalreporter):
    for name, mod in sys.modules.items():
        if name.rsplit(".", 1)[-1] == "test_acceptance":
            lines = getattr(mod, "SUMMARY", None)
            if lines:
                terminalreporter.section("acceptance summary")
                for line in lines:
                    terminalreporter.write_line(line)
            return
