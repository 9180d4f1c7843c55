import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent))

import verdicts  # noqa: E402


def pytest_terminal_summary(terminalreporter):
    if not verdicts.LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(verdicts.LINES, key=verdicts.order):
        terminalreporter.write_line(line)
