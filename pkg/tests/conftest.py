import re

ACCEPTANCE_LINES = []


def _number(line):
    m = re.search(r"\]\s*(\d+)\.", line)
    return int(m.group(1)) if m else 0


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=_number):
            terminalreporter.write_line(line)
