"""Shared pytest plumbing: collects acceptance-criterion result lines and
prints them as a summary section at the end of the run, where output capture
no longer hides them."""

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
