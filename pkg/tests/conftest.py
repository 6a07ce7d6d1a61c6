"""Shared pytest plumbing: the acceptance verdicts are echoed after the run
(fd-level capture would otherwise swallow them for passing criteria)."""

ACCEPTANCE_VERDICTS: list[str] = []


def record_verdict(line: str) -> None:
    ACCEPTANCE_VERDICTS.append(line)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_VERDICTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(ACCEPTANCE_VERDICTS):
        terminalreporter.write_line(line)
