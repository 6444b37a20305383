"""Shared test plumbing: the acceptance suite registers one summary line per
criterion here, and the lines are echoed in the terminal summary so the
pass/fail status of every criterion is visible regardless of capture mode."""

ACCEPTANCE_LINES: list[str] = []


def record_acceptance(line: str) -> None:
    ACCEPTANCE_LINES.append(line)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
