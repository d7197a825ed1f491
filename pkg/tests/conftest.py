import support


def pytest_terminal_summary(terminalreporter) -> None:
    # surface the acceptance verdict lines even when output capture is on
    if support.ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in support.ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
