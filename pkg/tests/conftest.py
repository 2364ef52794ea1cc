"""Shared pytest hooks: collect acceptance lines and echo them at the end."""

acceptance_lines = []


def pytest_terminal_summary(terminalreporter):
    if not acceptance_lines:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for line in acceptance_lines:
        terminalreporter.write_line(line)
