"""Shared pytest wiring: the acceptance scoreboard.

test_acceptance registers one verdict line per numbered criterion; the
terminal summary repeats them in order after the run so the whole gate
can be read off a CI log in one glance.
"""

ACCEPTANCE_VERDICTS = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_VERDICTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(ACCEPTANCE_VERDICTS):
        terminalreporter.write_line(line)
