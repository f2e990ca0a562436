import pytest

from tfdens import tf_core

ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def tf_universal():
    return tf_core.solve_tf_universal()


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
