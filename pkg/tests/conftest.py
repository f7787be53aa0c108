import pytest

from mixret import ProcessModel


@pytest.fixture
def uniform():
    return ProcessModel.iid("ab", [0.5, 0.5])


@pytest.fixture
def biased():
    return ProcessModel.iid("ab", [0.7, 0.3])


@pytest.fixture
def chain():
    return ProcessModel.markov("01", [[0.9, 0.1], [0.2, 0.8]])


# lines recorded by test_acceptance.py, repeated at the end of the run
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
