import pytest

from mraug.synthetic import make_planted_domain

ACCEPTANCE_RESULTS = []


@pytest.fixture(scope="session")
def planted():
    return make_planted_domain(seed=7)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in ACCEPTANCE_RESULTS:
        terminalreporter.write_line(line)
