import pytest

from zsf.group import abelian, cyclic, dicyclic, dihedral


@pytest.fixture(scope="session")
def D6():
    return dihedral(3)


@pytest.fixture(scope="session")
def D8():
    return dihedral(4)


@pytest.fixture(scope="session")
def Q8():
    return dicyclic(2)


@pytest.fixture(scope="session")
def C5():
    return cyclic(5)


@pytest.fixture(scope="session")
def K4():
    return abelian(2, 2)


def pytest_terminal_summary(terminalreporter):
    from _acceptance_log import RESULTS, line

    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(RESULTS):
        terminalreporter.write_line(line(number))
