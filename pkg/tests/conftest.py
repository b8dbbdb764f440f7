from importlib import resources

import pytest

from facetlab.polytope import parse_lin, parse_vtx


def _data(name):
    return resources.files("facetlab").joinpath("data", name).read_text()


@pytest.fixture(scope="session")
def stasheff():
    return parse_vtx(_data("stasheff.vtx"))


@pytest.fixture(scope="session")
def facets7():
    return parse_lin(_data("stasheff_facets.lin"), 4)


@pytest.fixture(scope="session")
def hull_eq():
    return parse_lin(_data("stasheff_hull.lin"), 4)


def pytest_terminal_summary(terminalreporter):
    import acclog

    if acclog.LINES:
        terminalreporter.section("acceptance criteria")
        for line in acclog.LINES:
            terminalreporter.write_line(line)
