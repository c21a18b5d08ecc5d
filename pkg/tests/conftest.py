from __future__ import annotations

import pytest

from gwdesc import CorrelatorEngine, load_fixture
from gwdesc.fixtures import genus1_taut_table


@pytest.fixture(scope="session")
def p1():
    return load_fixture("P1")


@pytest.fixture(scope="session")
def p2():
    return load_fixture("P2")


@pytest.fixture(scope="session")
def point():
    return load_fixture("point")


@pytest.fixture(scope="session")
def p1_engine(p1):
    return CorrelatorEngine(p1.model, p1.primary, taut=genus1_taut_table())


@pytest.fixture(scope="session")
def p2_engine(p2):
    return CorrelatorEngine(p2.model, p2.primary, taut=genus1_taut_table())


@pytest.fixture(scope="session")
def point_engine(point):
    return CorrelatorEngine(point.model, point.primary)
