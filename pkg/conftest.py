import pytest

from farkascert import instances
from farkascert.config import Settings


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: acceptance-size randomized corpora")


@pytest.fixture
def example1():
    return instances.example1()


@pytest.fixture
def not_fm():
    return instances.not_fm()


@pytest.fixture
def halfline():
    return instances.halfline()


@pytest.fixture
def infeasible_pair():
    return instances.infeasible_pair()


@pytest.fixture
def rng():
    return instances.rng_for(Settings.seed)
