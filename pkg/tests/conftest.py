import random

import pytest

from jcells.config import get_settings
from jcells.fingroup import GAction, cyclic, standard_groups, symmetric3


@pytest.fixture(autouse=True)
def fresh_settings():
    """Settings are cached per process; tests that patch the environment need a clean slate."""
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()


@pytest.fixture
def rng():
    return random.Random(20240601)


@pytest.fixture
def s3():
    return symmetric3()


@pytest.fixture
def s3_regular(s3):
    return GAction.coset_action(s3, [s3.identity])


@pytest.fixture
def z4_on_two_points():
    group = cyclic(4)
    return GAction.coset_action(group, group.closure([group.element("2")]))


@pytest.fixture
def klein_regular():
    group = standard_groups("Z2^2")
    return GAction.coset_action(group, [group.identity])
