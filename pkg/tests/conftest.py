"""
Shared fixtures for the test suite
"""

import os

import numpy as np
import pytest

from src.config import get_settings
from src.construction import build_family
from src.models import Coloring


@pytest.fixture(autouse=True)
def fresh_settings(monkeypatch):
    """Settings are cached per process; every test starts from the defaults"""
    for name in [name for name in os.environ if name.startswith("DISC_")]:
        monkeypatch.delenv(name)
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()


@pytest.fixture
def family1():
    return build_family(1)


@pytest.fixture
def family2():
    return build_family(2)


@pytest.fixture
def plus_minus_plus():
    return Coloring(values=(1, -1, 1))


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def random_coloring(rng, n: int) -> Coloring:
    return Coloring.from_array(rng.choice(np.array([-1, 1]), size=n))


def all_colorings(n: int):
    """Every +-1 vector of length n, + before - lexicographically"""
    for code in range(2 ** n):
        yield Coloring.from_array([-1 if (code >> (n - 1 - e)) & 1 else 1 for e in range(n)])
