"""
Общие фикстуры тестов SpectralIndep
"""

import os

import numpy as np
import pytest

from graph_core import catalog, random_graph

FIXTURES = os.path.join (os.path.dirname (os.path.dirname (os.path.abspath (__file__))), 'fixtures')


@pytest.fixture
def petersen():
    return catalog ('petersen')


@pytest.fixture
def c5():
    return catalog ('cycle:5')


@pytest.fixture
def rng():
    return np.random.default_rng (20240611)


@pytest.fixture
def small_corpus():
    """Сорок случайных графов G(n, p) с n от 4 до 9"""
    seeds = np.random.default_rng (7).integers (0, 2 ** 31, size=40)
    probabilities = (0.2, 0.5, 0.8)
    return [
        random_graph (4 + i % 6, probabilities[i % 3], int (seed))
        for i, seed in enumerate (seeds)
    ]


@pytest.fixture
def fixtures_dir():
    return FIXTURES
