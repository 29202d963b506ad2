import random

import pytest
from gmpy2 import mpq

from tropsand.core import RPoint, TropicalSeries

ONE_POINT = {(0, 0): mpq(1, 3), (1, 0): 0, (0, 1): 0, (-1, 0): 1, (0, -1): 1}


def lattice_point(x, y, s):
    return RPoint(mpq(x, s), mpq(y, s))


def random_lattice_points(rng, s, n):
    cells = rng.sample([(x, y) for x in range(1, s) for y in range(1, s)], n)
    return [lattice_point(x, y, s) for x, y in cells]


@pytest.fixture
def one_point():
    return TropicalSeries(ONE_POINT)


@pytest.fixture
def zero():
    return TropicalSeries.zero()


@pytest.fixture
def rng():
    return random.Random(20261016)
