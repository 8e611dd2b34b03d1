import random

import pytest
from hypothesis import settings

from ffdist import Field, NormSpec, PointSet, Space

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

F3 = Field(3)
F5 = Field(5)
F7 = Field(7)
F9 = Field(3, 2, (1, 0, 1))          # t^2 + 1
F25 = Field(5, 2, (3, 0, 1))         # t^2 + 3
F27 = Field(3, 3, (1, 2, 0, 1))      # t^3 + 2t + 1
F81 = Field(3, 4, (2, 1, 0, 0, 1))   # t^4 + t + 2

SMALL_FIELDS = [F3, F5, F7, F9, F25, F27, F81]


def random_points(rng: random.Random, space: Space, m: int) -> PointSet:
    m = min(m, space.size)
    return PointSet(space, rng.sample(range(space.size), m))


def random_norm(rng: random.Random, space: Space, s: int | None = None) -> NormSpec:
    q = space.q
    return NormSpec(space, s or rng.choice([2, 3, 4]), tuple(rng.randrange(1, q) for _ in range(space.d)))


@pytest.fixture
def rng():
    return random.Random(20240611)
