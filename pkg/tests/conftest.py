import numpy as np
import pytest

from twobody.core_model import ReducedState


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_states(rng, n, box=5.0):
    return [ReducedState(*rng.uniform(-box, box, 5)) for _ in range(n)]
