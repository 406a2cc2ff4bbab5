import numpy as np
import pytest

from momentkit.moments import AtomicMeasure


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_measure(rng, dim, k, box=2.0):
    pts = rng.uniform(-box, box, size=(k, dim))
    w = rng.uniform(0.2, 2.0, size=k)
    return AtomicMeasure(pts, w)
