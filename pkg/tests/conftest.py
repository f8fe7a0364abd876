import numpy as np
import pytest

from tivm import FeatureCube


def random_cube(rng, c=4, h=8, w=8, scale=1.0):
    return FeatureCube(scale * rng.standard_normal((c, h, w)))


def unit_cube(rng, c=4, h=8, w=8):
    t = rng.standard_normal((c, h, w))
    return FeatureCube(t / np.linalg.norm(t.ravel()))


@pytest.fixture
def rng():
    return np.random.default_rng(20240811)
