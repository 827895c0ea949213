import numpy as np
import pytest

from momentkit import Image


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20240305)


@pytest.fixture(scope="session")
def random_image64():
    return Image(np.random.default_rng(11).uniform(0.0, 1.0, (64, 64)))


@pytest.fixture(scope="session")
def smooth_image64():
    x = (2.0 * np.arange(1, 65) - 64) / 64
    X, Y = np.meshgrid(x, x, indexing="ij")
    f = 0.5 + 0.3 * np.sin(2.1 * X + 0.8 * Y) * np.cos(1.3 * Y - 0.5 * X)
    return Image(np.clip(f, 0.0, 1.0).T)
