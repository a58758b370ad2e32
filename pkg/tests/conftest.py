import numpy as np
import pytest

from noisydd.model import sample_random


def loglog_slope(x, y):
    return np.polyfit(np.log(x), np.log(y), 1)[0]


def random_hermitian(rng, d):
    a = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return a + a.conj().T


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def ham():
    return sample_random(0.02, 0.03, bath_dim=2, seed=5)
