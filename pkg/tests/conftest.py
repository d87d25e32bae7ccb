import numpy as np
import pytest

from guenoise.ensemble import RngStream, sample_gue


def random_hermitian(n, seed):
    return sample_gue(n, RngStream(seed, 77))


@pytest.fixture
def herm():
    return random_hermitian


def frac_within(est, exact, z=4.0, atol=1e-9):
    exact = np.asarray(exact)
    dev = np.abs(np.asarray(est.mean) - exact)
    return float(np.mean(dev <= z * np.asarray(est.std_error) + atol * (1 + np.abs(exact))))
