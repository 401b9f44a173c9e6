import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20240815)


def random_complex_matrix(rng, n, scale=0.5, spectral_norm=None):
    m = rng.uniform(-1, 1, (n, n)) + 1j * rng.uniform(-1, 1, (n, n))
    if spectral_norm is not None:
        return m * (spectral_norm / np.linalg.norm(m, 2))
    return scale * m


def random_complex_vector(rng, n):
    return rng.uniform(-1, 1, n) + 1j * rng.uniform(-1, 1, n)
