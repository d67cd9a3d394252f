import numpy as np
import pytest

from slepmoments import DpssParams, compute_dpss, smooth_test_image


@pytest.fixture(scope="session")
def basis64():
    return compute_dpss(DpssParams(n_len=64, half_bandwidth=0.2, n_seq=10))


@pytest.fixture(scope="session")
def basis32():
    return compute_dpss(DpssParams(n_len=32, half_bandwidth=0.2, n_seq=5))


@pytest.fixture(scope="session")
def test_image():
    return smooth_test_image(128)


@pytest.fixture()
def rng():
    return np.random.default_rng(12345)
