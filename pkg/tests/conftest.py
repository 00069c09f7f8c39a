import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from shiftlab.geometry import classify_spectrum
from shiftlab.lanczos import random_jacobi

settings.register_profile(
    "shiftlab",
    max_examples=40,
    deadline=None,
    derandomize=True,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("shiftlab")


def rng_for(stream: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=np.array([99, stream], dtype=np.uint64)))


def random_spectrum(rng, n, spread=2.0, min_gap=0.05):
    lam = np.sort(rng.normal(size=n) * spread)
    while np.min(np.diff(lam)) < min_gap:
        lam = np.sort(rng.normal(size=n) * spread)
    return lam


def random_matrix(rng, n=None):
    n = int(n or rng.integers(2, 9))
    return random_jacobi(random_spectrum(rng, n), rng)


@pytest.fixture(scope="session")
def info_124():
    return classify_spectrum([1.0, 2.0, 4.0])


@pytest.fixture(scope="session")
def info_sym3():
    return classify_spectrum([-1.0, 0.0, 1.0])


@pytest.fixture(scope="session")
def info_weak4():
    return classify_spectrum([-1.0, 0.0, 0.3, 1.0])
