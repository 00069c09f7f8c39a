import numpy as np
import pytest

from conftest import random_spectrum, rng_for
from shiftlab.errors import Breakdown
from shiftlab.lanczos import lanczos_from_spectrum, random_jacobi, spectral_weights


def test_two_by_two_hand_solution():
    T = lanczos_from_spectrum([-1.0, 1.0], np.array([1.0, 1.0]) / np.sqrt(2.0))
    assert np.allclose(T.diag, [0.0, 0.0], atol=1e-15)
    assert T.sub[0] == pytest.approx(1.0)


def test_concentrated_weight_shrinks_coupling():
    # as the weight concentrates on one eigenvector the matrix reduces
    lam = [0.0, 1.0, 3.0]
    b_values = []
    for eps in (1e-2, 1e-4, 1e-6, 1e-8):
        w = np.array([np.sqrt(1.0 - 2 * eps**2), eps, eps])
        w /= np.linalg.norm(w)
        b_values.append(abs(lanczos_from_spectrum(lam, w).b1))
    assert all(b_values[i + 1] < b_values[i] for i in range(len(b_values) - 1))


def test_round_trip_with_oracle():
    rng = rng_for(20)
    for _ in range(20):
        n = int(rng.integers(2, 9))
        lam = random_spectrum(rng, n)
        w = np.sqrt(rng.dirichlet(np.ones(n)))
        w = np.maximum(w, 1e-4)
        w /= np.linalg.norm(w)
        T = lanczos_from_spectrum(lam, w)
        assert np.all(np.asarray(T.sub) > 0)
        lam2, w2 = spectral_weights(T)
        assert np.max(np.abs(lam2 - lam)) <= 1e-10
        assert np.max(np.abs(w2 - w)) <= 1e-9


def test_validation_errors():
    with pytest.raises(ValueError):
        lanczos_from_spectrum([1.0, 1.0], [0.7, 0.7])
    with pytest.raises(ValueError):
        lanczos_from_spectrum([0.0, 1.0], [0.5, 0.5])  # not unit norm
    with pytest.raises(ValueError):
        lanczos_from_spectrum([0.0, 1.0], [1.0, -0.001])


def test_breakdown_on_boundary_weight():
    w = np.array([1.0, 1e-16, 1e-16])
    w /= np.linalg.norm(w)
    with pytest.raises((Breakdown, ValueError)):
        lanczos_from_spectrum([0.0, 1.0, 2.0], w)


def test_random_jacobi_is_unreduced():
    rng = rng_for(21)
    T = random_jacobi([0.0, 0.5, 2.0, 3.0], rng)
    assert T.is_unreduced()
    assert np.all(np.asarray(T.sub) > 0)
