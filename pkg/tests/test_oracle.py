import numpy as np
import pytest

from conftest import random_matrix, rng_for
from shiftlab.factor import qr_star
from shiftlab.oracle import (
    dense_eig_oracle,
    gram_schmidt_qr_star,
    matrix_function,
)
from shiftlab.tridiag import SymTridiag


def test_diagonal_input():
    lam, V = dense_eig_oracle(np.diag([3.0, 1.0, 2.0]))
    assert np.allclose(lam, [1.0, 2.0, 3.0])
    assert np.allclose(np.abs(V), np.eye(3)[:, [1, 2, 0]])


def test_two_by_two_closed_form():
    lam, _ = dense_eig_oracle(np.array([[0.0, 1.0], [1.0, 0.0]]))
    assert np.allclose(lam, [-1.0, 1.0])


def test_three_by_three_characteristic():
    # tridiag(diag 0, sub 1): characteristic polynomial x^3 - 2x
    T = SymTridiag([0.0, 0.0, 0.0], [1.0, 1.0])
    lam, V = dense_eig_oracle(T.dense())
    assert np.allclose(lam, [-np.sqrt(2.0), 0.0, np.sqrt(2.0)], atol=1e-14)
    A = T.dense()
    assert np.max(np.abs(A @ V - V * lam[None, :])) <= 1e-11 * np.linalg.norm(A)


def test_residual_postcondition_random():
    rng = rng_for(10)
    for _ in range(25):
        T = random_matrix(rng)
        A = T.dense()
        lam, V = dense_eig_oracle(A)
        assert np.all(np.diff(lam) > 0)
        assert np.max(np.abs(A @ V - V * lam[None, :])) <= 1e-11 * np.linalg.norm(A)
        assert np.max(np.abs(V.T @ V - np.eye(T.n))) <= 1e-12


def test_matrix_function_identity_cases():
    T = SymTridiag([1.0, 3.0, -2.0], [0.4, 0.9])
    lam, _ = dense_eig_oracle(T.dense())
    assert np.max(np.abs(matrix_function(T, lam) - T.dense())) <= 1e-10
    assert np.max(np.abs(matrix_function(T, np.ones(3)) - np.eye(3))) <= 1e-10


def test_matrix_function_diagonal():
    T = SymTridiag([1.0, 2.0], [0.0])
    out = matrix_function(T, [10.0, 20.0])
    assert np.allclose(out, np.diag([10.0, 20.0]), atol=1e-12)


def test_gram_schmidt_matches_givens():
    rng = rng_for(11)
    for _ in range(40):
        T = random_matrix(rng)
        s = float(rng.normal())
        Q, R = qr_star(T, s)
        Qg, Rg = gram_schmidt_qr_star(T.dense() - s * np.eye(T.n))
        assert np.max(np.abs(Q.dense() - Qg)) <= 1e-11
        assert np.max(np.abs(R.dense() - Rg)) <= 1e-11


def test_gram_schmidt_on_singular_shift():
    # rank-deficient last column still yields det +1 and positive pivots
    M = np.array([[1.0, 1.0], [1.0, 1.0]])
    Q, R = gram_schmidt_qr_star(M)
    assert np.linalg.det(Q) == pytest.approx(1.0)
    assert R[0, 0] > 0
    assert abs(R[1, 1]) <= 1e-12
