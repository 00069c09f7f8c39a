"""Dense symmetric eigensolver oracle and dense reference factorizations.

These routines exist to verify the Givens-based code against an
independent computation path, so they deliberately avoid the kernel
modules: the eigensolver is a cyclic Jacobi sweep and the factorization
reference is column-wise modified Gram-Schmidt on a dense copy.
"""

from __future__ import annotations

import numpy as np

from shiftlab.errors import NoConvergence
from shiftlab.tridiag import SymTridiag

JACOBI_SWEEP_BUDGET = 64
JACOBI_OFF_RTOL = 1e-14


def as_symmetric_dense(A) -> np.ndarray:
    """Validate and copy a dense symmetric array (oracle-side representation)."""
    A = np.array(A, dtype=np.float64, copy=True)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError("square matrix required")
    if np.max(np.abs(A - A.T), initial=0.0) != 0.0:
        A = 0.5 * (A + A.T)
    return A


def _off_norm(A: np.ndarray) -> float:
    off = A - np.diag(np.diag(A))
    return float(np.sqrt(np.sum(off**2)))


def dense_eig_oracle(A):
    """Eigendecomposition by cyclic Jacobi rotations.

    Returns (eigenvalues ascending, eigenvector columns).  Raises
    NoConvergence if the off-diagonal norm fails to drop below
    ``JACOBI_OFF_RTOL * ||A||`` within the sweep budget.
    """
    A = as_symmetric_dense(A)
    n = A.shape[0]
    V = np.eye(n)
    scale = float(np.sqrt(np.sum(A**2)))
    threshold = JACOBI_OFF_RTOL * max(scale, 1e-300)
    for _sweep in range(JACOBI_SWEEP_BUDGET):
        if _off_norm(A) <= threshold:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                if abs(apq) <= 0.25 * threshold / max(n, 1):
                    continue
                tau = (A[q, q] - A[p, p]) / (2.0 * apq)
                if tau >= 0:
                    t = 1.0 / (tau + np.sqrt(1.0 + tau * tau))
                else:
                    t = -1.0 / (-tau + np.sqrt(1.0 + tau * tau))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                rp = A[p, :].copy()
                rq = A[q, :].copy()
                A[p, :] = c * rp - s * rq
                A[q, :] = s * rp + c * rq
                cp = A[:, p].copy()
                cq = A[:, q].copy()
                A[:, p] = c * cp - s * cq
                A[:, q] = s * cp + c * cq
                A[p, q] = 0.0
                A[q, p] = 0.0
                vp = V[:, p].copy()
                vq = V[:, q].copy()
                V[:, p] = c * vp - s * vq
                V[:, q] = s * vp + c * vq
    else:
        raise NoConvergence(f"Jacobi sweeps exhausted ({JACOBI_SWEEP_BUDGET})")
    lam = np.diag(A).copy()
    order = np.argsort(lam, kind="stable")
    return lam[order], V[:, order]


def eigvals_tridiag(T: SymTridiag) -> np.ndarray:
    """Sorted oracle eigenvalues of a tridiagonal matrix."""
    lam, _ = dense_eig_oracle(T.dense())
    return lam


def matrix_function(T: SymTridiag, values) -> np.ndarray:
    """V diag(values) V^T for the oracle eigenbasis of T.

    ``values`` are the desired function values in eigenvalue-sorted
    order; T must have simple spectrum for this to be well defined.
    """
    values = np.asarray(values, dtype=np.float64)
    if values.size != T.n:
        raise ValueError("one value per eigenvalue required")
    _, V = dense_eig_oracle(T.dense())
    return (V * values[None, :]) @ V.T


def gram_schmidt_qr_star(M):
    """Dense reference for the signed factorization of an almost invertible M.

    Modified Gram-Schmidt with positive normalization on the first n-1
    columns; the last column of Q is the unit vector completing the basis
    with det(Q) = +1, and R = Q^T M.
    """
    M = np.array(M, dtype=np.float64, copy=True)
    n = M.shape[0]
    Q = np.zeros((n, n))
    for j in range(n - 1):
        v = M[:, j].copy()
        for k in range(j):
            v -= (Q[:, k] @ v) * Q[:, k]
        norm = float(np.linalg.norm(v))
        if norm == 0.0:
            raise ValueError("matrix is not almost invertible")
        Q[:, j] = v / norm
    # complete the basis from the canonical vector with the largest residual
    residuals = np.eye(n) - Q[:, : n - 1] @ Q[:, : n - 1].T
    pick = int(np.argmax(np.sum(residuals**2, axis=0)))
    v = residuals[:, pick]
    Q[:, n - 1] = v / np.linalg.norm(v)
    if np.linalg.det(Q) < 0:
        Q[:, n - 1] = -Q[:, n - 1]
    R = Q.T @ M
    return Q, np.triu(R)
