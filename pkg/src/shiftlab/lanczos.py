"""Inverse eigenvalue sampling: Jacobi matrices from spectral data.

A Jacobi matrix (positive subdiagonal) is determined by its eigenvalues
and the first components of its normalized eigenvectors.  Running the
Lanczos recurrence on the diagonal matrix of eigenvalues with the weight
vector as starting vector reconstructs it; full reorthogonalization keeps
the recurrence honest at these sizes.
"""

from __future__ import annotations

import numpy as np

from shiftlab.errors import Breakdown
from shiftlab.tridiag import SymTridiag

BREAKDOWN_TOL = 1e-14


def lanczos_from_spectrum(lam, weights) -> SymTridiag:
    """Unique Jacobi matrix with eigenvalues ``lam`` and first-row weights.

    ``lam`` must be strictly increasing and ``weights`` strictly positive
    with unit 2-norm (a tolerance of 1e-8 on the normalization is
    accepted and renormalized away).  Raises Breakdown when a recurrence
    norm underflows, which signals a weight too close to the boundary of
    the simplex.
    """
    lam = np.asarray(lam, dtype=np.float64)
    w = np.array(weights, dtype=np.float64, copy=True)
    n = lam.size
    if n < 2:
        raise ValueError("need at least two eigenvalues")
    if np.any(np.diff(lam) <= 0):
        raise ValueError("eigenvalues must be strictly increasing")
    if w.size != n or np.any(w <= 0):
        raise ValueError("weights must be strictly positive")
    nrm = float(np.linalg.norm(w))
    if abs(nrm - 1.0) > 1e-8:
        raise ValueError("weights must have unit norm")
    w /= nrm

    Q = np.zeros((n, n))
    Q[:, 0] = w
    alpha = np.zeros(n)
    beta = np.zeros(n - 1)
    for j in range(n):
        v = lam * Q[:, j]
        alpha[j] = float(Q[:, j] @ v)
        v = v - alpha[j] * Q[:, j]
        if j > 0:
            v = v - beta[j - 1] * Q[:, j - 1]
        for k in range(j + 1):  # full reorthogonalization
            v -= (Q[:, k] @ v) * Q[:, k]
        if j < n - 1:
            beta[j] = float(np.linalg.norm(v))
            if beta[j] <= BREAKDOWN_TOL * max(1.0, float(np.max(np.abs(lam)))):
                raise Breakdown(f"recurrence norm underflow at column {j + 1}")
            Q[:, j + 1] = v / beta[j]
    return SymTridiag(alpha, beta)


def spectral_weights(T: SymTridiag):
    """Inverse of ``lanczos_from_spectrum``: (eigenvalues, |first components|)."""
    from shiftlab.oracle import dense_eig_oracle

    lam, V = dense_eig_oracle(T.dense())
    return lam, np.abs(V[0, :])


def random_jacobi(lam, rng) -> SymTridiag:
    """Random Jacobi matrix with the given spectrum.

    Weights are square roots of a symmetric Dirichlet draw (uniform on
    the probability simplex), resampled away from the boundary so the
    reconstruction cannot break down.
    """
    lam = np.asarray(lam, dtype=np.float64)
    for _ in range(100):
        p = rng.dirichlet(np.ones(lam.size))
        if np.min(p) > 1e-6:
            return lanczos_from_spectrum(lam, np.sqrt(p))
    raise Breakdown("could not sample interior weights")
