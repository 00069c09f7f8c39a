"""Givens-based factorizations of shifted tridiagonal matrices.

Three factorizations of ``T - s*I``:

* ``qr_star``: Q R with det(Q) = +1 and the first n-1 diagonal entries of
  R positive; defined whenever T - s*I is almost invertible (first n-1
  columns independent).  The last diagonal entry of R carries the sign of
  the determinant and vanishes when s is an eigenvalue.
* ``qr_plain``: the textbook QR with a fully positive R diagonal; requires
  invertibility.  Related to the signed form by a corner sign flip.
* ``rq_star``: R Q with the same sign convention on R, used to invert
  steps.

Each rotation of the chain has determinant +1, so the sign bookkeeping
is structural rather than numerical.
"""

from __future__ import annotations

import numpy as np

from shiftlab import _core
from shiftlab.errors import AlmostSingular, Singular
from shiftlab.tridiag import OrthogonalFactor, SignMatrix, SymTridiag, UpperTriangularBand

# pivot threshold for almost-invertibility; the sign-convention threshold
# for "s is an eigenvalue" is looser (see dynamics.SINGULAR_RTOL)
PIVOT_RTOL = 1e-13
SINGULAR_RTOL = 1e-12


def pivot_tol(T: SymTridiag, s: float) -> float:
    shifted_max = max(float(np.max(np.abs(T.diag - s))), float(np.max(np.abs(T.sub))))
    return PIVOT_RTOL * max(1.0, shifted_max)


def singular_tol(T: SymTridiag) -> float:
    return SINGULAR_RTOL * (1.0 + T.norm())


def qr_star(T: SymTridiag, s: float = 0.0):
    """Signed factorization T - s*I = Q R, det(Q) = +1.

    Returns (OrthogonalFactor, UpperTriangularBand).  Raises
    AlmostSingular when a protected pivot underflows, i.e. (T, s) is
    outside the domain of the signed step.
    """
    try:
        cos, sin, r0, r1, r2 = _core.qr_star_pass(T.diag, T.sub, float(s), pivot_tol(T, s))
    except ValueError as exc:
        if exc.args and exc.args[0] == "pivot underflow":
            raise AlmostSingular(f"pivot {exc.args[1]} underflowed for shift {s}") from None
        raise
    Q = OrthogonalFactor(tuple(zip(range(T.n - 1), cos, sin)), n=T.n)
    R = UpperTriangularBand(r0, r1, r2)
    return Q, R


def qr_plain(T: SymTridiag, s: float = 0.0):
    """Plain factorization T - s*I = Q R with R diagonal fully positive.

    Equals the signed factorization when det(T - s*I) > 0; otherwise the
    corner sign moves into Q, which then has determinant -1.  Raises
    Singular when the determinant vanishes within tolerance.
    """
    Qs, Rs = qr_star(T, s)
    last = float(Rs.main[-1])
    if abs(last) <= singular_tol(T):
        raise Singular(f"shift {s} is an eigenvalue within tolerance")
    if last > 0:
        return Qs, Rs
    flip = np.ones(T.n)
    flip[-1] = -1.0
    Q = OrthogonalFactor(Qs.rotations, post_signs=flip, n=T.n)
    # E_n R scales the last row, which only holds the corner entry
    main = Rs.main.copy()
    main[-1] = -main[-1]
    return Q, UpperTriangularBand(main, Rs.super1, Rs.super2)


def rq_star(T: SymTridiag, s: float = 0.0):
    """Factorization T - s*I = R Q with the signed convention on R.

    Returns (UpperTriangularBand, OrthogonalFactor).  Raises Singular
    when s is an eigenvalue within tolerance.
    """
    tol = max(pivot_tol(T, s), singular_tol(T))
    try:
        cos, sin, r0, r1, r2, flip = _core.rq_star_pass(T.diag, T.sub, float(s), tol)
    except ValueError as exc:
        if exc.args and exc.args[0] == "pivot underflow":
            raise Singular(f"shift {s} is an eigenvalue within tolerance") from None
        raise
    # Q = D . J_0^T . J_1^T ... J_{n-2}^T; J_i^T is the chain rotation (c_i, s_i)
    rots = tuple((i, float(cos[i]), float(sin[i])) for i in range(T.n - 1))
    pre = None
    if flip:
        pre = np.ones(T.n)
        pre[0] = -1.0
        pre[-1] = -1.0
    Q = OrthogonalFactor(rots, pre_signs=pre, n=T.n)
    R = UpperTriangularBand(r0, r1, r2)
    return R, Q


def almost_invertible(T: SymTridiag, s: float = 0.0) -> bool:
    """Whether the first n-1 Gram-Schmidt pivots of T - s*I all clear tolerance."""
    try:
        _core.qr_star_pass(T.diag, T.sub, float(s), pivot_tol(T, s))
    except ValueError:
        return False
    return True


def reconstruct_qr(Q: OrthogonalFactor, R: UpperTriangularBand) -> np.ndarray:
    return Q.dense() @ R.dense()


def reconstruct_rq(R: UpperTriangularBand, Q: OrthogonalFactor) -> np.ndarray:
    return R.dense() @ Q.dense()


def sign_conjugate(T: SymTridiag, E: SignMatrix) -> SymTridiag:
    """E T E: diagonal unchanged, subdiagonal signs flipped per pattern."""
    return E.conjugate(T)
