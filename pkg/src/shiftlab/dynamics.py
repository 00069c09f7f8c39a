"""Shifted QR step maps on symmetric tridiagonal matrices.

``phi_star`` is the signed step: conjugation by the determinant +1
orthogonal factor of ``T - s*I``.  It is defined whenever the shifted
matrix is almost invertible, which includes shifts equal to eigenvalues
of the trailing unreduced block; in that singular case a single step
decouples the corner and plants the shift there.  ``phi`` is the
classical step, related to the signed one by a corner sign flip whenever
det(T - s*I) < 0.  Steps with distinct shifts commute and each
non-eigenvalue step is invertible.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from shiftlab import _core
from shiftlab.errors import AlmostSingular, Singular
from shiftlab.factor import pivot_tol, singular_tol
from shiftlab.tridiag import SignMatrix, SymTridiag


@dataclass(frozen=True, eq=False)
class StepResult:
    """One signed step: successor matrix, last R-diagonal ratio, det sign.

    ``ratio_last`` multiplies the bottom subdiagonal entry:
    b(next) = ratio_last * b(T).  ``det_sign`` is the sign of
    det(T - s*I), 0 when the shift is an eigenvalue within tolerance.
    """

    next: SymTridiag
    ratio_last: float
    det_sign: int


def phi_star(T: SymTridiag, s: float) -> StepResult:
    """Signed shifted QR step.

    Raises AlmostSingular when (T, s) is outside the step domain.
    """
    try:
        nd, ne, r0 = _core.phi_star_apply(T.diag, T.sub, float(s), pivot_tol(T, s))
    except ValueError as exc:
        if exc.args and exc.args[0] == "pivot underflow":
            raise AlmostSingular(f"pivot {exc.args[1]} underflowed for shift {s}") from None
        raise
    last = float(r0[-1])
    prev = float(r0[-2])
    if abs(last) <= singular_tol(T):
        det_sign = 0
    else:
        det_sign = 1 if last > 0 else -1
    return StepResult(SymTridiag(nd, ne), last / prev, det_sign)


def step(T: SymTridiag, s: float) -> SymTridiag:
    """The step map: ``phi_star`` returning only the successor."""
    return phi_star(T, s).next


def phi(T: SymTridiag, s: float) -> SymTridiag:
    """Classical shifted QR step (positive R diagonal).

    Equals the signed step when det(T - s*I) > 0 and its corner sign
    flip when the determinant is negative; raises Singular when s is an
    eigenvalue within tolerance.
    """
    res = phi_star(T, s)
    if res.det_sign == 0:
        raise Singular(f"shift {s} is an eigenvalue within tolerance")
    if res.det_sign > 0:
        return res.next
    return SignMatrix.corner_flip(T.n).conjugate(res.next)


def step_inverse(T: SymTridiag, s: float) -> SymTridiag:
    """Inverse of the step map for non-eigenvalue shifts.

    Factors T - s*I as R Q and conjugates by Q; applying ``step`` with
    the same shift to the result reproduces T.
    """
    tol = max(pivot_tol(T, s), singular_tol(T))
    try:
        nd, ne = _core.rq_conjugate(T.diag, T.sub, float(s), tol)
    except ValueError as exc:
        if exc.args and exc.args[0] == "pivot underflow":
            raise Singular(f"shift {s} is an eigenvalue within tolerance") from None
        raise
    return SymTridiag(nd, ne)


def sign_conjugate(T: SymTridiag, E: SignMatrix) -> SymTridiag:
    """E T E, the subdiagonal sign-flip action; commutes with steps."""
    return E.conjugate(T)


def drop_signs(T: SymTridiag) -> SymTridiag:
    """Replace subdiagonal entries by absolute values (Jacobi-cell folding)."""
    return SymTridiag(T.diag, np.abs(T.sub))
