"""Pure-Python kernel fallback.

Mirrors ``_kernels.pyx`` operation for operation.  Both backends execute
the identical sequence of IEEE-754 double operations (plain sqrt instead
of hypot, no FMA on the compiled side), so their outputs agree bitwise.

Kernel contract: ``d``/``e`` are the diagonal and subdiagonal of a real
symmetric tridiagonal matrix as float64 numpy arrays, ``shift`` the scalar
shift, ``ptol`` the pivot tolerance.  Pivot underflow raises ValueError
with the failing pivot index in ``args[1]``; callers translate that into
the domain-specific exception.
"""

from math import sqrt

import numpy as np

BACKEND = "python"


def qr_star_pass(d, e, shift, ptol):
    """Left Givens chain triangularizing T - shift*I with positive pivots.

    Returns (cos, sin, r0, r1, r2): the n-1 rotations and the three bands
    of the upper triangular factor.  Pivots 0..n-2 are positive; the last
    diagonal entry r0[n-1] carries the sign of det(T - shift*I).
    """
    d = d.tolist()
    e = e.tolist()
    n = len(d)
    cos = [0.0] * (n - 1)
    sin = [0.0] * (n - 1)
    r0 = [0.0] * n
    r1 = [0.0] * (n - 1)
    r2 = [0.0] * (n - 2) if n > 2 else []
    p = d[0] - shift
    u = e[0]
    for i in range(n - 1):
        b = e[i]
        r = sqrt(p * p + b * b)
        if r <= ptol:
            raise ValueError("pivot underflow", i)
        c = p / r
        s = b / r
        cos[i] = c
        sin[i] = s
        r0[i] = r
        dn = d[i + 1] - shift
        r1[i] = c * u + s * dn
        p = -s * u + c * dn
        if i + 1 < n - 1:
            r2[i] = s * e[i + 1]
            u = c * e[i + 1]
    r0[n - 1] = p
    return (
        np.array(cos),
        np.array(sin),
        np.array(r0),
        np.array(r1),
        np.array(r2),
    )


def phi_star_apply(d, e, shift, ptol):
    """Fused signed step: factorize T - shift*I, conjugate T by the rotations.

    The conjugation is applied two-sidedly on a dense scratch copy; the
    result is re-symmetrized by averaging matching off-diagonal pairs and
    truncated back to the tridiagonal band.  Returns (nd, ne, r0).
    """
    cos, sin, r0, _r1, _r2 = qr_star_pass(d, e, shift, ptol)
    dl = d.tolist()
    el = e.tolist()
    n = len(dl)
    A = [[0.0] * n for _ in range(n)]
    for i in range(n):
        A[i][i] = dl[i]
    for i in range(n - 1):
        A[i][i + 1] = el[i]
        A[i + 1][i] = el[i]
    cl = cos.tolist()
    sl = sin.tolist()
    for i in range(n - 1):
        c = cl[i]
        s = sl[i]
        ri = A[i]
        rj = A[i + 1]
        for j in range(n):
            x = ri[j]
            y = rj[j]
            ri[j] = c * x + s * y
            rj[j] = -s * x + c * y
        for j in range(n):
            rw = A[j]
            x = rw[i]
            y = rw[i + 1]
            rw[i] = c * x + s * y
            rw[i + 1] = -s * x + c * y
    nd = np.array([A[i][i] for i in range(n)])
    ne = np.array([0.5 * (A[i + 1][i] + A[i][i + 1]) for i in range(n - 1)])
    return nd, ne, r0


def rq_star_pass(d, e, shift, ptol):
    """Right Givens chain for the RQ factorization of T - shift*I.

    Returns (cos, sin, r0, r1, r2, flip).  Diagonal entries 1..n-1 of the
    raw factor are positive by construction; ``flip`` reports whether the
    sign fix D = diag(-1, 1, ..., 1, -1) was needed to make entry 0
    positive (the returned bands already include it).
    """
    d = d.tolist()
    e = e.tolist()
    n = len(d)
    cos = [0.0] * (n - 1)
    sin = [0.0] * (n - 1)
    r0 = [0.0] * n
    r1 = [0.0] * (n - 1)
    r2 = [0.0] * (n - 2) if n > 2 else []
    p = d[n - 1] - shift
    w = e[n - 2]
    for i in range(n - 2, -1, -1):
        v = e[i]
        r = sqrt(p * p + v * v)
        if r <= ptol:
            raise ValueError("pivot underflow", i + 1)
        c = p / r
        s = v / r
        cos[i] = c
        sin[i] = s
        r0[i + 1] = r
        dn = d[i] - shift
        r1[i] = s * dn + c * w
        p = c * dn - s * w
        if i > 0:
            r2[i - 1] = s * e[i - 1]
            w = c * e[i - 1]
    if abs(p) <= ptol:
        raise ValueError("pivot underflow", 0)
    flip = p < 0.0
    if flip:
        # columns 0 and n-1 scaled by -1
        r0[0] = -p
        r0[n - 1] = -r0[n - 1]
        r1[n - 2] = -r1[n - 2]
        if n > 2:
            r2[n - 3] = -r2[n - 3]
    else:
        r0[0] = p
    return (
        np.array(cos),
        np.array(sin),
        np.array(r0),
        np.array(r1),
        np.array(r2),
        flip,
    )


def rq_conjugate(d, e, shift, ptol):
    """Fused inverse step: RQ-factor T - shift*I, return Q T Q^T bands.

    Applying the forward signed step with the same shift to the result
    reproduces T.  Returns (nd, ne).
    """
    cos, sin, _r0, _r1, _r2, flip = rq_star_pass(d, e, shift, ptol)
    dl = d.tolist()
    el = e.tolist()
    n = len(dl)
    A = [[0.0] * n for _ in range(n)]
    for i in range(n):
        A[i][i] = dl[i]
    for i in range(n - 1):
        A[i][i + 1] = el[i]
        A[i + 1][i] = el[i]
    cl = cos.tolist()
    sl = sin.tolist()
    for i in range(n - 2, -1, -1):
        c = cl[i]
        s = sl[i]
        ri = A[i]
        rj = A[i + 1]
        for j in range(n):
            x = ri[j]
            y = rj[j]
            ri[j] = c * x - s * y
            rj[j] = s * x + c * y
        for j in range(n):
            rw = A[j]
            x = rw[i]
            y = rw[i + 1]
            rw[i] = c * x - s * y
            rw[i + 1] = s * x + c * y
    nd = np.array([A[i][i] for i in range(n)])
    ne = np.array([0.5 * (A[i + 1][i] + A[i][i + 1]) for i in range(n - 1)])
    if flip and n > 2:
        # conjugation by diag(-1, 1, ..., 1, -1)
        ne[0] = -ne[0]
        ne[n - 2] = -ne[n - 2]
    return nd, ne
