# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled kernels: factorization passes and fused steps.

Operation-for-operation mirror of ``_kernels_py`` (same IEEE-754 double
sequence: plain sqrt, no FMA), so both backends agree bitwise.  See the
fallback module for the kernel contract.
"""

from libc.math cimport sqrt

import numpy as np

BACKEND = "cython"


def qr_star_pass(const double[::1] d, const double[::1] e, double shift, double ptol):
    cdef Py_ssize_t n = d.shape[0]
    cdef Py_ssize_t i
    cos_a = np.empty(n - 1)
    sin_a = np.empty(n - 1)
    r0_a = np.empty(n)
    r1_a = np.empty(n - 1)
    r2_a = np.empty(n - 2 if n > 2 else 0)
    cdef double[::1] cos = cos_a
    cdef double[::1] sin = sin_a
    cdef double[::1] r0 = r0_a
    cdef double[::1] r1 = r1_a
    cdef double[::1] r2 = r2_a
    cdef double p = d[0] - shift
    cdef double u = e[0]
    cdef double b, r, c, s, dn
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
    return cos_a, sin_a, r0_a, r1_a, r2_a


def phi_star_apply(const double[::1] d, const double[::1] e, double shift, double ptol):
    cos_a, sin_a, r0_a, r1_a, r2_a = qr_star_pass(d, e, shift, ptol)
    cdef double[::1] cos = cos_a
    cdef double[::1] sin = sin_a
    cdef Py_ssize_t n = d.shape[0]
    cdef Py_ssize_t i, j
    A_a = np.zeros((n, n))
    cdef double[:, ::1] A = A_a
    for i in range(n):
        A[i, i] = d[i]
    for i in range(n - 1):
        A[i, i + 1] = e[i]
        A[i + 1, i] = e[i]
    cdef double c, s, x, y
    for i in range(n - 1):
        c = cos[i]
        s = sin[i]
        for j in range(n):
            x = A[i, j]
            y = A[i + 1, j]
            A[i, j] = c * x + s * y
            A[i + 1, j] = -s * x + c * y
        for j in range(n):
            x = A[j, i]
            y = A[j, i + 1]
            A[j, i] = c * x + s * y
            A[j, i + 1] = -s * x + c * y
    nd_a = np.empty(n)
    ne_a = np.empty(n - 1)
    cdef double[::1] nd = nd_a
    cdef double[::1] ne = ne_a
    for i in range(n):
        nd[i] = A[i, i]
    for i in range(n - 1):
        ne[i] = 0.5 * (A[i + 1, i] + A[i, i + 1])
    return nd_a, ne_a, r0_a


def rq_star_pass(const double[::1] d, const double[::1] e, double shift, double ptol):
    cdef Py_ssize_t n = d.shape[0]
    cdef Py_ssize_t i
    cos_a = np.empty(n - 1)
    sin_a = np.empty(n - 1)
    r0_a = np.empty(n)
    r1_a = np.empty(n - 1)
    r2_a = np.empty(n - 2 if n > 2 else 0)
    cdef double[::1] cos = cos_a
    cdef double[::1] sin = sin_a
    cdef double[::1] r0 = r0_a
    cdef double[::1] r1 = r1_a
    cdef double[::1] r2 = r2_a
    cdef double p = d[n - 1] - shift
    cdef double w = e[n - 2]
    cdef double v, r, c, s, dn
    cdef bint flip
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
    if -ptol <= p <= ptol:
        raise ValueError("pivot underflow", 0)
    flip = p < 0.0
    if flip:
        r0[0] = -p
        r0[n - 1] = -r0[n - 1]
        r1[n - 2] = -r1[n - 2]
        if n > 2:
            r2[n - 3] = -r2[n - 3]
    else:
        r0[0] = p
    return cos_a, sin_a, r0_a, r1_a, r2_a, bool(flip)


def rq_conjugate(const double[::1] d, const double[::1] e, double shift, double ptol):
    cos_a, sin_a, r0_a, r1_a, r2_a, flip = rq_star_pass(d, e, shift, ptol)
    cdef double[::1] cos = cos_a
    cdef double[::1] sin = sin_a
    cdef Py_ssize_t n = d.shape[0]
    cdef Py_ssize_t i, j
    A_a = np.zeros((n, n))
    cdef double[:, ::1] A = A_a
    for i in range(n):
        A[i, i] = d[i]
    for i in range(n - 1):
        A[i, i + 1] = e[i]
        A[i + 1, i] = e[i]
    cdef double c, s, x, y
    for i in range(n - 2, -1, -1):
        c = cos[i]
        s = sin[i]
        for j in range(n):
            x = A[i, j]
            y = A[i + 1, j]
            A[i, j] = c * x - s * y
            A[i + 1, j] = s * x + c * y
        for j in range(n):
            x = A[j, i]
            y = A[j, i + 1]
            A[j, i] = c * x - s * y
            A[j, i + 1] = s * x + c * y
    nd_a = np.empty(n)
    ne_a = np.empty(n - 1)
    cdef double[::1] nd = nd_a
    cdef double[::1] ne = ne_a
    for i in range(n):
        nd[i] = A[i, i]
    for i in range(n - 1):
        ne[i] = 0.5 * (A[i + 1, i] + A[i, i + 1])
    if flip and n > 2:
        ne[0] = -ne[0]
        ne[n - 2] = -ne[n - 2]
    return nd_a, ne_a
