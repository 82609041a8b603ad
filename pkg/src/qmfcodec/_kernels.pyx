# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled BCD kernels. Must stay bit-identical with ``_fallback.py``.

The mixed sum over the other columns is a sum of integer-valued doubles well
below 2**53, so it is exact in any order; that lets the inner loop use four
independent accumulators.
"""
import numpy as np

from libc.math cimport round as c_round


cdef inline double _project(double q, double alpha, double beta) noexcept nogil:
    q = c_round(q)
    if q < alpha:
        return alpha
    if q > beta:
        return beta
    return q


cdef bint _update(const double[:, ::1] A, const double[:, ::1] B,
                  double[:, ::1] U, Py_ssize_t r,
                  double alpha, double beta, double[::1] b) noexcept nogil:
    cdef Py_ssize_t m = U.shape[0], k = U.shape[1], i, t
    cdef double d = B[r, r], s0, s1, s2, s3
    cdef double *row
    if d == 0.0:
        return False
    for t in range(k):
        b[t] = B[t, r]
    b[r] = 0.0
    for i in range(m):
        row = &U[i, 0]
        s0 = s1 = s2 = s3 = 0.0
        t = 0
        while t + 4 <= k:
            s0 += row[t] * b[t]
            s1 += row[t + 1] * b[t + 1]
            s2 += row[t + 2] * b[t + 2]
            s3 += row[t + 3] * b[t + 3]
            t += 4
        while t < k:
            s0 += row[t] * b[t]
            t += 1
        row[r] = _project((A[i, r] - ((s0 + s1) + (s2 + s3))) / d, alpha, beta)
    return True


def round_half_away(double[::1] x):
    out = np.empty(x.shape[0], dtype=np.float64)
    cdef double[::1] o = out
    cdef Py_ssize_t i
    with nogil:
        for i in range(x.shape[0]):
            o[i] = c_round(x[i])
    return out


def update_column(const double[:, ::1] A, const double[:, ::1] B,
                  double[:, ::1] U, Py_ssize_t r, double alpha, double beta):
    cdef double[::1] buf = np.empty(U.shape[1], dtype=np.float64)
    cdef bint done
    with nogil:
        done = _update(A, B, U, r, alpha, beta, buf)
    return bool(done)


def half_sweep(const double[:, ::1] A, const double[:, ::1] B,
               double[:, ::1] U, double alpha, double beta):
    cdef double[::1] buf = np.empty(U.shape[1], dtype=np.float64)
    cdef Py_ssize_t r
    with nogil:
        for r in range(U.shape[1]):
            _update(A, B, U, r, alpha, beta, buf)
