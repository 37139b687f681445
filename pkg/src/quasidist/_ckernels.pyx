# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the basis and resampling kernels."""

import numpy as np
cimport numpy as cnp
from libc.math cimport floor

cnp.import_array()


cdef inline double ipow(double b, int e) nogil:
    cdef double r = 1.0
    while e > 0:
        if e & 1:
            r *= b
        b *= b
        e >>= 1
    return r


def basis_matrix(ts, double omega, int degree):
    cdef const double[::1] t = np.ascontiguousarray(ts, dtype=np.float64)
    cdef Py_ssize_t m = t.shape[0]
    cdef int d = degree
    out_arr = np.zeros((m, 2 * d + 1), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    cdef double[::1] binom = np.empty(d + 1, dtype=np.float64)
    cdef Py_ssize_t r
    cdef int i
    cdef double s, s1, u, v, ti, inv = 1.0 / (1.0 - omega)

    binom[0] = 1.0
    for i in range(1, d + 1):
        binom[i] = binom[i - 1] * (d - i + 1) / i

    with nogil:
        for r in range(m):
            ti = t[r]
            if ti < omega:
                s = ti / omega
                s1 = 1.0 - s
                for i in range(d):
                    out[r, i] = binom[i] * ipow(s1, d - i) * ipow(s, i)
                out[r, d] = ipow(s, d)
            else:
                v = (1.0 - ti) * inv
                u = (ti - omega) * inv
                out[r, d] = ipow(v, d)
                for i in range(1, d + 1):
                    out[r, d + i] = binom[i] * ipow(v, d - i) * ipow(u, i)
    return out_arr


def resample_max_below(x, y, Py_ssize_t k_bins):
    cdef const double[::1] xs = np.ascontiguousarray(x, dtype=np.float64)
    cdef const double[::1] ys = np.ascontiguousarray(y, dtype=np.float64)
    cdef Py_ssize_t n = xs.shape[0]
    cdef cnp.int64_t[::1] best = np.full(k_bins + 1, -1, dtype=np.int64)
    chosen_arr = np.full(k_bins, -1, dtype=np.int64)
    values_arr = np.full(k_bins, np.nan, dtype=np.float64)
    cdef cnp.int64_t[::1] chosen = chosen_arr
    cdef double[::1] values = values_arr
    cdef Py_ssize_t j, b, k
    cdef cnp.int64_t cur = -1
    cdef double k0

    with nogil:
        for j in range(n):
            k0 = floor(xs[j]) + 1.0
            if k0 > k_bins:
                continue
            b = <Py_ssize_t>k0 if k0 >= 1.0 else 1
            if best[b] < 0 or xs[j] >= xs[best[b]]:
                best[b] = j
        for k in range(1, k_bins + 1):
            if best[k] >= 0:
                cur = best[k]
            chosen[k - 1] = cur
            if cur >= 0:
                values[k - 1] = ys[cur]
    return values_arr, chosen_arr
