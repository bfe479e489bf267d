# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled hot kernels; drop-in twins of the pure-numpy versions."""

import numpy as np

cimport numpy as cnp

cnp.import_array()


def accumulate(cnp.int64_t[::1] exps, cnp.int64_t[::1] weights, Py_ssize_t m):
    """out[exps[i] mod m] += weights[i]."""
    out_arr = np.zeros(m, dtype=np.int64)
    cdef cnp.int64_t[::1] out = out_arr
    cdef Py_ssize_t i, n = exps.shape[0]
    cdef cnp.int64_t r
    for i in range(n):
        r = exps[i] % m
        if r < 0:
            r += m
        out[r] += weights[i]
    return out_arr


def outer_conv(
    cnp.int64_t[::1] e1,
    cnp.int64_t[::1] w1,
    cnp.int64_t[::1] e2,
    cnp.int64_t[::1] w2,
    Py_ssize_t m,
    int sign2,
):
    """out[(e1[i] + sign2*e2[j]) mod m] += w1[i]*w2[j] over all pairs."""
    out_arr = np.zeros(m, dtype=np.int64)
    cdef cnp.int64_t[::1] out = out_arr
    cdef Py_ssize_t i, j, n1 = e1.shape[0], n2 = e2.shape[0]
    cdef cnp.int64_t a, wa, r
    cdef int s = 1 if sign2 >= 0 else -1
    for i in range(n1):
        a = e1[i] % m
        wa = w1[i]
        for j in range(n2):
            r = (a + s * e2[j]) % m
            if r < 0:
                r += m
            out[r] += wa * w2[j]
    return out_arr


def char_sum_block(
    cnp.int64_t[::1] base,
    cnp.int64_t[::1] step,
    cnp.int64_t[::1] ts,
    Py_ssize_t m,
):
    """Row r counts (base[i] - ts[r]*step[i]) mod m over i."""
    out_arr = np.zeros((ts.shape[0], m), dtype=np.int64)
    cdef cnp.int64_t[:, ::1] out = out_arr
    cdef Py_ssize_t r, i, k = ts.shape[0], n = base.shape[0]
    cdef cnp.int64_t t, v
    for r in range(k):
        t = ts[r]
        for i in range(n):
            v = (base[i] - t * step[i]) % m
            if v < 0:
                v += m
            out[r, v] += 1
    return out_arr
