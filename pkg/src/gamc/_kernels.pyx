# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled CSR neighbor aggregation, the hot loop of message passing.

Row additions happen in CSR order, exactly matching the numpy fallback, so
both backends are bit-identical.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()


def neighbor_sum(const cnp.int64_t[::1] offsets, const cnp.int64_t[::1] cols,
                 const double[:, ::1] h):
    """Row i of the result is the sum of h rows over the CSR neighbors of i."""
    cdef Py_ssize_t n = offsets.shape[0] - 1
    cdef Py_ssize_t d = h.shape[1]
    out_arr = np.zeros((n, d), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    cdef Py_ssize_t i, k, j, c
    for i in range(n):
        for k in range(offsets[i], offsets[i + 1]):
            c = cols[k]
            for j in range(d):
                out[i, j] += h[c, j]
    return out_arr
