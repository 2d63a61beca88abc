# cython: language_level=3
"""Compiled interaction walk; semantics identical to the Python fallback."""

import numpy as np


def interaction_walk(long[::1] order, long[:, ::1] cand,
                     double[:, ::1] similarity, double[:, ::1] draws,
                     long[::1] caps, double[:, ::1] delta_e):
    cdef Py_ssize_t n = order.shape[0]
    cdef Py_ssize_t m = cand.shape[1]
    cdef Py_ssize_t oi, ci, i, j
    cdef int total = 0
    cdef double w
    cdef long[::1] cap = np.array(caps, dtype=np.int64)
    cdef unsigned char[:, ::1] checked = np.zeros((n, n), dtype=np.uint8)
    for oi in range(n):
        i = order[oi]
        if cap[i] == 0:
            continue
        for ci in range(m):
            if cap[i] == 0:
                break
            j = cand[i, ci]
            if checked[i, j]:
                continue
            checked[i, j] = 1
            checked[j, i] = 1
            if cap[j] == 0:
                continue
            if draws[i, j] < similarity[i, j]:
                w = similarity[i, j]
                delta_e[i, j] = w
                delta_e[j, i] = w
                cap[i] -= 1
                cap[j] -= 1
                total += 1
    return total
