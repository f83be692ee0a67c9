# cython: language_level=3, boundscheck=False, wraparound=False, initializedcheck=False
"""Compiled relation kernels; same contract as _pykernels."""

import numpy as np
from libc.stdint cimport uint64_t
from libc.string cimport memcmp, memcpy, memset

cdef extern from *:
    int __builtin_ctzll(unsigned long long x) nogil


cdef void _compose(const uint64_t[:, ::1] a, const uint64_t[:, ::1] b,
                   uint64_t[:, ::1] o) noexcept nogil:
    cdef Py_ssize_t n = a.shape[0], w = a.shape[1], m = b.shape[1], nb = b.shape[0]
    cdef Py_ssize_t i, k, j, x
    cdef uint64_t word
    memset(&o[0, 0], 0, n * m * sizeof(uint64_t))
    for i in range(n):
        for k in range(w):
            word = a[i, k]
            while word:
                j = k * 64 + __builtin_ctzll(word)
                word &= word - 1
                if j >= nb:
                    break
                for x in range(m):
                    o[i, x] |= b[j, x]


def compose(const uint64_t[:, ::1] a, const uint64_t[:, ::1] b):
    out = np.empty((a.shape[0], b.shape[1]), dtype="<u8")
    cdef uint64_t[:, ::1] o = out
    if a.shape[0] and b.shape[1]:
        with nogil:
            _compose(a, b, o)
    return out


def while_lfp(const uint64_t[:, ::1] exit_rows, const uint64_t[:, ::1] step, Py_ssize_t max_iter):
    cdef Py_ssize_t n = exit_rows.shape[0], m = exit_rows.shape[1]
    r_arr = np.zeros((n, m), dtype="<u8")
    nxt_arr = np.empty((n, m), dtype="<u8")
    cdef uint64_t[:, ::1] r = r_arr
    cdef uint64_t[:, ::1] nxt = nxt_arr
    cdef Py_ssize_t it = 0, i, x
    cdef bint same
    if n == 0 or m == 0:
        return r_arr, 1
    with nogil:
        while it <= max_iter:
            it += 1
            _compose(step, r, nxt)
            for i in range(n):
                for x in range(m):
                    nxt[i, x] |= exit_rows[i, x]
            same = memcmp(&nxt[0, 0], &r[0, 0], n * m * sizeof(uint64_t)) == 0
            if same:
                break
            memcpy(&r[0, 0], &nxt[0, 0], n * m * sizeof(uint64_t))
    return r_arr, it
