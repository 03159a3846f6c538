# cython: language_level=3, boundscheck=False, wraparound=False, initializedcheck=False
"""Compiled enumeration kernel: candidate-index assignment rows in canonical
nondecreasing-distance order. Semantics identical to `_enum_py.assignment_chunks`.
"""

import numpy as np


def assignment_chunks(counts, radius, chunk=1024, order=None):
    """Yield int32 arrays of shape (k, m), k <= chunk, covering every
    assignment with at most `radius` substituted columns exactly once."""
    cdef Py_ssize_t m = len(counts)
    if chunk < 1:
        raise ValueError("chunk must be >= 1")
    cols = list(range(m)) if order is None else list(order)
    if sorted(cols) != list(range(m)):
        raise ValueError("order must be a permutation of the columns")
    eff_list = [i for i in cols if counts[i] > 0]

    cdef Py_ssize_t n_eff = len(eff_list)
    cdef Py_ssize_t depth = min(max(radius, 0), n_eff)
    cdef Py_ssize_t cap = chunk

    eff_arr = np.asarray(eff_list, dtype=np.intp)
    cnt_arr = np.asarray([counts[i] for i in eff_list], dtype=np.int32)
    combo_arr = np.zeros(max(depth, 1), dtype=np.intp)
    vals_arr = np.zeros(max(depth, 1), dtype=np.int32)

    cdef Py_ssize_t[::1] eff = eff_arr
    cdef int[::1] cnt = cnt_arr
    cdef Py_ssize_t[::1] combo = combo_arr
    cdef int[::1] vals = vals_arr

    buf_arr = np.zeros((cap, m), dtype=np.int32)
    cdef int[:, ::1] buf = buf_arr
    cdef Py_ssize_t k = 1  # row 0 is the unmodified assignment
    cdef Py_ssize_t d, j, jj

    for d in range(1, depth + 1):
        for j in range(d):
            combo[j] = j
        while True:  # over combinations of size d (lexicographic)
            for j in range(d):
                vals[j] = 1
            while True:  # over candidate choices (odometer, last column fastest)
                if k == cap:
                    yield buf_arr
                    buf_arr = np.zeros((cap, m), dtype=np.int32)
                    buf = buf_arr
                    k = 0
                for j in range(d):
                    buf[k, eff[combo[j]]] = vals[j]
                k += 1
                j = d - 1
                while j >= 0 and vals[j] == cnt[combo[j]]:
                    j -= 1
                if j < 0:
                    break
                vals[j] += 1
                for jj in range(j + 1, d):
                    vals[jj] = 1
            j = d - 1
            while j >= 0 and combo[j] == n_eff - d + j:
                j -= 1
            if j < 0:
                break
            combo[j] += 1
            for jj in range(j + 1, d):
                combo[jj] = combo[jj - 1] + 1
    yield buf_arr[:k]
