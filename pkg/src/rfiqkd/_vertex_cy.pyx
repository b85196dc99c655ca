# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled vertex enumeration for small linear inequality systems.

Same contract as ``_vertex_py.enumerate_vertices``: return the solutions
of all non-degenerate d-subsets of constraints that satisfy the full
system within feas_tol.  Duplicate filtering is left to the caller.
"""

from libc.math cimport fabs
from libc.stdlib cimport free, malloc

import numpy as np


def enumerate_vertices(A, b, double feas_tol=1e-12, double pivot_tol=1e-12):
    cdef double[:, ::1] a_view = np.ascontiguousarray(A, dtype=np.float64)
    cdef double[::1] b_view = np.ascontiguousarray(b, dtype=np.float64)
    cdef Py_ssize_t m = a_view.shape[0]
    cdef Py_ssize_t d = a_view.shape[1]
    if m < d:
        return np.empty((0, d))

    cdef Py_ssize_t n_combo = 1
    cdef Py_ssize_t k
    for k in range(d):
        n_combo = n_combo * (m - k) // (k + 1)

    out = np.empty((n_combo, d), dtype=np.float64)
    cdef double[:, ::1] out_view = out
    cdef Py_ssize_t n_found = 0

    cdef Py_ssize_t* combo = <Py_ssize_t*> malloc(d * sizeof(Py_ssize_t))
    cdef double* work = <double*> malloc(d * (d + 1) * sizeof(double))
    cdef double* x = <double*> malloc(d * sizeof(double))
    if combo == NULL or work == NULL or x == NULL:
        free(combo); free(work); free(x)
        raise MemoryError()

    cdef Py_ssize_t i, j, col, row, piv, pos
    cdef double amax, v, factor, acc
    cdef bint singular, feasible
    cdef Py_ssize_t width = d + 1

    try:
        for i in range(d):
            combo[i] = i
        while True:
            # assemble the augmented d x (d+1) subsystem
            amax = 0.0
            for i in range(d):
                row = combo[i]
                for j in range(d):
                    v = a_view[row, j]
                    work[i * width + j] = v
                    if fabs(v) > amax:
                        amax = fabs(v)
                work[i * width + d] = b_view[row]
            singular = amax == 0.0
            if not singular:
                # Gaussian elimination with partial pivoting
                for col in range(d):
                    piv = col
                    for i in range(col + 1, d):
                        if fabs(work[i * width + col]) > fabs(work[piv * width + col]):
                            piv = i
                    if fabs(work[piv * width + col]) <= pivot_tol * amax:
                        singular = True
                        break
                    if piv != col:
                        for j in range(col, width):
                            v = work[col * width + j]
                            work[col * width + j] = work[piv * width + j]
                            work[piv * width + j] = v
                    for i in range(col + 1, d):
                        factor = work[i * width + col] / work[col * width + col]
                        if factor != 0.0:
                            for j in range(col, width):
                                work[i * width + j] -= factor * work[col * width + j]
            if not singular:
                for col in range(d - 1, -1, -1):
                    acc = work[col * width + d]
                    for j in range(col + 1, d):
                        acc -= work[col * width + j] * x[j]
                    x[col] = acc / work[col * width + col]
                feasible = True
                for row in range(m):
                    acc = 0.0
                    for j in range(d):
                        acc += a_view[row, j] * x[j]
                    if acc > b_view[row] + feas_tol:
                        feasible = False
                        break
                if feasible:
                    for j in range(d):
                        out_view[n_found, j] = x[j]
                    n_found += 1
            # advance the combination odometer
            pos = d - 1
            while pos >= 0 and combo[pos] == m - d + pos:
                pos -= 1
            if pos < 0:
                break
            combo[pos] += 1
            for i in range(pos + 1, d):
                combo[i] = combo[i - 1] + 1
    finally:
        free(combo)
        free(work)
        free(x)

    return out[:n_found].copy()
