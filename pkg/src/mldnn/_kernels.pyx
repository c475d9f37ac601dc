# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled matrix-product kernels.

Every output element is accumulated along the shared dimension in ascending
order, with one rounding per multiply and one per add (build disables FMA
contraction). The pure-python backend follows the same order, so the two
backends produce bit-identical results.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()


def matmul(double[:, ::1] a, double[:, ::1] b, bint transpose_a, bint transpose_b):
    """Product of two C-contiguous float64 matrices with optional transposes.

    Shape agreement is the caller's job; this only does the arithmetic.
    """
    cdef Py_ssize_t n, m, kk, i, j, k
    cdef double acc, aik
    cdef double[:, ::1] out_v

    if not transpose_a:
        n = a.shape[0]
        kk = a.shape[1]
    else:
        n = a.shape[1]
        kk = a.shape[0]
    m = b.shape[0] if transpose_b else b.shape[1]

    out = np.zeros((n, m), dtype=np.float64)
    out_v = out

    if not transpose_a and not transpose_b:
        # out[i,j] = sum_k a[i,k] * b[k,j]
        for i in range(n):
            for k in range(kk):
                aik = a[i, k]
                for j in range(m):
                    out_v[i, j] += aik * b[k, j]
    elif transpose_a and not transpose_b:
        # out[i,j] = sum_k a[k,i] * b[k,j]
        for i in range(n):
            for k in range(kk):
                aik = a[k, i]
                for j in range(m):
                    out_v[i, j] += aik * b[k, j]
    elif not transpose_a and transpose_b:
        # out[i,j] = sum_k a[i,k] * b[j,k]
        for i in range(n):
            for j in range(m):
                acc = 0.0
                for k in range(kk):
                    acc += a[i, k] * b[j, k]
                out_v[i, j] = acc
    else:
        # out[i,j] = sum_k a[k,i] * b[j,k]
        for i in range(n):
            for j in range(m):
                acc = 0.0
                for k in range(kk):
                    acc += a[k, i] * b[j, k]
                out_v[i, j] = acc

    return out
