"""Pure-python (numpy) matrix-product kernel.

Mirrors the compiled kernel exactly: each output element accumulates its
products along the shared dimension in ascending order, one rounding per
multiply and per add. Results are bit-identical to the compiled backend.
"""

import numpy as np


def matmul(a, b, transpose_a, transpose_b):
    if not transpose_a and not transpose_b:
        n, kk = a.shape
        m = b.shape[1]
        out = np.zeros((n, m))
        for k in range(kk):
            out += a[:, k, None] * b[k, None, :]
    elif transpose_a and not transpose_b:
        kk, n = a.shape
        m = b.shape[1]
        out = np.zeros((n, m))
        for k in range(kk):
            out += a[k, :, None] * b[k, None, :]
    elif not transpose_a and transpose_b:
        n, kk = a.shape
        m = b.shape[0]
        out = np.zeros((n, m))
        for k in range(kk):
            out += a[:, k, None] * b[None, :, k]
    else:
        kk, n = a.shape
        m = b.shape[0]
        out = np.zeros((n, m))
        for k in range(kk):
            out += a[k, :, None] * b[None, :, k]
    return out
