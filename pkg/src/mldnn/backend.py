"""Kernel backend selection.

The compiled extension is used when available; the numpy implementation is
the fallback. Both produce bit-identical results, so switching backends never
changes any number. Override with MLDNN_BACKEND=cython|python or
set_backend().
"""

import os

from . import _kernels_py

try:
    from . import _kernels as _compiled
except ImportError:
    _compiled = None

_BACKENDS = {"python": _kernels_py.matmul}
if _compiled is not None:
    _BACKENDS["cython"] = _compiled.matmul


def available_backends():
    return sorted(_BACKENDS)


def set_backend(name: str) -> None:
    if name not in _BACKENDS:
        raise ValueError(
            f"unknown backend {name!r}; available: {available_backends()}"
        )
    global _active, _matmul
    _active = name
    _matmul = _BACKENDS[name]


def active_backend() -> str:
    return _active


def matmul_kernel(a, b, transpose_a, transpose_b):
    return _matmul(a, b, transpose_a, transpose_b)


_requested = os.environ.get("MLDNN_BACKEND", "auto").lower()
if _requested == "auto":
    _requested = "cython" if _compiled is not None else "python"
set_backend(_requested)
