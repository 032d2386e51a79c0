"""Kernel backend selection.

The compiled extension is used when importable; set ``HODGESOLVE_KERNELS=python``
to force the pure-Python sweeps.
"""
import os

import numpy as np

from . import _kernels_py

_NAMES = ("fill_forward", "fill_adjoint", "squeeze_forward", "squeeze_adjoint",
          "tree_forward", "tree_adjoint")


def _load(name):
    if name == "python":
        return _kernels_py
    if name == "compiled":
        from . import _kernels
        return _kernels
    raise ValueError(f"unknown kernel backend {name!r}")


def available():
    out = ["python"]
    try:
        _load("compiled")
        out.insert(0, "compiled")
    except ImportError:
        pass
    return out


_requested = os.environ.get("HODGESOLVE_KERNELS", "auto").lower()
if _requested == "auto":
    BACKEND = available()[0]
else:
    BACKEND = _requested
_mod = _load(BACKEND)


def use(name):
    """Switch backend at runtime (used by the benchmark and tests)."""
    global BACKEND, _mod
    _mod = _load(name)
    BACKEND = name


def current():
    return BACKEND


def block(a, dtype):
    """Return a C-contiguous 2-D working copy of ``a`` and whether it was 1-D."""
    a = np.asarray(a)
    flat = a.ndim == 1
    b = a[:, None] if flat else a.reshape(a.shape[0], int(np.prod(a.shape[1:])))
    b = np.array(b, dtype=dtype, order="C", copy=True)
    return b, flat


def work_dtype(a):
    a = np.asarray(a)
    return np.int64 if np.issubdtype(a.dtype, np.integer) or a.dtype == bool else np.float64


def call(name, *args):
    return getattr(_mod, name)(*args)
