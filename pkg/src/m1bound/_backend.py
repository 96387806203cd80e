"""Kernel backend selection.

The compiled extension is used when importable; set ``M1BOUND_BACKEND=python``
to force the numpy fallback.
"""
import os

from . import _kernels_py

if os.environ.get("M1BOUND_BACKEND", "").lower() == "python":
    kernels = _kernels_py
else:
    try:
        from . import _kernels as kernels
    except ImportError:
        kernels = _kernels_py

BACKEND = kernels.BACKEND
