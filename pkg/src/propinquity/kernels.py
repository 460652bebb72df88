"""Kernel selection: compiled extension when importable, numpy fallback otherwise."""

import os

from . import _fallback

try:
    if os.environ.get("PROPINQUITY_PURE"):
        raise ImportError("pure backend requested")
    from . import _kernels as _impl

    BACKEND = "compiled"
except ImportError:
    _impl = _fallback
    BACKEND = "python"

jacobi_eigh = _impl.jacobi_eigh
simplex_bland = _impl.simplex_bland
herm_jacobi_batch = _impl.herm_jacobi_batch

__all__ = ["BACKEND", "herm_jacobi_batch", "jacobi_eigh", "simplex_bland"]
