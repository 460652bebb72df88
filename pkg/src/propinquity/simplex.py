"""Dense-tableau simplex with Bland's rule for ``max c.x`` s.t. ``A x <= b``, ``x`` free, ``b >= 0``.

The origin is feasible by assumption, so no phase one is needed. Free
variables are split as ``x = p - q``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import InconsistentSeminormError, NonConvergenceError, ValidationError

PIVOT_TOL = 1e-11


@dataclass(frozen=True)
class LPResult:
    x: np.ndarray
    value: float
    iterations: int
    dual: np.ndarray


def maximize(c: np.ndarray, A: np.ndarray, b: np.ndarray, tol: float = PIVOT_TOL, max_iter: int = 200000) -> LPResult:
    c = np.asarray(c, dtype=float)
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    m, n = A.shape
    if np.any(b < -1e-12):
        raise ValidationError("origin must be feasible (b >= 0)")
    b = np.clip(b, 0.0, None)
    T = np.zeros((m + 1, 2 * n + m + 1))
    T[:m, :n] = A
    T[:m, n:2 * n] = -A
    T[:m, 2 * n:2 * n + m] = np.eye(m)
    T[:m, -1] = b
    T[m, :n] = -c
    T[m, n:2 * n] = c
    basis = np.arange(2 * n, 2 * n + m, dtype=np.intp)
    status, it = kernels.simplex_bland(T, basis, tol, max_iter)
    if status == 1:
        raise InconsistentSeminormError("LP unbounded: the seminorm kernel is larger than the scalars")
    if status == 2:
        raise NonConvergenceError(f"simplex hit the iteration cap ({max_iter})")
    z = np.zeros(2 * n + m)
    z[basis] = T[:m, -1]
    x = z[:n] - z[n:2 * n]
    dual = T[m, 2 * n:2 * n + m].copy()
    return LPResult(x, float(c @ x), int(it), dual)
