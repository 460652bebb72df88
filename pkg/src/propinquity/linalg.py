"""Small dense linear algebra built on the kernels: Hermitian spectra, rank, nullspaces."""

from __future__ import annotations

import numpy as np

from . import kernels
from .errors import NonConvergenceError

JACOBI_TOL = 1e-12
PIVOT_TOL = 1e-9


def real_embedding(h: np.ndarray) -> np.ndarray:
    """Real symmetric 2n x 2n matrix carrying the spectrum of Hermitian ``h`` twice."""
    x = np.ascontiguousarray(h.real, dtype=np.float64)
    y = np.ascontiguousarray(h.imag, dtype=np.float64)
    top = np.hstack([x, -y])
    bot = np.hstack([y, x])
    out = np.vstack([top, bot])
    return np.ascontiguousarray(0.5 * (out + out.T))


def symmetric_eigh(a: np.ndarray, tol: float = JACOBI_TOL, max_sweeps: int = 100):
    """Sorted eigenvalues and eigenvectors of a real symmetric matrix."""
    a = np.ascontiguousarray(a, dtype=np.float64)
    if a.shape[0] == 0:
        return np.zeros(0), np.zeros((0, 0))
    w, v, sweeps, off = kernels.jacobi_eigh(a, tol, max_sweeps)
    if sweeps >= max_sweeps and off > tol * max(1.0, float(np.linalg.norm(a))):
        raise NonConvergenceError(f"Jacobi stalled after {sweeps} sweeps, off={off:.3e}")
    order = np.argsort(w, kind="stable")
    return w[order], v[:, order]


def batch_hermitian_eigh(h: np.ndarray, tol: float = JACOBI_TOL, max_sweeps: int = 100):
    """Eigenpairs of a stack ``(B, n, n)`` of Hermitian matrices; values ascending per matrix."""
    h = np.ascontiguousarray(h, dtype=np.complex128)
    w, v, sweeps = kernels.herm_jacobi_batch(h, tol, max_sweeps)
    if sweeps >= max_sweeps:
        raise NonConvergenceError(f"complex Jacobi stalled after {sweeps} sweeps")
    order = np.argsort(w, axis=1, kind="stable")
    w = np.take_along_axis(w, order, axis=1)
    v = np.take_along_axis(v, order[:, None, :], axis=2)
    return w, v


def hermitian_eigh(h: np.ndarray):
    """Eigenvalues (ascending) and an orthonormal complex eigenbasis of ``h``."""
    h = np.asarray(h, dtype=complex)
    if h.shape[0] == 1:
        return np.array([h[0, 0].real]), np.ones((1, 1), dtype=complex)
    w, v = batch_hermitian_eigh(0.5 * (h + h.conj().T)[None])
    return w[0], v[0]


def hermitian_eigvals(h: np.ndarray) -> np.ndarray:
    """Eigenvalues of a Hermitian matrix, ascending."""
    h = np.asarray(h)
    if h.shape[0] == 1:
        return np.array([float(np.real(h[0, 0]))])
    if not np.iscomplexobj(h) or not np.any(h.imag):
        return symmetric_eigh(np.real(h))[0]
    return hermitian_eigh(h)[0]


def hermitian_norm(h: np.ndarray) -> float:
    w = hermitian_eigvals(h)
    return float(max(abs(w[0]), abs(w[-1])))


def top_eigpair(h: np.ndarray):
    """Eigenpair of largest modulus: ``(lam, v)`` with ``|lam| = ||h||``."""
    vals, vecs = hermitian_eigh(h)
    k = 0 if abs(vals[0]) > abs(vals[-1]) else len(vals) - 1
    return vals[k], vecs[:, k]


def operator_norm_matrix(b: np.ndarray, herm_tol: float = 1e-14) -> float:
    """Spectral norm of one square block via Jacobi (dilation when not Hermitian)."""
    b = np.asarray(b)
    n = b.shape[0]
    if n == 1:
        return float(abs(b[0, 0]))
    scale = max(1.0, float(np.max(np.abs(b))))
    if np.max(np.abs(b - b.conj().T)) <= herm_tol * scale:
        return hermitian_norm(0.5 * (b + b.conj().T))
    dil = np.zeros((2 * n, 2 * n), dtype=complex)
    dil[:n, n:] = b
    dil[n:, :n] = b.conj().T
    return hermitian_norm(dil)


def orthonormalize(vectors: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    """Modified Gram-Schmidt (two passes) keeping columns above ``tol`` relative norm."""
    vectors = np.asarray(vectors)
    out: list[np.ndarray] = []
    for col in vectors.T:
        ref = np.linalg.norm(col)
        if ref == 0.0:
            continue
        v = col.astype(np.result_type(col, 1.0), copy=True)
        for _ in range(2):
            for q in out:
                v = v - np.vdot(q, v) * q
        nv = np.linalg.norm(v)
        if nv > tol * max(1.0, ref):
            out.append(v / nv)
    if not out:
        return np.zeros((vectors.shape[0], 0), dtype=vectors.dtype)
    return np.array(out).T


def row_reduce(m: np.ndarray, tol: float = PIVOT_TOL):
    """Reduced row echelon form by Gaussian elimination with partial pivoting.

    The pivot threshold is ``tol * max(1, max|m|)``. Returns ``(R, pivots)``.
    """
    r = np.array(m, dtype=np.result_type(m, 1.0), copy=True)
    rows, cols = r.shape
    thr = tol * max(1.0, float(np.max(np.abs(r)))) if r.size else tol
    pivots: list[int] = []
    row = 0
    for col in range(cols):
        if row >= rows:
            break
        k = row + int(np.argmax(np.abs(r[row:, col])))
        if abs(r[k, col]) <= thr:
            r[row:, col] = 0.0
            continue
        if k != row:
            r[[row, k]] = r[[k, row]]
        r[row] = r[row] / r[row, col]
        f = r[:, col].copy()
        f[row] = 0.0
        r -= np.outer(f, r[row])
        pivots.append(col)
        row += 1
    return r, pivots


def rank(m: np.ndarray, tol: float = PIVOT_TOL) -> int:
    m = np.asarray(m)
    if m.size == 0:
        return 0
    return len(row_reduce(m, tol)[1])


def nullspace(m: np.ndarray, tol: float = PIVOT_TOL) -> np.ndarray:
    """Orthonormal basis (columns) of the kernel of ``m``."""
    m = np.asarray(m)
    n = m.shape[1]
    if m.shape[0] == 0:
        return np.eye(n, dtype=np.result_type(m, 1.0))
    r, piv = row_reduce(m, tol)
    free = [c for c in range(n) if c not in piv]
    basis = np.zeros((n, len(free)), dtype=r.dtype)
    for j, fc in enumerate(free):
        basis[fc, j] = 1.0
        for i, pc in enumerate(piv):
            basis[pc, j] = -r[i, fc]
    return orthonormalize(basis, tol=1e-12)


def solve_consistent(m: np.ndarray, b: np.ndarray, tol: float = PIVOT_TOL):
    """A particular solution of ``m x = b``; returns ``(x, residual)``."""
    m = np.asarray(m, dtype=float)
    b = np.asarray(b, dtype=float)
    aug = np.hstack([m, b.reshape(-1, 1)])
    r, piv = row_reduce(aug, tol)
    n = m.shape[1]
    x = np.zeros(n)
    for i, pc in enumerate(piv):
        if pc < n:
            x[pc] = r[i, n]
    return x, float(np.max(np.abs(m @ x - b))) if b.size else 0.0
