# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled hot loops: cyclic Jacobi sweeps and Bland-rule simplex pivoting."""

import numpy as np
from libc.math cimport fabs, sqrt


def jacobi_eigh(double[:, ::1] a, double tol=1e-12, int max_sweeps=100):
    """Eigen-decompose a real symmetric matrix by cyclic Jacobi rotations.

    Returns ``(w, V, sweeps, off)`` with ``a = V diag(w) V^T``.
    """
    cdef Py_ssize_t n = a.shape[0]
    A_np = np.array(a, dtype=np.float64, copy=True)
    V_np = np.eye(n, dtype=np.float64)
    cdef double[:, ::1] A = A_np
    cdef double[:, ::1] V = V_np
    cdef Py_ssize_t p, q, k
    cdef int sweep = 0
    cdef double frob = 0.0, off, thr, apq, theta, t, c, s, x, y
    for p in range(n):
        for q in range(n):
            frob += A[p, q] * A[p, q]
    frob = sqrt(frob)
    thr = tol * (frob if frob > 1.0 else 1.0)
    while True:
        off = 0.0
        for p in range(n):
            for q in range(p + 1, n):
                off += 2.0 * A[p, q] * A[p, q]
        off = sqrt(off)
        if off <= thr or sweep >= max_sweeps:
            break
        sweep += 1
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                if apq == 0.0:
                    continue
                theta = (A[q, q] - A[p, p]) / (2.0 * apq)
                if theta >= 0.0:
                    t = 1.0 / (theta + sqrt(theta * theta + 1.0))
                else:
                    t = -1.0 / (-theta + sqrt(theta * theta + 1.0))
                c = 1.0 / sqrt(t * t + 1.0)
                s = t * c
                for k in range(n):
                    x = A[k, p]
                    y = A[k, q]
                    A[k, p] = c * x - s * y
                    A[k, q] = s * x + c * y
                for k in range(n):
                    x = A[p, k]
                    y = A[q, k]
                    A[p, k] = c * x - s * y
                    A[q, k] = s * x + c * y
                for k in range(n):
                    x = V[k, p]
                    y = V[k, q]
                    V[k, p] = c * x - s * y
                    V[k, q] = s * x + c * y
    w = np.array([A[k, k] for k in range(n)], dtype=np.float64)
    return w, V_np, sweep, off


def simplex_bland(double[:, ::1] T, Py_ssize_t[::1] basis, double tol, long max_iter):
    """Run Bland-rule pivots on a maximisation tableau in place.

    The last row holds reduced costs, the last column the right-hand side.
    Returns ``(status, iterations)``; status 0 optimal, 1 unbounded, 2 limit.
    """
    cdef Py_ssize_t m = T.shape[0] - 1
    cdef Py_ssize_t ncol = T.shape[1] - 1
    cdef Py_ssize_t i, j, k, enter, leave
    cdef long it = 0
    cdef double piv, f, ratio, best, eps
    while it < max_iter:
        enter = -1
        for j in range(ncol):
            if T[m, j] < -tol:
                enter = j
                break
        if enter < 0:
            return 0, it
        leave = -1
        best = 0.0
        for i in range(m):
            if T[i, enter] > tol:
                ratio = T[i, ncol] / T[i, enter]
                if leave < 0:
                    leave = i
                    best = ratio
                else:
                    eps = 1e-12 * (fabs(best) if fabs(best) > 1.0 else 1.0)
                    if ratio < best - eps or (fabs(ratio - best) <= eps and basis[i] < basis[leave]):
                        leave = i
                        best = ratio
        if leave < 0:
            return 1, it
        piv = T[leave, enter]
        for k in range(ncol + 1):
            T[leave, k] /= piv
        for i in range(m + 1):
            if i == leave:
                continue
            f = T[i, enter]
            if f == 0.0:
                continue
            for k in range(ncol + 1):
                T[i, k] -= f * T[leave, k]
        basis[leave] = enter
        it += 1
    return 2, it


def herm_jacobi_batch(double complex[:, :, ::1] a, double tol=1e-12, int max_sweeps=100):
    """Cyclic complex Jacobi on a stack of Hermitian matrices.

    Each rotation first removes the phase of the pivot, then applies a real
    Givens rotation. Returns ``(w, V, max_sweeps_used)`` with ``w`` unsorted.
    """
    cdef Py_ssize_t B = a.shape[0], n = a.shape[1]
    A_np = np.array(a, dtype=np.complex128, copy=True)
    V_np = np.zeros((B, n, n), dtype=np.complex128)
    W_np = np.zeros((B, n), dtype=np.float64)
    cdef double complex[:, :, ::1] A = A_np
    cdef double complex[:, :, ::1] V = V_np
    cdef double[:, ::1] W = W_np
    cdef Py_ssize_t bi, p, q, k
    cdef int sweep, used = 0
    cdef double frob, off, thr, r, theta, t, c, s
    cdef double complex e, ce, x, y, apq
    for bi in range(B):
        for k in range(n):
            V[bi, k, k] = 1.0
        frob = 0.0
        for p in range(n):
            for q in range(n):
                frob += A[bi, p, q].real * A[bi, p, q].real + A[bi, p, q].imag * A[bi, p, q].imag
        frob = sqrt(frob)
        thr = tol * (frob if frob > 1.0 else 1.0)
        sweep = 0
        while True:
            off = 0.0
            for p in range(n):
                for q in range(p + 1, n):
                    off += 2.0 * (A[bi, p, q].real * A[bi, p, q].real + A[bi, p, q].imag * A[bi, p, q].imag)
            off = sqrt(off)
            if off <= thr or sweep >= max_sweeps:
                break
            sweep += 1
            for p in range(n - 1):
                for q in range(p + 1, n):
                    apq = A[bi, p, q]
                    r = sqrt(apq.real * apq.real + apq.imag * apq.imag)
                    if r == 0.0:
                        continue
                    e = apq / r
                    ce = e.conjugate()
                    theta = (A[bi, q, q].real - A[bi, p, p].real) / (2.0 * r)
                    if theta >= 0.0:
                        t = 1.0 / (theta + sqrt(theta * theta + 1.0))
                    else:
                        t = -1.0 / (-theta + sqrt(theta * theta + 1.0))
                    c = 1.0 / sqrt(t * t + 1.0)
                    s = t * c
                    for k in range(n):
                        x = A[bi, k, p]
                        y = A[bi, k, q] * ce
                        A[bi, k, p] = c * x - s * y
                        A[bi, k, q] = s * x + c * y
                    for k in range(n):
                        x = A[bi, p, k]
                        y = A[bi, q, k] * e
                        A[bi, p, k] = c * x - s * y
                        A[bi, q, k] = s * x + c * y
                    for k in range(n):
                        x = V[bi, k, p]
                        y = V[bi, k, q] * ce
                        V[bi, k, p] = c * x - s * y
                        V[bi, k, q] = s * x + c * y
        if sweep > used:
            used = sweep
        for k in range(n):
            W[bi, k] = A[bi, k, k].real
    return W_np, V_np, used
