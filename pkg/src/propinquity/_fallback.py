"""Pure numpy twins of the compiled kernels, used when the extension is absent."""

import math

import numpy as np


def jacobi_eigh(a, tol=1e-12, max_sweeps=100):
    A = np.array(a, dtype=np.float64, copy=True)
    n = A.shape[0]
    V = np.eye(n)
    frob = math.sqrt(float(np.sum(A * A)))
    thr = tol * max(1.0, frob)
    sweep = 0
    iu = np.triu_indices(n, 1)
    while True:
        off = math.sqrt(2.0 * float(np.sum(A[iu] ** 2)))
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
                    t = 1.0 / (theta + math.sqrt(theta * theta + 1.0))
                else:
                    t = -1.0 / (-theta + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                x = A[:, p].copy()
                y = A[:, q].copy()
                A[:, p] = c * x - s * y
                A[:, q] = s * x + c * y
                x = A[p, :].copy()
                y = A[q, :].copy()
                A[p, :] = c * x - s * y
                A[q, :] = s * x + c * y
                x = V[:, p].copy()
                y = V[:, q].copy()
                V[:, p] = c * x - s * y
                V[:, q] = s * x + c * y
    return np.diag(A).copy(), V, sweep, off


def simplex_bland(T, basis, tol, max_iter):
    m = T.shape[0] - 1
    ncol = T.shape[1] - 1
    it = 0
    while it < max_iter:
        neg = np.nonzero(T[m, :ncol] < -tol)[0]
        if neg.size == 0:
            return 0, it
        enter = int(neg[0])
        col = T[:m, enter]
        leave = -1
        best = 0.0
        for i in np.nonzero(col > tol)[0]:
            ratio = T[i, ncol] / col[i]
            if leave < 0:
                leave, best = int(i), ratio
                continue
            eps = 1e-12 * max(1.0, abs(best))
            if ratio < best - eps or (abs(ratio - best) <= eps and basis[i] < basis[leave]):
                leave, best = int(i), ratio
        if leave < 0:
            return 1, it
        T[leave] /= T[leave, enter]
        f = T[:, enter].copy()
        f[leave] = 0.0
        T -= np.outer(f, T[leave])
        basis[leave] = enter
        it += 1
    return 2, it


def herm_jacobi_batch(a, tol=1e-12, max_sweeps=100):
    A = np.array(a, dtype=np.complex128, copy=True)
    B, n, _ = A.shape
    V = np.zeros((B, n, n), dtype=np.complex128)
    W = np.zeros((B, n))
    used = 0
    iu = np.triu_indices(n, 1)
    for bi in range(B):
        M = A[bi]
        U = np.eye(n, dtype=np.complex128)
        thr = tol * max(1.0, math.sqrt(float(np.sum(np.abs(M) ** 2))))
        sweep = 0
        while True:
            off = math.sqrt(2.0 * float(np.sum(np.abs(M[iu]) ** 2)))
            if off <= thr or sweep >= max_sweeps:
                break
            sweep += 1
            for p in range(n - 1):
                for q in range(p + 1, n):
                    apq = M[p, q]
                    r = abs(apq)
                    if r == 0.0:
                        continue
                    e = apq / r
                    theta = (M[q, q].real - M[p, p].real) / (2.0 * r)
                    if theta >= 0.0:
                        t = 1.0 / (theta + math.sqrt(theta * theta + 1.0))
                    else:
                        t = -1.0 / (-theta + math.sqrt(theta * theta + 1.0))
                    c = 1.0 / math.sqrt(t * t + 1.0)
                    s = t * c
                    x = M[:, p].copy()
                    y = M[:, q] * e.conjugate()
                    M[:, p] = c * x - s * y
                    M[:, q] = s * x + c * y
                    x = M[p, :].copy()
                    y = M[q, :] * e
                    M[p, :] = c * x - s * y
                    M[q, :] = s * x + c * y
                    x = U[:, p].copy()
                    y = U[:, q] * e.conjugate()
                    U[:, p] = c * x - s * y
                    U[:, q] = s * x + c * y
        used = max(used, sweep)
        W[bi] = M.diagonal().real
        V[bi] = U
    return W, V, used
