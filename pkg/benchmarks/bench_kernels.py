"""Compiled vs pure-Python kernels: Jacobi (real and complex batch) and Bland simplex.

    python3 benchmarks/bench_kernels.py [--repeat 5]
"""

import argparse
import time

import numpy as np

from propinquity import _fallback

try:
    from propinquity import _kernels
except ImportError:  # extension not built
    _kernels = None


def _sym(n, rng):
    a = rng.standard_normal((n, n))
    return np.ascontiguousarray(a + a.T)


def _herm_batch(b, n, rng):
    g = rng.standard_normal((b, n, n)) + 1j * rng.standard_normal((b, n, n))
    return np.ascontiguousarray(g + np.conj(np.transpose(g, (0, 2, 1))))


def _tableau(m, n, rng):
    A = rng.standard_normal((m, n))
    b = rng.uniform(0.5, 2.0, m)
    c = rng.standard_normal(n)
    T = np.zeros((m + 1, 2 * n + m + 1))
    T[:m, :n], T[:m, n:2 * n], T[:m, 2 * n:2 * n + m] = A, -A, np.eye(m)
    T[:m, -1] = b
    T[m, :n], T[m, n:2 * n] = -c, c
    return T, np.arange(2 * n, 2 * n + m, dtype=np.intp)


def _time(fn, repeat):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t)
    return best, out


def cases(rng):
    for n in (4, 8, 16, 32):
        a = _sym(n, rng)
        yield f"jacobi_eigh n={n}", lambda mod, a=a: mod.jacobi_eigh(a.copy(), 1e-12, 100)[0]
    for b, n in ((64, 2), (16, 4), (4, 8)):
        h = _herm_batch(b, n, rng)
        yield f"herm_jacobi_batch {b}x{n}x{n}", lambda mod, h=h: np.sort(mod.herm_jacobi_batch(h, 1e-12, 100)[0], axis=1)
    for m, n in ((20, 6), (60, 12), (120, 24)):
        T, basis = _tableau(m, n, rng)

        def run(mod, T=T, basis=basis):
            TT, bb = T.copy(), basis.copy()
            mod.simplex_bland(TT, bb, 1e-11, 100000)
            return TT[-1, -1]

        yield f"simplex_bland {m}x{n}", run


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--repeat", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args(argv)
    if _kernels is None:
        print("compiled extension not available; build with pip install -e . --no-build-isolation")
        return 1
    rng = np.random.default_rng(args.seed)
    print(f"{'kernel':32s} {'python [ms]':>12s} {'compiled [ms]':>14s} {'speedup':>9s} {'max diff':>10s}")
    for name, fn in cases(rng):
        tp, rp = _time(lambda: fn(_fallback), args.repeat)
        tc, rc = _time(lambda: fn(_kernels), args.repeat)
        diff = float(np.max(np.abs(np.asarray(rp) - np.asarray(rc))))
        print(f"{name:32s} {1e3 * tp:12.3f} {1e3 * tc:14.3f} {tp / tc:9.1f} {diff:10.2e}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
