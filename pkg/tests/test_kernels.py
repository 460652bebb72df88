import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from propinquity import _fallback, kernels
from propinquity.simplex import maximize

from .oracles import bisection_eigvals

try:
    from propinquity import _kernels
except ImportError:
    _kernels = None

needs_compiled = pytest.mark.skipif(_kernels is None, reason="compiled extension not built")


def _sym(n, rng):
    a = rng.standard_normal((n, n))
    return np.ascontiguousarray(a + a.T)


def _herm(b, n, rng):
    g = rng.standard_normal((b, n, n)) + 1j * rng.standard_normal((b, n, n))
    return np.ascontiguousarray(g + np.conj(np.transpose(g, (0, 2, 1))))


def test_backend_is_named():
    assert kernels.BACKEND in ("compiled", "python")


def test_pure_env_selects_fallback():
    env = dict(os.environ, PROPINQUITY_PURE="1")
    out = subprocess.run([sys.executable, "-c", "from propinquity import kernels; print(kernels.BACKEND)"], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"


@needs_compiled
@pytest.mark.parametrize("n", [1, 2, 5, 9, 16])
def test_jacobi_compiled_matches_fallback(n):
    a = _sym(n, np.random.default_rng(n))
    wc, vc, sc, _ = _kernels.jacobi_eigh(a.copy(), 1e-12, 100)
    wp, vp, sp, _ = _fallback.jacobi_eigh(a.copy(), 1e-12, 100)
    assert sc == sp
    assert np.allclose(wc, wp, atol=1e-12)
    assert np.allclose(np.abs(vc), np.abs(vp), atol=1e-10)


@needs_compiled
@pytest.mark.parametrize("b,n", [(1, 2), (7, 3), (3, 6)])
def test_herm_batch_compiled_matches_fallback(b, n):
    h = _herm(b, n, np.random.default_rng(b * n))
    wc, vc, _ = _kernels.herm_jacobi_batch(h, 1e-12, 100)
    wp, vp, _ = _fallback.herm_jacobi_batch(h, 1e-12, 100)
    assert np.allclose(wc, wp, atol=1e-11)
    # eigenvectors agree up to a phase per column
    for i in range(b):
        overlap = np.abs(np.sum(vc[i].conj() * vp[i], axis=0))
        assert np.allclose(overlap, 1.0, atol=1e-9)


@needs_compiled
def test_simplex_compiled_matches_fallback():
    rng = np.random.default_rng(3)
    for _ in range(20):
        m, n = 15, 5
        A = rng.standard_normal((m, n))
        T = np.zeros((m + 1, 2 * n + m + 1))
        T[:m, :n], T[:m, n:2 * n], T[:m, 2 * n:2 * n + m] = A, -A, np.eye(m)
        T[:m, -1] = rng.uniform(0.1, 1.0, m)
        c = rng.standard_normal(n)
        T[m, :n], T[m, n:2 * n] = -c, c
        outs = []
        for mod in (_kernels, _fallback):
            TT, bb = T.copy(), np.arange(2 * n, 2 * n + m, dtype=np.intp)
            st_, it = mod.simplex_bland(TT, bb, 1e-11, 10000)
            outs.append((st_, it, TT, bb))
        assert outs[0][0] == outs[1][0] and outs[0][1] == outs[1][1]
        assert np.array_equal(outs[0][3], outs[1][3])
        assert np.allclose(outs[0][2], outs[1][2], atol=1e-12)


@pytest.mark.parametrize("mod", [_fallback] + ([_kernels] if _kernels else []), ids=lambda m: m.__name__)
def test_jacobi_eigenvalues_match_bisection(mod):
    # [DERIVED] inertia-count bisection oracle on 8x8 matrices
    rng = np.random.default_rng(11)
    for _ in range(5):
        a = _sym(8, rng)
        w, v, _, off = mod.jacobi_eigh(a.copy(), 1e-12, 100)
        assert np.max(np.abs(np.sort(w) - bisection_eigvals(a))) <= 1e-9
        assert np.allclose(a @ v, v * w, atol=1e-9)


@pytest.mark.parametrize("mod", [_fallback] + ([_kernels] if _kernels else []), ids=lambda m: m.__name__)
def test_complex_jacobi_matches_bisection(mod):
    rng = np.random.default_rng(12)
    h = _herm(4, 8, rng)
    w, v, _ = mod.herm_jacobi_batch(h, 1e-12, 100)
    for i in range(4):
        assert np.max(np.abs(np.sort(w[i]) - bisection_eigvals(h[i]))) <= 1e-9
        assert np.allclose(v[i].conj().T @ v[i], np.eye(8), atol=1e-10)


def test_complex_jacobi_agrees_with_real_embedding_route():
    # two independent routes to the same spectrum: complex rotations vs the real 2n x 2n embedding
    from propinquity.linalg import real_embedding, symmetric_eigh

    rng = np.random.default_rng(5)
    h = _herm(1, 6, rng)[0]
    w1, _, _ = kernels.herm_jacobi_batch(h[None], 1e-12, 100)
    w2, _ = symmetric_eigh(real_embedding(h))
    assert np.allclose(np.sort(w1[0]), w2[::2], atol=1e-10)
    assert np.allclose(w2[::2], w2[1::2], atol=1e-10)


@given(st.integers(2, 7), st.integers(0, 10_000))
def test_jacobi_reconstructs(n, seed):
    a = _sym(n, np.random.default_rng(seed))
    w, v, _, _ = kernels.jacobi_eigh(a.copy(), 1e-12, 100)
    assert np.allclose(v @ np.diag(w) @ v.T, a, atol=1e-9 * max(1, np.abs(a).max()))
    assert np.allclose(v.T @ v, np.eye(n), atol=1e-10)


def test_bland_terminates_on_beale_cycling_example():
    # Beale's example cycles under the textbook largest-coefficient rule
    c = np.array([0.75, -20.0, 0.5, -6.0])
    A = np.array([[0.25, -8.0, -1.0, 9.0], [0.5, -12.0, -0.5, 3.0], [0.0, 0.0, 1.0, 0.0]])
    A = np.vstack([A, -np.eye(4)])
    b = np.array([0.0, 0.0, 1.0, 0, 0, 0, 0])
    res = maximize(c, A, b)
    assert res.value == pytest.approx(1.25, abs=1e-12)
