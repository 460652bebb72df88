import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.optimize import linprog

from propinquity.errors import InconsistentSeminormError, NonConvergenceError, ValidationError
from propinquity.simplex import maximize


@given(st.integers(1, 6), st.integers(0, 10_000))
def test_matches_scipy_on_bounded_random_lps(n, seed):
    # [DERIVED] scipy HiGHS as an independent LP oracle
    rng = np.random.default_rng(seed)
    A = np.vstack([np.eye(n), -np.eye(n), rng.standard_normal((3, n))])
    b = np.concatenate([rng.uniform(0.5, 2, 2 * n), rng.uniform(0.0, 2, 3)])
    c = rng.standard_normal(n)
    res = maximize(c, A, b)
    ref = linprog(-c, A_ub=A, b_ub=b, bounds=[(None, None)] * n, method="highs")
    assert res.value == pytest.approx(-ref.fun, abs=1e-9)
    assert np.all(A @ res.x <= b + 1e-9)


def test_dual_certificate():
    rng = np.random.default_rng(1)
    A = np.vstack([np.eye(3), -np.eye(3)])
    b = np.ones(6)
    c = np.array([1.0, -2.0, 0.5])
    res = maximize(c, A, b)
    assert res.value == pytest.approx(3.5)
    # complementary dual: y >= 0, A^T y = c, b.y = value
    assert np.all(res.dual >= -1e-12)
    assert np.allclose(A.T @ res.dual, c)
    assert b @ res.dual == pytest.approx(res.value)


def test_unbounded_raises_inconsistency():
    with pytest.raises(InconsistentSeminormError):
        maximize(np.array([1.0, 0.0]), np.array([[1.0, -1.0], [-1.0, 1.0]]), np.ones(2))


def test_infeasible_origin_rejected():
    with pytest.raises(ValidationError):
        maximize(np.array([1.0]), np.array([[1.0]]), np.array([-1.0]))


def test_iteration_cap():
    A = np.vstack([np.eye(4), -np.eye(4)])
    with pytest.raises(NonConvergenceError):
        maximize(np.ones(4), A, np.ones(8), max_iter=1)
