import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from propinquity.cstar_core import (
    CStarAlgebra,
    State,
    StarMorphism,
    direct_sum,
    direct_sum_element,
    dirac_state,
    eval_state,
    identity_morphism,
    jordan_product,
    lie_product,
    morphism_from_function,
    operator_norm,
    probability_state,
    pullback_state,
    realize_subalgebra,
    spectrum,
    tensor_embeddings,
    tracial_state,
    unitary_conjugation,
    validate_morphism,
    vector_state,
)
from propinquity.errors import ValidationError

M2 = CStarAlgebra((2,))
SX = np.array([[0, 1], [1, 0]], dtype=complex)

block_dims = st.lists(st.integers(1, 3), min_size=1, max_size=3).map(tuple)


# ------------------------------------------------------------------ algebra


def test_dimensions_and_unit():
    A = CStarAlgebra((1, 2, 3))
    assert A.dim == 1 + 4 + 9
    assert not A.is_commutative and CStarAlgebra((1, 1)).is_commutative
    assert np.allclose(A.from_coords(A.unit_coords).blocks[2], np.eye(3))


def test_bad_algebras_rejected():
    with pytest.raises(ValidationError):
        CStarAlgebra(())
    with pytest.raises(ValidationError):
        CStarAlgebra((0, 2))


def test_element_shape_checked():
    with pytest.raises(ValidationError):
        M2.element([np.eye(3)])


@given(block_dims, st.integers(0, 999))
def test_coords_roundtrip(dims, seed):
    A = CStarAlgebra(dims)
    a = A.random_element(np.random.default_rng(seed))
    assert A.from_coords(A.coords(a)).allclose(a, 1e-12)
    h = A.random_self_adjoint(np.random.default_rng(seed))
    assert np.all(np.isreal(A.sa_coords(h)))
    assert A.from_coords(A.sa_coords(h)).allclose(h, 1e-12)


def test_sa_coords_rejects_non_self_adjoint():
    with pytest.raises(ValidationError):
        M2.sa_coords(M2.element([np.array([[0, 1], [0, 0]])]))


# ------------------------------------------------------------ operator norm


def test_operator_norm_examples():
    assert operator_norm(M2.element([np.diag([1.0, -2.0])])) == pytest.approx(2.0, abs=1e-14)
    assert operator_norm(M2.zero()) == 0.0
    # [DERIVED] characteristic polynomial t^2 - 1 gives eigenvalues +-1
    assert operator_norm(M2.element([SX])) == pytest.approx(1.0, abs=1e-14)


def test_operator_norm_non_normal_via_dilation():
    a = M2.element([np.array([[0, 3], [0, 0]])])
    assert operator_norm(a) == pytest.approx(3.0)


@given(block_dims, st.integers(0, 10_000))
def test_cstar_identity(dims, seed):
    A = CStarAlgebra(dims)
    a = A.random_element(np.random.default_rng(seed))
    n = operator_norm(a)
    assert abs(operator_norm(a.adjoint() @ a) - n * n) <= 1e-8 * n * n


@given(block_dims, st.integers(0, 10_000))
def test_submultiplicative(dims, seed):
    A = CStarAlgebra(dims)
    rng = np.random.default_rng(seed)
    a, b = A.random_element(rng), A.random_element(rng)
    assert operator_norm(a @ b) <= operator_norm(a) * operator_norm(b) + 1e-9


def test_spectrum_sorted_over_blocks():
    A = CStarAlgebra((1, 2))
    a = A.element([np.array([[5.0]]), np.diag([-1.0, 2.0])])
    assert np.allclose(spectrum(a), [-1, 2, 5])


# ----------------------------------------------------------- Jordan and Lie


def test_jordan_of_commuting_diagonals():
    a, b = M2.element([np.diag([1.0, 2.0])]), M2.element([np.diag([3.0, 4.0])])
    assert np.allclose(jordan_product(a, b).blocks[0], np.diag([3.0, 8.0]))
    assert np.allclose(lie_product(a, b).blocks[0], 0)


def test_lie_matches_direct_arithmetic():
    a, b = SX, np.diag([1.0, -1.0]).astype(complex)
    direct = (a @ b - b @ a) / 2j
    got = lie_product(M2.element([a]), M2.element([b])).blocks[0]
    assert np.allclose(got, direct)
    assert np.allclose(got, np.array([[0, 1j], [-1j, 0]]))


@given(block_dims, st.integers(0, 10_000))
def test_products_of_self_adjoints_are_self_adjoint(dims, seed):
    A = CStarAlgebra(dims)
    rng = np.random.default_rng(seed)
    a, b = A.random_self_adjoint(rng), A.random_self_adjoint(rng)
    assert jordan_product(a, b).is_self_adjoint(1e-12)
    assert lie_product(a, b).is_self_adjoint(1e-12)


# -------------------------------------------------------------------- states


def test_state_examples():
    A = CStarAlgebra((2, 1))
    phi = tracial_state(A)
    assert eval_state(phi, A.unit()) == pytest.approx(1.0)
    e11 = State(M2, [1.0], (np.diag([1.0, 0.0]),))
    assert eval_state(e11, M2.element([np.diag([5.0, 0.0])])) == pytest.approx(5.0)
    # [DERIVED] trace oracle: tr(I/2 . sigma_x) = 0
    assert eval_state(tracial_state(M2), M2.element([SX])) == pytest.approx(0.0)


def test_state_validation():
    with pytest.raises(ValidationError):
        State(M2, [1.0], (np.diag([1.5, -0.5]),))
    with pytest.raises(ValidationError):
        State(M2, [1.0], (np.eye(2),))
    with pytest.raises(ValidationError):
        State(CStarAlgebra((1, 1)), [0.7, 0.7], (np.ones((1, 1)), np.ones((1, 1))))


@given(block_dims, st.integers(0, 10_000))
def test_state_positivity_and_functional(dims, seed):
    A = CStarAlgebra(dims)
    rng = np.random.default_rng(seed)
    dens = []
    for n in dims:
        g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        r = g @ g.conj().T
        dens.append(r / np.trace(r).real)
    w = rng.dirichlet(np.ones(len(dims)))
    phi = State(A, w, tuple(dens))
    a = A.random_element(rng)
    assert eval_state(phi, a.adjoint() @ a).real >= -1e-9
    h = A.random_self_adjoint(rng)
    assert phi.functional() @ A.sa_coords(h) == pytest.approx(eval_state(phi, h), abs=1e-10)
    back = State.from_functional(A, phi.functional())
    assert eval_state(back, h) == pytest.approx(eval_state(phi, h), abs=1e-9)


def test_vector_and_dirac_states():
    v = vector_state(M2, 0, [1, 1j])
    assert eval_state(v, M2.element([np.array([[0, -1j], [1j, 0]])])) == pytest.approx(1.0)
    C3 = CStarAlgebra((1, 1, 1))
    assert eval_state(dirac_state(C3, 2), C3.element([[[1.0]], [[2.0]], [[7.0]]])) == pytest.approx(7.0)
    with pytest.raises(ValidationError):
        dirac_state(M2, 0)


# ---------------------------------------------------------------- morphisms


def test_identity_morphism_report():
    rep = validate_morphism(identity_morphism(CStarAlgebra((1, 2))))
    assert rep.unital_error == 0 and rep.star_error == 0 and rep.mult_error <= 1e-12
    assert rep.epimorphism


def test_coordinate_projection_is_epimorphism():
    total, (p1, p2) = direct_sum(CStarAlgebra((1,)), CStarAlgebra((1,)))
    assert validate_morphism(p1).epimorphism


def test_diagonal_map_is_not_epimorphism():
    # [DERIVED] rank oracle: a -> (a, a) has rank dim A < dim(A (+) A)
    A = M2
    total, (p1, p2) = direct_sum(A, A)
    diag = morphism_from_function(A, total, lambda a: direct_sum_element(total, a, a))
    rep = validate_morphism(diag)
    assert rep.is_homomorphism() and rep.injective
    assert rep.rank == A.dim == np.linalg.matrix_rank(diag.matrix)
    assert not rep.epimorphism


def test_non_multiplicative_map_detected():
    A = M2
    transpose = morphism_from_function(A, A, lambda a: A.element([a.blocks[0].T]))
    rep = validate_morphism(transpose)
    assert rep.surjective and not rep.is_homomorphism()
    assert not rep.epimorphism


def test_unitary_conjugation_and_pullback():
    u = np.array([[0, 1], [1j, 0]])
    alpha = unitary_conjugation(M2, [u])
    assert validate_morphism(alpha).epimorphism
    a = M2.random_self_adjoint(np.random.default_rng(0))
    assert np.allclose(alpha(a).blocks[0], u @ a.blocks[0] @ u.conj().T)
    phi = vector_state(M2, 0, [1, 0])
    assert eval_state(pullback_state(phi, alpha), a) == pytest.approx(eval_state(phi, alpha(a)))


def test_morphism_shape_checked():
    with pytest.raises(ValidationError):
        StarMorphism(M2, M2, np.eye(3))


def test_tensor_embeddings_commute_and_are_faithful():
    A, B = CStarAlgebra((1, 1)), CStarAlgebra((2,))
    C, ra, rb = tensor_embeddings(A, B)
    rng = np.random.default_rng(1)
    a, b = A.random_element(rng), B.random_element(rng)
    x, y = ra(a), rb(b)
    assert (x @ y).allclose(y @ x, 1e-12)
    for r in (ra, rb):
        rep = validate_morphism(r)
        assert rep.is_homomorphism() and rep.injective


# ------------------------------------------------------- subalgebra realization


def test_realize_diagonal_subalgebra_of_m4():
    span = [np.diag(np.eye(4)[i]) for i in range(4)]
    real = realize_subalgebra(span)
    assert real.algebra.block_dims == (1, 1, 1, 1)


def test_realize_m2_tensor_identity():
    # {a (x) 1_2} inside M_4: one M_2 block with multiplicity 2
    basis = [np.kron(e, np.eye(2)) for e in (np.diag([1, 0]), np.diag([0, 1]), SX, np.array([[0, -1j], [1j, 0]]))]
    real = realize_subalgebra(basis)
    assert real.algebra.block_dims == (2,)
    assert real.multiplicities == (2,)
    x = basis[2] + 3 * basis[0]
    back = real.from_blocks(real.to_blocks(x))
    assert np.allclose(back, x)
    y = basis[3]
    assert real.to_blocks(x @ y).allclose(real.to_blocks(x) @ real.to_blocks(y), 1e-9)
