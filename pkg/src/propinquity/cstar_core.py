"""Finite-dimensional C*-algebras as direct sums of full matrix blocks.

Elements are tuples of complex square blocks. Every algebra carries an
orthonormal (Hilbert-Schmidt) basis of its self-adjoint part; the real
coordinates of a self-adjoint element in that basis are what seminorm atoms,
morphisms and states act on. A complex element ``h + i k`` has complex
coordinates ``coords(h) + i coords(k)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Sequence

import numpy as np

from . import linalg
from .errors import InvalidMorphismError, ValidationError

TOL = 1e-9


def _block_basis(n: int) -> np.ndarray:
    """Rows are flattened Hermitian basis matrices of M_n, orthonormal under tr(a* b)."""
    mats = []
    for i in range(n):
        e = np.zeros((n, n), dtype=complex)
        e[i, i] = 1.0
        mats.append(e)
    r = 1.0 / math.sqrt(2.0)
    for i in range(n):
        for j in range(i + 1, n):
            e = np.zeros((n, n), dtype=complex)
            e[i, j] = e[j, i] = r
            mats.append(e)
            f = np.zeros((n, n), dtype=complex)
            f[i, j] = -1j * r
            f[j, i] = 1j * r
            mats.append(f)
    return np.array([m.ravel() for m in mats])


@dataclass(frozen=True)
class CStarAlgebra:
    """``M_{n_1} (+) ... (+) M_{n_k}``."""

    block_dims: tuple[int, ...]

    def __post_init__(self):
        dims = tuple(int(n) for n in self.block_dims)
        if not dims or any(n < 1 for n in dims):
            raise ValidationError(f"block sizes must be positive integers, got {self.block_dims}")
        object.__setattr__(self, "block_dims", dims)

    @property
    def dim(self) -> int:
        return sum(n * n for n in self.block_dims)

    @property
    def is_commutative(self) -> bool:
        return all(n == 1 for n in self.block_dims)

    @cached_property
    def offsets(self) -> tuple[int, ...]:
        out, acc = [], 0
        for n in self.block_dims:
            out.append(acc)
            acc += n * n
        return tuple(out + [acc])

    @cached_property
    def _bases(self) -> tuple[np.ndarray, ...]:
        return tuple(_block_basis(n) for n in self.block_dims)

    def block_slice(self, b: int) -> slice:
        return slice(self.offsets[b], self.offsets[b + 1])

    def element(self, blocks: Sequence) -> "Element":
        return Element(self, blocks)

    def zero(self) -> "Element":
        return Element(self, [np.zeros((n, n), dtype=complex) for n in self.block_dims])

    def unit(self) -> "Element":
        return Element(self, [np.eye(n, dtype=complex) for n in self.block_dims])

    def scalar(self, t: complex) -> "Element":
        return Element(self, [t * np.eye(n, dtype=complex) for n in self.block_dims])

    def coords(self, a: "Element") -> np.ndarray:
        """Complex coordinates in the self-adjoint basis."""
        self._check(a)
        out = np.empty(self.dim, dtype=complex)
        for b, blk in enumerate(a.blocks):
            out[self.block_slice(b)] = self._bases[b].conj() @ blk.ravel()
        return out

    def sa_coords(self, a: "Element", tol: float = TOL) -> np.ndarray:
        z = self.coords(a)
        if np.max(np.abs(z.imag), initial=0.0) > tol * max(1.0, float(np.max(np.abs(z.real), initial=0.0))):
            raise ValidationError("element is not self-adjoint")
        return z.real.copy()

    def from_coords(self, z: np.ndarray) -> "Element":
        z = np.asarray(z)
        if z.shape != (self.dim,):
            raise ValidationError(f"expected {self.dim} coordinates, got shape {z.shape}")
        blocks = []
        for b, n in enumerate(self.block_dims):
            blocks.append((self._bases[b].T @ z[self.block_slice(b)]).reshape(n, n))
        return Element(self, blocks)

    def basis_element(self, k: int) -> "Element":
        e = np.zeros(self.dim)
        e[k] = 1.0
        return self.from_coords(e)

    @cached_property
    def unit_coords(self) -> np.ndarray:
        return self.coords(self.unit()).real.copy()

    def random_self_adjoint(self, rng: np.random.Generator) -> "Element":
        """Per-block Gaussian Hermitian matrix: N(0,1) diagonal, N(0,1)+iN(0,1) above it."""
        blocks = []
        for n in self.block_dims:
            g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
            h = np.triu(g, 1)
            h = h + h.conj().T + np.diag(rng.standard_normal(n))
            blocks.append(h)
        return Element(self, blocks)

    def random_element(self, rng: np.random.Generator) -> "Element":
        return Element(self, [rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)) for n in self.block_dims])

    def _check(self, a: "Element"):
        if a.algebra != self:
            raise ValidationError(f"element of {a.algebra.block_dims} used in {self.block_dims}")

    def __repr__(self):
        return "CStarAlgebra(" + " (+) ".join(f"M{n}" for n in self.block_dims) + ")"


class Element:
    """Immutable element of a :class:`CStarAlgebra`."""

    __slots__ = ("algebra", "blocks")

    def __init__(self, algebra: CStarAlgebra, blocks: Sequence):
        if len(blocks) != len(algebra.block_dims):
            raise ValidationError(f"expected {len(algebra.block_dims)} blocks, got {len(blocks)}")
        out = []
        for blk, n in zip(blocks, algebra.block_dims):
            arr = np.array(blk, dtype=complex, copy=True).reshape(np.shape(blk) or (1, 1))
            if arr.shape != (n, n):
                raise ValidationError(f"block of shape {arr.shape} where ({n}, {n}) expected")
            if not np.all(np.isfinite(arr)):
                raise ValidationError("non-finite entries")
            arr.flags.writeable = False
            out.append(arr)
        self.algebra = algebra
        self.blocks = tuple(out)

    def _same(self, other: "Element"):
        if not isinstance(other, Element) or other.algebra != self.algebra:
            raise ValidationError("elements live in different algebras")

    def __add__(self, other):
        self._same(other)
        return Element(self.algebra, [x + y for x, y in zip(self.blocks, other.blocks)])

    def __sub__(self, other):
        self._same(other)
        return Element(self.algebra, [x - y for x, y in zip(self.blocks, other.blocks)])

    def __neg__(self):
        return Element(self.algebra, [-x for x in self.blocks])

    def __mul__(self, t):
        if isinstance(t, Element):
            return self @ t
        return Element(self.algebra, [t * x for x in self.blocks])

    __rmul__ = __mul__

    def __truediv__(self, t):
        return Element(self.algebra, [x / t for x in self.blocks])

    def __matmul__(self, other):
        self._same(other)
        return Element(self.algebra, [x @ y for x, y in zip(self.blocks, other.blocks)])

    def adjoint(self) -> "Element":
        return Element(self.algebra, [x.conj().T for x in self.blocks])

    @property
    def H(self) -> "Element":
        return self.adjoint()

    def is_self_adjoint(self, tol: float = TOL) -> bool:
        scale = max(1.0, max(float(np.max(np.abs(x))) for x in self.blocks))
        return all(np.max(np.abs(x - x.conj().T)) <= tol * scale for x in self.blocks)

    def real_part(self) -> "Element":
        return (self + self.adjoint()) * 0.5

    def imag_part(self) -> "Element":
        return (self - self.adjoint()) * (-0.5j)

    def allclose(self, other: "Element", tol: float = TOL) -> bool:
        self._same(other)
        return all(np.max(np.abs(x - y)) <= tol for x, y in zip(self.blocks, other.blocks))

    def __repr__(self):
        return f"Element({self.algebra!r}, blocks={[b.tolist() for b in self.blocks]})"


def operator_norm(a: Element) -> float:
    """C*-norm: max over blocks of the spectral norm, computed by cyclic Jacobi."""
    return max(linalg.operator_norm_matrix(x) for x in a.blocks)


def jordan_product(a: Element, b: Element) -> Element:
    return ((a @ b) + (b @ a)) * 0.5


def lie_product(a: Element, b: Element) -> Element:
    return ((a @ b) - (b @ a)) * (1.0 / 2j)


def spectrum(a: Element) -> np.ndarray:
    """Eigenvalues of a self-adjoint element (all blocks, ascending)."""
    if not a.is_self_adjoint():
        raise ValidationError("spectrum() needs a self-adjoint element")
    vals = np.concatenate([linalg.hermitian_eigvals(0.5 * (x + x.conj().T)) for x in a.blocks])
    return np.sort(vals)


@dataclass(frozen=True)
class State:
    """Positive unital functional: ``phi(a) = sum_b w_b tr(rho_b a_b)``."""

    algebra: CStarAlgebra
    weights: np.ndarray
    densities: tuple

    def __post_init__(self):
        alg = self.algebra
        w = np.asarray(self.weights, dtype=float).reshape(-1)
        if w.shape != (len(alg.block_dims),):
            raise ValidationError("one weight per block required")
        if np.any(w < -TOL) or abs(w.sum() - 1.0) > TOL:
            raise ValidationError(f"block weights must be a probability vector, got {w}")
        dens = []
        for rho, n in zip(self.densities, alg.block_dims):
            r = np.array(rho, dtype=complex).reshape(n, n)
            if np.max(np.abs(r - r.conj().T)) > TOL:
                raise ValidationError("density matrix is not Hermitian")
            r = 0.5 * (r + r.conj().T)
            if abs(np.trace(r).real - 1.0) > TOL:
                raise ValidationError("density matrix must have unit trace")
            if n > 1 and linalg.hermitian_eigvals(r)[0] < -TOL:
                raise ValidationError("density matrix is not positive")
            r.flags.writeable = False
            dens.append(r)
        if len(dens) != len(alg.block_dims):
            raise ValidationError("one density per block required")
        w = np.clip(w, 0.0, None)
        w = w / w.sum()
        w.flags.writeable = False
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "densities", tuple(dens))

    def functional(self) -> np.ndarray:
        """Real vector ``f`` with ``phi(a) = f . coords(a)``."""
        out = np.empty(self.algebra.dim)
        for b, (w, rho) in enumerate(zip(self.weights, self.densities)):
            out[self.algebra.block_slice(b)] = (self.algebra._bases[b].conj() @ (w * rho).ravel()).real
        return out

    @staticmethod
    def from_functional(algebra: CStarAlgebra, f: np.ndarray, tol: float = 1e-7) -> "State":
        f = np.asarray(f, dtype=float)
        weights, dens = [], []
        for b, n in enumerate(algebra.block_dims):
            rho = (algebra._bases[b].T @ f[algebra.block_slice(b)]).reshape(n, n)
            rho = 0.5 * (rho + rho.conj().T)
            t = float(np.trace(rho).real)
            if t < -tol:
                raise ValidationError("functional is not positive")
            if t <= 1e-15:
                weights.append(0.0)
                dens.append(np.eye(n) / n)
            else:
                weights.append(t)
                dens.append(rho / t)
        w = np.array(weights)
        if abs(w.sum() - 1.0) > tol:
            raise ValidationError(f"functional is not unital (total {w.sum()})")
        w = np.clip(w, 0.0, None)
        dens = [_clip_density(d) for d in dens]
        return State(algebra, w / w.sum(), tuple(dens))

    def __call__(self, a: Element) -> complex:
        return eval_state(self, a)


def _clip_density(rho: np.ndarray) -> np.ndarray:
    n = rho.shape[0]
    if n == 1:
        return np.ones((1, 1), dtype=complex)
    vals, vecs = linalg.hermitian_eigh(rho)
    if vals[0] >= 0.0:
        return rho
    vals = np.clip(vals, 0.0, None)
    vals = vals / vals.sum()
    return (vecs * vals) @ vecs.conj().T


def eval_state(phi: State, a: Element) -> complex:
    phi.algebra._check(a)
    val = sum(w * np.trace(rho @ x) for w, rho, x in zip(phi.weights, phi.densities, a.blocks))
    val = complex(val)
    if a.is_self_adjoint():
        return val.real
    return val


def dirac_state(algebra: CStarAlgebra, point: int) -> State:
    """Point evaluation on a commutative algebra (block ``point``)."""
    if not algebra.is_commutative:
        raise ValidationError("Dirac states need a commutative algebra")
    w = np.zeros(len(algebra.block_dims))
    w[point] = 1.0
    return State(algebra, w, tuple(np.ones((1, 1)) for _ in algebra.block_dims))


def probability_state(algebra: CStarAlgebra, probs: Sequence[float]) -> State:
    if not algebra.is_commutative:
        raise ValidationError("probability vectors need a commutative algebra")
    return State(algebra, np.asarray(probs, dtype=float), tuple(np.ones((1, 1)) for _ in algebra.block_dims))


def vector_state(algebra: CStarAlgebra, block: int, vec: Sequence[complex]) -> State:
    """Pure state ``a -> <v, a_block v>``."""
    v = np.asarray(vec, dtype=complex).reshape(-1)
    v = v / np.linalg.norm(v)
    w = np.zeros(len(algebra.block_dims))
    w[block] = 1.0
    dens = [np.eye(n) / n for n in algebra.block_dims]
    dens[block] = np.outer(v, v.conj())
    return State(algebra, w, tuple(dens))


def tracial_state(algebra: CStarAlgebra) -> State:
    """Normalised trace of the defining representation on C^(sum n_b)."""
    dims = np.array(algebra.block_dims, dtype=float)
    return State(algebra, dims / dims.sum(), tuple(np.eye(n) / n for n in algebra.block_dims))


@dataclass(frozen=True)
class MorphismReport:
    unital_error: float
    star_error: float
    mult_error: float
    rank: int
    injective: bool
    surjective: bool

    def is_homomorphism(self, tol: float = TOL) -> bool:
        return self.unital_error <= tol and self.star_error <= tol and self.mult_error <= tol

    @property
    def epimorphism(self) -> bool:
        return self.is_homomorphism() and self.surjective


@dataclass(frozen=True)
class StarMorphism:
    """Real-linear map on self-adjoint coordinates, extended complex-linearly."""

    source: CStarAlgebra
    target: CStarAlgebra
    matrix: np.ndarray
    _report: list = field(default_factory=list, compare=False, repr=False)

    def __post_init__(self):
        m = np.array(self.matrix, dtype=float)
        if m.shape != (self.target.dim, self.source.dim):
            raise ValidationError(f"matrix shape {m.shape} does not match {self.target.dim}x{self.source.dim}")
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)

    def __call__(self, a: Element) -> Element:
        return self.target.from_coords(self.matrix @ self.source.coords(a))

    def pullback_functional(self, f: np.ndarray) -> np.ndarray:
        return self.matrix.T @ f

    def then(self, other: "StarMorphism") -> "StarMorphism":
        """``other o self``."""
        if other.source != self.target:
            raise ValidationError("morphisms are not composable")
        return StarMorphism(self.source, other.target, other.matrix @ self.matrix)

    def report(self) -> MorphismReport:
        if not self._report:
            self._report.append(_morphism_report(self))
        return self._report[0]


def _morphism_report(pi: StarMorphism, seed: int = 0) -> MorphismReport:
    src, tgt = pi.source, pi.target
    unital = operator_norm(pi(src.unit()) - tgt.unit())
    rng = np.random.default_rng(seed)
    star = 0.0
    for _ in range(4):
        a = src.random_element(rng)
        star = max(star, operator_norm(pi(a.adjoint()) - pi(a).adjoint()))
    images = [pi(src.basis_element(k)) for k in range(src.dim)]
    mult = 0.0
    for b in range(len(src.block_dims)):
        sl = range(src.offsets[b], src.offsets[b + 1])
        for i in sl:
            ei = src.basis_element(i)
            for j in sl:
                ej = src.basis_element(j)
                err = pi(ei @ ej) - images[i] @ images[j]
                mult = max(mult, max(float(np.max(np.abs(x))) for x in err.blocks))
    # cross-block products vanish in the source, so their images must too
    for b in range(len(src.block_dims)):
        for c in range(len(src.block_dims)):
            if b == c:
                continue
            pb = pi(_block_unit(src, b))
            pc = pi(_block_unit(src, c))
            mult = max(mult, max(float(np.max(np.abs(x))) for x in (pb @ pc).blocks))
    r = linalg.rank(pi.matrix)
    return MorphismReport(unital, star, mult, r, r == src.dim, r == tgt.dim)


def _block_unit(alg: CStarAlgebra, b: int) -> Element:
    blocks = [np.zeros((n, n)) for n in alg.block_dims]
    blocks[b] = np.eye(alg.block_dims[b])
    return alg.element(blocks)


def validate_morphism(pi: StarMorphism) -> MorphismReport:
    """Violations of unitality, *-preservation and multiplicativity, and the rank; never raises."""
    return pi.report()


def require_morphism(pi: StarMorphism, tol: float = TOL) -> MorphismReport:
    """Like :func:`validate_morphism` but raises unless ``pi`` is a unital *-homomorphism."""
    rep = pi.report()
    if not rep.is_homomorphism(tol):
        raise InvalidMorphismError(
            f"not a unital *-homomorphism: unital={rep.unital_error:.2e} "
            f"star={rep.star_error:.2e} mult={rep.mult_error:.2e}"
        )
    return rep


def morphism_from_function(source: CStarAlgebra, target: CStarAlgebra, fn: Callable[[Element], Element]) -> StarMorphism:
    """Tabulate a linear map that sends self-adjoint elements to self-adjoint elements."""
    cols = [target.sa_coords(fn(source.basis_element(k)), tol=1e-7) for k in range(source.dim)]
    return StarMorphism(source, target, np.array(cols).T)


def identity_morphism(alg: CStarAlgebra) -> StarMorphism:
    return StarMorphism(alg, alg, np.eye(alg.dim))


def unitary_conjugation(alg: CStarAlgebra, unitaries: Sequence[np.ndarray]) -> StarMorphism:
    us = [np.asarray(u, dtype=complex) for u in unitaries]
    return morphism_from_function(alg, alg, lambda a: alg.element([u @ x @ u.conj().T for u, x in zip(us, a.blocks)]))


def pullback_state(phi: State, pi: StarMorphism) -> State:
    """``phi o pi`` as a state on the source algebra."""
    if phi.algebra != pi.target:
        raise ValidationError("state and morphism target differ")
    return State.from_functional(pi.source, pi.pullback_functional(phi.functional()))


def direct_sum(*algebras: CStarAlgebra):
    """Direct sum with its coordinate projections and block ranges."""
    dims = tuple(n for a in algebras for n in a.block_dims)
    total = CStarAlgebra(dims)
    projections, offset = [], 0
    for a in algebras:
        m = np.zeros((a.dim, total.dim))
        m[:, offset:offset + a.dim] = np.eye(a.dim)
        projections.append(StarMorphism(total, a, m))
        offset += a.dim
    return total, projections


def direct_sum_element(total: CStarAlgebra, *parts: Element) -> Element:
    return total.element([blk for p in parts for blk in p.blocks])


def tensor_embeddings(a_alg: CStarAlgebra, b_alg: CStarAlgebra):
    """``A (x) B`` with ``a -> a (x) 1`` and ``b -> 1 (x) b``."""
    dims = tuple(n * m for n in a_alg.block_dims for m in b_alg.block_dims)
    c = CStarAlgebra(dims)

    def left(x: Element) -> Element:
        return c.element([np.kron(xa, np.eye(m)) for xa in x.blocks for m in b_alg.block_dims])

    def right(y: Element) -> Element:
        return c.element([np.kron(np.eye(n), yb) for n in a_alg.block_dims for yb in y.blocks])

    return c, morphism_from_function(a_alg, c, left), morphism_from_function(b_alg, c, right)


@dataclass(frozen=True)
class BlockRealization:
    """A *-subalgebra of M_N brought to block form.

    ``to_blocks`` maps an N x N matrix of the subalgebra to an element of
    ``algebra``; ``from_blocks`` inverts it on the subalgebra.
    """

    algebra: CStarAlgebra
    isometries: tuple
    multiplicities: tuple
    spanning: np.ndarray

    def to_blocks(self, x: np.ndarray) -> Element:
        return self.algebra.element([q.conj().T @ x @ q for q in self.isometries])

    def from_blocks(self, a: Element) -> np.ndarray:
        # expand in the spanning set using the trace pairing, which is faithful on the subalgebra
        gram = np.array([[np.vdot(s, t) for t in self.spanning] for s in self.spanning])
        rhs = np.array([self._pair(s, a) for s in self.spanning])
        coef, _ = _hermitian_solve(gram, rhs)
        return np.tensordot(coef, self.spanning, axes=1)

    def _pair(self, s: np.ndarray, a: Element) -> complex:
        img = self.to_blocks(s)
        return sum(m * np.vdot(x, y) for m, x, y in zip(self.multiplicities, img.blocks, a.blocks))


def _hermitian_solve(g: np.ndarray, rhs: np.ndarray):
    r, piv = linalg.row_reduce(np.hstack([g, rhs.reshape(-1, 1)]), tol=1e-12)
    x = np.zeros(g.shape[1], dtype=complex)
    for i, pc in enumerate(piv):
        if pc < g.shape[1]:
            x[pc] = r[i, -1]
    return x, float(np.max(np.abs(g @ x - rhs)))


def realize_subalgebra(spanning: Sequence[np.ndarray], seed: int = 7, tol: float = 1e-7) -> BlockRealization:
    """Wedderburn decomposition of the *-algebra spanned by ``spanning`` inside M_N.

    Eigenvectors of a generic self-adjoint element generate irreducible cyclic
    subspaces; one representative per character class gives the blocks.
    """
    span = np.array([np.asarray(s, dtype=complex) for s in spanning])
    n = span.shape[1]
    flat = linalg.orthonormalize(span.reshape(len(span), -1).T, tol=1e-10)
    dim_alg = flat.shape[1]
    rng = np.random.default_rng(seed)
    coef = rng.standard_normal(len(span)) + 1j * rng.standard_normal(len(span))
    g = np.tensordot(coef, span, axes=1)
    h = g + g.conj().T
    _, vecs = linalg.hermitian_eigh(h)
    isos, chars, mults = [], [], []
    for v in vecs.T:
        cyc = linalg.orthonormalize(np.array([s @ v for s in span]).T, tol=1e-8)
        ch = np.array([np.trace(cyc.conj().T @ s @ cyc) for s in span])
        for k, c in enumerate(chars):
            if len(c) == len(ch) and np.max(np.abs(c - ch)) <= tol * max(1.0, float(np.max(np.abs(ch)))):
                mults[k] += 1
                break
        else:
            isos.append(cyc)
            chars.append(ch)
            mults.append(1)
    dims = tuple(q.shape[1] for q in isos)
    if sum(d * d for d in dims) != dim_alg:
        raise ValidationError(f"decomposition failed: blocks {dims} for an algebra of dimension {dim_alg}")
    # each class collects d eigenvectors per copy of the irreducible representation
    if any(c % d for c, d in zip(mults, dims)):
        raise ValidationError("decomposition failed: eigenvectors do not split into whole copies")
    mults = [c // d for c, d in zip(mults, dims)]
    return BlockRealization(CStarAlgebra(dims), tuple(isos), tuple(mults), span)
