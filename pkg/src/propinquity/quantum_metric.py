"""Lip-norms as maxima of operator norms of linear atoms.

Every atom is a real-linear map from the self-adjoint coordinates of the
algebra into the self-adjoint part of an image algebra; the seminorm is
``L(a) = max_i ||T_i(a)||``. Commutators are stored as ``i[D, a]`` so that
all images are self-adjoint.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np

from . import linalg
from .cstar_core import CStarAlgebra, Element, StarMorphism, jordan_product, lie_product, operator_norm
from .errors import CertificateError, ValidationError

ATOM_KINDS = (
    "pair_difference",
    "action_difference",
    "commutator",
    "morphism_difference",
    "doubling_difference",
    "component_pullback",
)

KERNEL_TOL = 1e-9
LEIBNIZ_TOL = 1e-9


@dataclass(frozen=True)
class SeminormAtom:
    kind: str
    image: CStarAlgebra
    matrix: np.ndarray
    label: str = ""

    def __post_init__(self):
        if self.kind not in ATOM_KINDS:
            raise ValidationError(f"unknown atom kind {self.kind!r}")
        m = np.array(self.matrix, dtype=float)
        if m.ndim != 2 or m.shape[0] != self.image.dim:
            raise ValidationError("atom matrix rows must match the image algebra")
        if not np.all(np.isfinite(m)):
            raise ValidationError("atom matrix has non-finite entries")
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)

    def apply(self, source: CStarAlgebra, a: Element) -> Element:
        return self.image.from_coords(self.matrix @ source.sa_coords(a))


_SCALAR = CStarAlgebra((1,))


def pair_difference_atom(alg: CStarAlgebra, x: int, y: int, distance: float) -> SeminormAtom:
    if not alg.is_commutative:
        raise ValidationError("pair differences need a commutative algebra")
    if not distance > 0:
        raise ValidationError("pair distance must be positive")
    row = np.zeros((1, alg.dim))
    row[0, x] = 1.0 / distance
    row[0, y] = -1.0 / distance
    return SeminormAtom("pair_difference", _SCALAR, row, f"{x}-{y}")


def action_difference_atom(alpha: StarMorphism, length: float, label: str = "") -> SeminormAtom:
    if alpha.source != alpha.target:
        raise ValidationError("an action atom needs an automorphism")
    if not length > 0:
        raise ValidationError("group element length must be positive")
    return SeminormAtom("action_difference", alpha.source, (np.eye(alpha.source.dim) - alpha.matrix) / length, label)


def commutator_atom(alg: CStarAlgebra, d: Element, scale: float = 1.0, label: str = "") -> SeminormAtom:
    """``a -> i[d, a] / scale`` for self-adjoint ``d``."""
    if not d.is_self_adjoint():
        raise ValidationError("commutator atoms need a self-adjoint operator")
    cols = []
    for k in range(alg.dim):
        e = alg.basis_element(k)
        cols.append(alg.sa_coords(((d @ e) - (e @ d)) * 1j, tol=1e-7))
    return SeminormAtom("commutator", alg, np.array(cols).T / scale, label)


def morphism_difference_atom(rho_a: StarMorphism, rho_b: StarMorphism, p_a: StarMorphism, p_b: StarMorphism, scale: float) -> SeminormAtom:
    """``(a, b) -> (rho_a(a) - rho_b(b)) / scale`` on the direct-sum carrier."""
    if rho_a.target != rho_b.target:
        raise ValidationError("both embeddings must land in the same algebra")
    if not scale > 0:
        raise ValidationError("scale must be positive")
    m = (rho_a.matrix @ p_a.matrix - rho_b.matrix @ p_b.matrix) / scale
    return SeminormAtom("morphism_difference", rho_a.target, m, "bridge")


def doubling_difference_atom(p1: StarMorphism, p2: StarMorphism, gamma: float) -> SeminormAtom:
    if not gamma > 0:
        raise ValidationError("gamma must be positive")
    return SeminormAtom("doubling_difference", p1.target, (p1.matrix - p2.matrix) / gamma, "double")


def component_pullback(atom: SeminormAtom, pi: StarMorphism, label: str = "") -> SeminormAtom:
    if atom.matrix.shape[1] != pi.target.dim:
        raise ValidationError("atom does not act on the morphism target")
    return SeminormAtom("component_pullback", atom.image, atom.matrix @ pi.matrix, label or atom.label)


@dataclass(frozen=True)
class KernelCertificate:
    nullity: int
    unit_residual: float
    rank: int

    @property
    def passed(self) -> bool:
        return self.nullity == 1 and self.unit_residual <= KERNEL_TOL


@dataclass(frozen=True)
class LeibnizReport:
    trials: int
    jordan_violation: float
    lie_violation: float

    @property
    def max_violation(self) -> float:
        return max(self.jordan_violation, self.lie_violation)

    @property
    def passed(self) -> bool:
        return self.max_violation <= LEIBNIZ_TOL


class QuantumMetricSpace:
    """A finite-dimensional algebra with a Lip-norm given by atoms."""

    def __init__(self, algebra: CStarAlgebra, atoms: Sequence[SeminormAtom], label: str = "", meta: dict | None = None):
        atoms = tuple(atoms)
        if not atoms:
            raise ValidationError("at least one atom is required")
        for t in atoms:
            if t.matrix.shape[1] != algebra.dim:
                raise ValidationError(f"atom {t.kind}:{t.label} expects {t.matrix.shape[1]} coordinates, algebra has {algebra.dim}")
        self.algebra = algebra
        self.atoms = atoms
        self.label = label
        self.meta = dict(meta or {})
        self._cache: dict = {}

    def __repr__(self):
        return f"QuantumMetricSpace({self.label!r}, {self.algebra!r}, atoms={len(self.atoms)})"

    @cached_property
    def stacked(self) -> np.ndarray:
        return np.vstack([t.matrix for t in self.atoms])

    @cached_property
    def _layout(self):
        """Scalar rows, plus matrix image blocks grouped by size as ``(n, rows[B, n*n], basis)``."""
        scalar_rows, groups = [], {}
        row = 0
        for t in self.atoms:
            for b, n in enumerate(t.image.block_dims):
                start = row + t.image.offsets[b]
                if n == 1:
                    scalar_rows.append(start)
                else:
                    groups.setdefault(n, (t.image._bases[b], []))[1].append(np.arange(start, start + n * n))
            row += t.image.dim
        blocks = [(n, np.array(idx), basis) for n, (basis, idx) in sorted(groups.items())]
        return np.array(scalar_rows, dtype=int), blocks

    @property
    def polyhedral(self) -> bool:
        """True when every image block is 1x1, so ``{L <= 1}`` is a polytope."""
        return not self._layout[1]

    @property
    def scalar_matrix(self) -> np.ndarray:
        return self.stacked[self._layout[0]]

    @staticmethod
    def _block_eigs(y, n, idx, basis):
        h = (y[idx] @ basis).reshape(-1, n, n)
        h = 0.5 * (h + np.conj(np.transpose(h, (0, 2, 1))))
        return linalg.batch_hermitian_eigh(h)

    def eval_coords(self, x: np.ndarray) -> float:
        y = self.stacked @ x
        rows, blocks = self._layout
        best = float(np.max(np.abs(y[rows]))) if rows.size else 0.0
        for n, idx, basis in blocks:
            w, _ = self._block_eigs(y, n, idx, basis)
            best = max(best, float(np.max(np.abs(w))))
        return best

    def supergradient(self, x: np.ndarray):
        """``(L(x), g)`` with ``g`` a subgradient of the convex function ``L`` at ``x``."""
        M = self.stacked
        y = M @ x
        rows, blocks = self._layout
        best, grad = -1.0, np.zeros(M.shape[1])
        if rows.size:
            k = int(np.argmax(np.abs(y[rows])))
            r = rows[k]
            best = abs(float(y[r]))
            grad = np.sign(y[r]) * M[r]
        for n, idx, basis in blocks:
            w, V = self._block_eigs(y, n, idx, basis)
            bi, j = np.unravel_index(int(np.argmax(np.abs(w))), w.shape)
            lam = float(w[bi, j])
            if abs(lam) > best:
                best = abs(lam)
                v = V[bi, :, j]
                gy = (basis @ np.outer(v.conj(), v).ravel()).real
                grad = np.sign(lam) * (M[idx[bi]].T @ gy)
        return best, grad

    def __call__(self, a: Element) -> float:
        return eval_seminorm(self, a)


def eval_seminorm(qms: QuantumMetricSpace, a: Element) -> float:
    if not a.is_self_adjoint():
        raise ValidationError("Lip-norms are evaluated on self-adjoint elements only")
    return qms.eval_coords(qms.algebra.sa_coords(a))


def kernel_certificate(stacked: np.ndarray, unit: np.ndarray, tol: float = KERNEL_TOL) -> KernelCertificate:
    # unit rows: the kernel is unchanged and atoms of very different scales stay visible
    # (round-off rows far below the largest atom are dropped first)
    norms = np.linalg.norm(stacked, axis=1)
    keep = norms > 1e-9 * norms.max() if norms.size and norms.max() > 0 else np.zeros(norms.shape, bool)
    rows = stacked[keep] / norms[keep, None]
    if rows.shape[0] == 0:
        return KernelCertificate(stacked.shape[1], 0.0, 0)
    r = linalg.rank(rows, tol)
    resid = float(np.max(np.abs(rows @ unit)))
    return KernelCertificate(stacked.shape[1] - r, resid, r)


def check_lipschitz_pair(qms: QuantumMetricSpace, tol: float = KERNEL_TOL) -> KernelCertificate:
    """Certify ``ker L = C 1`` by Gaussian elimination on the stacked atoms."""
    key = ("kernel", tol)
    if key not in qms._cache:
        qms._cache[key] = kernel_certificate(qms.stacked, qms.algebra.unit_coords, tol)
    return qms._cache[key]


def require_lipschitz_pair(qms: QuantumMetricSpace) -> KernelCertificate:
    cert = check_lipschitz_pair(qms)
    if not cert.passed:
        raise CertificateError(f"kernel certificate failed: nullity {cert.nullity}, unit residual {cert.unit_residual:.2e}")
    return cert


def check_leibniz(qms: QuantumMetricSpace, n_trials: int = 1000, seed: int = 42) -> LeibnizReport:
    """Largest excess of ``L(a o b)`` and ``L({a, b})`` over ``||a|| L(b) + ||b|| L(a)``."""
    rng = np.random.default_rng(seed)
    alg = qms.algebra
    jv = lv = -np.inf
    for _ in range(n_trials):
        a = alg.random_self_adjoint(rng)
        b = alg.random_self_adjoint(rng)
        bound = operator_norm(a) * eval_seminorm(qms, b) + operator_norm(b) * eval_seminorm(qms, a)
        jv = max(jv, eval_seminorm(qms, jordan_product(a, b)) - bound)
        lv = max(lv, eval_seminorm(qms, lie_product(a, b).real_part()) - bound)
    return LeibnizReport(n_trials, max(float(jv), 0.0), max(float(lv), 0.0))


def pinned_radius(qms: QuantumMetricSpace) -> float:
    """Upper end of the MK-diameter; bounds ``||a - phi(a) 1||`` for ``L(a) <= 1``."""
    from .mk_engine import diameter_estimate

    return diameter_estimate(qms).hi
