"""Worked examples: classical finite metric spaces, circle subgroups, fuzzy tori,
ergodic group actions, and exact Gromov-Hausdorff distances."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .cstar_core import (
    CStarAlgebra,
    StarMorphism,
    direct_sum,
    morphism_from_function,
    realize_subalgebra,
    validate_morphism,
)
from .errors import ResourceError, ValidationError
from .quantum_metric import QuantumMetricSpace, action_difference_atom, pair_difference_atom
from .tunnels import Tunnel, direct_sum_carrier

GH_BUDGET = 16


@dataclass(frozen=True)
class FiniteMetricSpace:
    metric: np.ndarray
    points: tuple = ()

    def __post_init__(self):
        m = np.array(self.metric, dtype=float)
        n = m.shape[0]
        if m.ndim != 2 or m.shape != (n, n) or n == 0:
            raise ValidationError("metric must be a non-empty square matrix")
        if not np.all(np.isfinite(m)):
            raise ValidationError("metric has non-finite entries")
        if np.any(np.abs(m - m.T) > 0) or np.any(np.diag(m) != 0):
            raise ValidationError("metric must be symmetric with zero diagonal")
        off = m[~np.eye(n, dtype=bool)]
        if np.any(off <= 0):
            raise ValidationError("distinct points must have positive distance")
        scale = max(1.0, float(m.max()))
        # tri[i, k, j] = m[i,k] + m[k,j] - m[i,j]
        tri = m[:, :, None] + m[None, :, :] - m[:, None, :]
        if np.min(tri) < -1e-12 * scale:
            raise ValidationError("metric violates the triangle inequality")
        m.flags.writeable = False
        object.__setattr__(self, "metric", m)
        pts = tuple(self.points) or tuple(str(i) for i in range(n))
        if len(pts) != n:
            raise ValidationError("one label per point required")
        object.__setattr__(self, "points", pts)

    def __len__(self):
        return self.metric.shape[0]

    @property
    def diameter(self) -> float:
        return float(self.metric.max())


def finite_metric_space(X: FiniteMetricSpace | np.ndarray, label: str = "", pairs: Sequence | None = None) -> QuantumMetricSpace:
    """``C(X)`` with the Lipschitz seminorm; one pair-difference atom per pair.

    ``pairs`` restricts the atoms (used to exhibit kernel-certificate failures).
    """
    if not isinstance(X, FiniteMetricSpace):
        X = FiniteMetricSpace(np.asarray(X, dtype=float))
    n = len(X)
    alg = CStarAlgebra((1,) * n)
    if n == 1:
        # the zero seminorm on C is represented by a trivially vanishing atom
        from .quantum_metric import SeminormAtom

        atoms = [SeminormAtom("pair_difference", CStarAlgebra((1,)), np.zeros((1, 1)), "trivial")]
        return QuantumMetricSpace(alg, atoms, label or "point", {"metric_space": X})
    if pairs is None:
        pairs = itertools.combinations(range(n), 2)
    atoms = [pair_difference_atom(alg, i, j, X.metric[i, j]) for i, j in pairs]
    if not atoms:
        raise ValidationError("no atoms")
    return QuantumMetricSpace(alg, atoms, label or f"X{n}", {"metric_space": X})


def circle_metric(k: int) -> np.ndarray:
    """Arc-length metric ``2 pi min(|j - j'|, k - |j - j'|) / k`` on Z_k."""
    if k < 1:
        raise ValidationError("k must be positive")
    j = np.arange(k)
    d = np.abs(j[:, None] - j[None, :])
    return 2.0 * math.pi * np.minimum(d, k - d) / k


def circle_subgroup_space(k: int, label: str = "") -> QuantumMetricSpace:
    return finite_metric_space(FiniteMetricSpace(circle_metric(k)), label or f"Z{k}")


def random_metric_space(n: int, rng: np.random.Generator, integer: bool = False) -> FiniteMetricSpace:
    """Shortest-path metric of a random connected weighted graph."""
    w = rng.integers(1, 6, size=(n, n)).astype(float) if integer else rng.uniform(0.2, 2.0, size=(n, n))
    w = np.triu(w, 1)
    w = w + w.T
    mask = np.triu(rng.random((n, n)) < 0.6, 1)
    for i in range(n - 1):
        mask[i, i + 1] = True
    mask = mask | mask.T
    d = np.where(mask, w, np.inf)
    np.fill_diagonal(d, 0.0)
    for k in range(n):
        d = np.minimum(d, d[:, k:k + 1] + d[k:k + 1, :])
    return FiniteMetricSpace(d)


# ------------------------------------------------------------- fuzzy tori


@dataclass(frozen=True)
class FuzzyTorusSpec:
    """``Z_{k_1} x ... x Z_{k_d}`` with commutation phases ``exp(2 pi i Theta_ij)``.

    ``u_j u_i = exp(2 pi i Theta_ij) u_i u_j`` for ``i < j``.
    """

    k: tuple
    theta: np.ndarray | None = None

    def __post_init__(self):
        k = tuple(int(x) for x in self.k)
        if not k or any(x < 1 for x in k):
            raise ValidationError("orders must be positive")
        d = len(k)
        th = np.zeros((d, d)) if self.theta is None else np.array(self.theta, dtype=float)
        if th.shape != (d, d):
            raise ValidationError("theta must be d x d")
        if np.max(np.abs(th + th.T)) > 1e-12:
            raise ValidationError("theta must be antisymmetric")
        for i in range(d):
            for j in range(d):
                if i == j:
                    continue
                for order in (k[i], k[j]):
                    v = th[i, j] * order
                    if abs(v - round(v)) > 1e-9:
                        raise ValidationError(f"exp(2 pi i theta[{i},{j}]) is not a root of unity of order dividing {order}")
        th.flags.writeable = False
        object.__setattr__(self, "k", k)
        object.__setattr__(self, "theta", th)

    @property
    def size(self) -> int:
        return int(np.prod(self.k))


def _shift(n: int) -> np.ndarray:
    return np.roll(np.eye(n), 1, axis=0).astype(complex)


def _clock(n: int, phase: complex) -> np.ndarray:
    return np.diag(phase ** np.arange(n)).astype(complex)


def fuzzy_torus_generators(spec: FuzzyTorusSpec) -> list[np.ndarray]:
    """Generators ``u_j`` of the twisted group algebra in its regular representation."""
    k, th = spec.k, spec.theta
    gens = []
    for j in range(len(k)):
        factors = []
        for i in range(len(k)):
            if i < j:
                factors.append(_clock(k[i], np.exp(2j * math.pi * th[i, j])))
            elif i == j:
                factors.append(_shift(k[j]))
            else:
                factors.append(np.eye(k[i], dtype=complex))
        u = factors[0]
        for f in factors[1:]:
            u = np.kron(u, f)
        gens.append(u)
    return gens


def _monomials(spec: FuzzyTorusSpec, gens: list[np.ndarray]):
    out = {}
    for g in itertools.product(*[range(x) for x in spec.k]):
        m = np.eye(spec.size, dtype=complex)
        for u, e in zip(gens, g):
            m = m @ np.linalg.matrix_power(u, e)
        out[g] = m
    return out


def dual_length(z: Sequence[int], k: Sequence[int]) -> float:
    """``max_i |arg z_i|`` for ``z_i = exp(2 pi i m_i / k_i)``."""
    return max(2.0 * math.pi * min(m % n, n - m % n) / n for m, n in zip(z, k))


def _phase_unitary(z: Sequence[int], k: Sequence[int]) -> np.ndarray:
    w = np.ones(1, dtype=complex)
    for m, n in zip(z, k):
        w = np.kron(w, np.exp(2j * math.pi * m * np.arange(n) / n))
    return w


def fuzzy_torus_space(spec: FuzzyTorusSpec, label: str = "", max_size: int = 36) -> QuantumMetricSpace:
    """Twisted group algebra of ``Z_k^d`` with the dual-action Lip-norm.

    The algebra is realised inside ``M_N`` (``N = prod k_i``) and brought to
    block form; the dual action is conjugation by diagonal phases.
    """
    if spec.size > max_size:
        raise ResourceError(f"fuzzy torus of size {spec.size} exceeds {max_size}")
    gens = fuzzy_torus_generators(spec)
    monos = _monomials(spec, gens)
    real = realize_subalgebra(list(monos.values()))
    alg = real.algebra
    atoms = []
    for z in itertools.product(*[range(x) for x in spec.k]):
        if not any(z):
            continue
        w = _phase_unitary(z, spec.k)

        def act(a, w=w):
            x = real.from_blocks(a)
            return real.to_blocks((w[:, None] * x) * w.conj()[None, :])

        alpha = morphism_from_function(alg, alg, act)
        atoms.append(action_difference_atom(alpha, dual_length(z, spec.k), f"z={z}"))
    lbl = label or "FT" + "x".join(map(str, spec.k))
    meta = {
        "spec": spec,
        "realization": real,
        "generators": [real.to_blocks(u) for u in gens],
    }
    return QuantumMetricSpace(alg, atoms, lbl, meta)


# ----------------------------------------------------------- group actions


@dataclass
class GroupActionSpec:
    """Finite group acting by *-automorphisms, with a length function."""

    algebra: CStarAlgebra
    elements: list
    automorphisms: list
    lengths: list
    multiply: Callable | None = None
    identity: object = None

    def validate(self, n_probes: int = 4, seed: int = 0):
        if not (len(self.elements) == len(self.automorphisms) == len(self.lengths)):
            raise ValidationError("elements, automorphisms and lengths must align")
        for g, alpha, ell in zip(self.elements, self.automorphisms, self.lengths):
            rep = validate_morphism(alpha)
            if not (rep.is_homomorphism() and rep.injective and rep.surjective):
                raise ValidationError(f"alpha_{g} is not an automorphism")
            if g == self.identity:
                if ell != 0:
                    raise ValidationError("identity must have length 0")
            elif not ell > 0:
                raise ValidationError(f"length of {g} must be positive")
        if self.multiply is None:
            return
        index = {g: i for i, g in enumerate(self.elements)}
        rng = np.random.default_rng(seed)
        probes = [self.algebra.random_self_adjoint(rng) for _ in range(n_probes)]
        for g, ag in zip(self.elements, self.automorphisms):
            for h, ah in zip(self.elements, self.automorphisms):
                gh = self.multiply(g, h)
                if gh not in index:
                    raise ValidationError("group is not closed under multiplication")
                agh = self.automorphisms[index[gh]]
                for a in probes:
                    if not agh(a).allclose(ag(ah(a)), 1e-8):
                        raise ValidationError(f"action is not a homomorphism at ({g}, {h})")


def group_action_space(spec: GroupActionSpec, label: str = "") -> QuantumMetricSpace:
    spec.validate()
    atoms = [
        action_difference_atom(alpha, ell, str(g))
        for g, alpha, ell in zip(spec.elements, spec.automorphisms, spec.lengths)
        if g != spec.identity
    ]
    return QuantumMetricSpace(spec.algebra, atoms, label or "action", {"group_action": spec})


def clock_shift_action(n: int) -> GroupActionSpec:
    """``Z_n x Z_n`` acting on ``M_n`` by ``Ad(X^a Z^b)``; ergodic."""
    alg = CStarAlgebra((n,))
    X, Z = _shift(n), _clock(n, np.exp(2j * math.pi / n))
    elements, autos, lengths = [], [], []
    for a in range(n):
        for b in range(n):
            u = np.linalg.matrix_power(X, a) @ np.linalg.matrix_power(Z, b)
            autos.append(morphism_from_function(alg, alg, lambda x, u=u: alg.element([u @ x.blocks[0] @ u.conj().T])))
            elements.append((a, b))
            lengths.append(dual_length((a, b), (n, n)) if (a, b) != (0, 0) else 0.0)
    return GroupActionSpec(alg, elements, autos, lengths, lambda g, h: ((g[0] + h[0]) % n, (g[1] + h[1]) % n), (0, 0))


# ------------------------------------------------------- Gromov-Hausdorff


@dataclass(frozen=True)
class GHResult:
    value: float
    correspondence: tuple
    exact: bool


def distortion(X: FiniteMetricSpace, Y: FiniteMetricSpace, R: Sequence) -> float:
    R = list(R)
    best = 0.0
    for (x, y), (x2, y2) in itertools.product(R, R):
        best = max(best, abs(X.metric[x, x2] - Y.metric[y, y2]))
    return best


def is_correspondence(X: FiniteMetricSpace, Y: FiniteMetricSpace, R: Sequence) -> bool:
    xs = {x for x, _ in R}
    ys = {y for _, y in R}
    return xs == set(range(len(X))) and ys == set(range(len(Y)))


def gh_distance_exact(X: FiniteMetricSpace, Y: FiniteMetricSpace, budget: int = GH_BUDGET) -> GHResult:
    """Half the least distortion over all correspondences, by enumeration."""
    nx, ny = len(X), len(Y)
    P = nx * ny
    if P > budget:
        raise ResourceError(f"|X||Y| = {P} exceeds the enumeration budget {budget}; use gh_distance_heuristic")
    pairs = [(x, y) for x in range(nx) for y in range(ny)]
    delta = np.array([[abs(X.metric[x, x2] - Y.metric[y, y2]) for (x2, y2) in pairs] for (x, y) in pairs])
    masks = np.arange(1, 1 << P, dtype=np.int64)
    bits = ((masks[:, None] >> np.arange(P)) & 1).astype(bool)
    px = np.array([x for x, _ in pairs])
    py = np.array([y for _, y in pairs])
    cover = np.ones(len(masks), dtype=bool)
    for x in range(nx):
        cover &= bits[:, px == x].any(axis=1)
    for y in range(ny):
        cover &= bits[:, py == y].any(axis=1)
    bits, masks = bits[cover], masks[cover]
    dis = np.zeros(len(masks))
    for p in range(P):
        for q in range(p + 1, P):
            if delta[p, q] > 0:
                both = bits[:, p] & bits[:, q]
                dis = np.where(both & (delta[p, q] > dis), delta[p, q], dis)
    k = int(np.argmin(dis))
    R = tuple(pairs[p] for p in range(P) if bits[k, p])
    return GHResult(0.5 * float(dis[k]), R, True)


def _relation_score(X: FiniteMetricSpace, Y: FiniteMetricSpace, R) -> tuple[float, float]:
    # max distortion, ties broken by the summed distortion so plateaus still have a slope
    x = np.array([p[0] for p in R])
    y = np.array([p[1] for p in R])
    d = np.abs(X.metric[np.ix_(x, x)] - Y.metric[np.ix_(y, y)])
    return float(d.max()), float(d.sum())


def gh_distance_heuristic(X: FiniteMetricSpace, Y: FiniteMetricSpace, restarts: int = 20, seed: int = 42) -> GHResult:
    """Upper bound from local search over relations ``graph(f) u graph(g)^T``; not exact."""
    rng = np.random.default_rng(seed)
    nx, ny = len(X), len(Y)
    best = None
    for _ in range(restarts):
        f = rng.integers(ny, size=nx)
        g = rng.integers(nx, size=ny)
        cur = _relation_score(X, Y, _rel(f, g))
        improved = True
        while improved:
            improved = False
            for arr, n in ((f, ny), (g, nx)):
                for i in range(len(arr)):
                    keep = arr[i]
                    for v in range(n):
                        arr[i] = v
                        sc = _relation_score(X, Y, _rel(f, g))
                        if sc[0] < cur[0] - 1e-15 or (sc[0] <= cur[0] + 1e-15 and sc[1] < cur[1] - 1e-12):
                            cur, keep, improved = sc, v, True
                    arr[i] = keep
        if best is None or cur[0] < best[0]:
            best = (cur[0], _rel(f, g))
    return GHResult(0.5 * best[0], tuple(sorted(best[1])), False)


def _rel(f, g):
    return {(x, int(y)) for x, y in enumerate(f)} | {(int(x), y) for y, x in enumerate(g)}


def correspondence_to_tunnel(
    X: FiniteMetricSpace,
    Y: FiniteMetricSpace,
    R: Sequence,
    eps: float | None = None,
    space_x: QuantumMetricSpace | None = None,
    space_y: QuantumMetricSpace | None = None,
) -> Tunnel:
    """Tunnel on ``C(X) (+) C(Y)`` bridging through ``C(R)`` at scale ``eps >= dis(R)/2``.

    The default scale is ``dis(R)/2``, floored at ``1e-3 max(diam X, diam Y, 1)``
    so isometric correspondences keep a well conditioned bridge atom.
    """
    R = [tuple(map(int, p)) for p in R]
    if not is_correspondence(X, Y, R):
        raise ValidationError("R must cover both spaces")
    dis = distortion(X, Y, R)
    if eps is None:
        eps = max(0.5 * dis, 1e-3 * max(X.diameter, Y.diameter, 1.0))
    if eps < 0.5 * dis * (1 - 1e-12):
        raise ValidationError(f"eps = {eps} is below dis(R)/2 = {0.5 * dis}")
    sx = space_x or finite_metric_space(X)
    sy = space_y or finite_metric_space(Y)
    cr = CStarAlgebra((1,) * len(R))
    mx = np.zeros((len(R), len(X)))
    my = np.zeros((len(R), len(Y)))
    for r, (x, y) in enumerate(R):
        mx[r, x] = 1.0
        my[r, y] = 1.0
    rho_x = StarMorphism(sx.algebra, cr, mx)
    rho_y = StarMorphism(sy.algebra, cr, my)
    D, pa, pb = direct_sum_carrier(sx, sy, rho_x, rho_y, eps, f"corr({sx.label},{sy.label})")
    t = Tunnel(D, pa, pb, sx, sy, f"corr({sx.label},{sy.label})", "correspondence")
    t.meta.update({"eps": eps, "distortion": dis, "relation": tuple(R)})
    return t


def nearest_subgroup_relation(k: int, K: int) -> list:
    """Relate each point of Z_K to the nearest point of Z_k (ties go down); ``k | K``."""
    if K % k:
        raise ValidationError("k must divide K")
    step = K // k
    R = set()
    for y in range(K):
        x = (y // step + (1 if (y % step) * 2 > step else 0)) % k
        R.add((x, y))
    for x in range(k):
        R.add((x, x * step))
    return sorted(R)
