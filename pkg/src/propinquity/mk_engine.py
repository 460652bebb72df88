"""Monge-Kantorovich distances, state-space nets and Hausdorff estimates.

Two solvers sit behind every distance:

* polyhedral Lip-norms (all image blocks 1x1) go through the exact simplex;
* everything else uses switching subgradient ascent, which returns a feasible
  witness and hence a certified lower bound.

States are handled as real functionals on self-adjoint coordinates, so a
state of ``A`` pulled back along ``pi: D -> A`` is just ``pi.matrix.T @ f``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import linalg, simplex
from .cstar_core import CStarAlgebra, Element, StarMorphism, State
from .errors import CertificateError, ResourceError, ValidationError
from .quantum_metric import QuantumMetricSpace, check_lipschitz_pair

DEFAULT_ITERS = 5000
MAX_NET = 20000
SAME_TOL = 1e-12
STATUS_ORDER = ("exact", "certified", "certified_lower_bound", "heuristic")


def worst_status(*statuses: str) -> str:
    return max(statuses, key=STATUS_ORDER.index)


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float
    status: str = "exact"

    def __post_init__(self):
        if self.lo > self.hi + 1e-15:
            raise ValidationError(f"empty interval [{self.lo}, {self.hi}]")

    def __add__(self, other: "Interval") -> "Interval":
        return Interval(self.lo + other.lo, self.hi + other.hi, worst_status(self.status, other.status))

    def contains(self, x: float, slack: float = 0.0) -> bool:
        return self.lo - slack <= x <= self.hi + slack

    @staticmethod
    def join_max(a: "Interval", b: "Interval") -> "Interval":
        return Interval(max(a.lo, b.lo), max(a.hi, b.hi), worst_status(a.status, b.status))


@dataclass(frozen=True)
class MKResult:
    value: float
    status: str
    witness: np.ndarray
    residual: float
    iterations: int

    def witness_element(self, algebra: CStarAlgebra) -> Element:
        return algebra.from_coords(self.witness)


def _require(qms: QuantumMetricSpace):
    cert = check_lipschitz_pair(qms)
    if not cert.passed:
        raise CertificateError(
            f"{qms.label or 'space'}: kernel certificate failed (nullity {cert.nullity}); MK is not a metric"
        )


# ---------------------------------------------------------------- polyhedral LP


def _graph_prune(rows: np.ndarray, rel: float = 1e-12) -> np.ndarray:
    """Drop two-sparse difference rows implied by shorter paths of other such rows."""
    n = rows.shape[1]
    edges, other = {}, []
    for r in rows:
        nz = np.nonzero(np.abs(r) > 0)[0]
        if len(nz) == 2 and r[nz[0]] * r[nz[1]] < 0 and abs(abs(r[nz[0]]) - abs(r[nz[1]])) <= rel * abs(r[nz[0]]):
            i, j = int(nz[0]), int(nz[1])
            length = 1.0 / abs(r[nz[0]])
            if length < edges.get((i, j), np.inf):
                edges[(i, j)] = length
        else:
            other.append(r)
    if not edges:
        return rows
    d = np.full((n, n), np.inf)
    np.fill_diagonal(d, 0.0)
    for (i, j), c in edges.items():
        d[i, j] = d[j, i] = min(d[i, j], c)
    for k in range(n):
        d = np.minimum(d, d[:, k:k + 1] + d[k:k + 1, :])
    kept = []
    for (i, j), c in sorted(edges.items()):
        via = d[i, :] + d[:, j]
        via[[i, j]] = np.inf
        if c <= d[i, j] * (1 + rel) and not np.any(via <= c * (1 + rel)):
            r = np.zeros(n)
            r[i], r[j] = 1.0 / c, -1.0 / c
            kept.append(r)
    return np.array(kept + other)


def _lp_data(qms: QuantumMetricSpace):
    """Pruned constraint rows with the pinned coordinate removed."""
    if "lp" not in qms._cache:
        rows = qms.scalar_matrix
        rows = rows[np.max(np.abs(rows), axis=1) > 0]
        rows = np.unique(np.round(rows, 15), axis=0)
        rows = _graph_prune(rows)
        u = qms.algebra.unit_coords
        pin = int(np.argmax(np.abs(u)))
        keep = [k for k in range(qms.algebra.dim) if k != pin]
        qms._cache["lp"] = (rows[:, keep], keep, pin)
    return qms._cache["lp"]


def _lp_hull_distance(qms: QuantumMetricSpace, f: np.ndarray, hull: np.ndarray):
    """``max_x f.x - max_j h_j.x`` over ``L(x) <= 1``; exact."""
    R, keep, _ = _lp_data(qms)
    m = R.shape[0]
    hull = np.atleast_2d(hull)
    if hull.shape[0] == 1:
        c = (f - hull[0])[keep]
        res = simplex.maximize(c, np.vstack([R, -R]), np.ones(2 * m))
        x = np.zeros(qms.algebra.dim)
        x[keep] = res.x
        return max(res.value, 0.0), x, res.iterations
    k = hull.shape[0]
    A = np.zeros((2 * m + k, len(keep) + 1))
    A[:m, :-1] = R
    A[m:2 * m, :-1] = -R
    A[2 * m:, :-1] = hull[:, keep]
    A[2 * m:, -1] = -1.0
    b = np.concatenate([np.ones(2 * m), np.zeros(k)])
    c = np.concatenate([f[keep], [-1.0]])
    res = simplex.maximize(c, A, b)
    x = np.zeros(qms.algebra.dim)
    x[keep] = res.x[:-1]
    return max(res.value, 0.0), x, res.iterations


# ------------------------------------------------------- switching subgradient


def _ascent_hull_distance(qms: QuantumMetricSpace, f: np.ndarray, hull: np.ndarray, iters: int, seed: int):
    """Switching subgradient ascent for ``max f.x - max_j h_j.x`` s.t. ``L(x) <= 1``.

    Objective steps when feasible, constraint steps otherwise; every iterate
    is rescaled by its Lip-norm to record a feasible value.
    """
    hull = np.atleast_2d(hull)
    u = qms.algebra.unit_coords
    uu = u / np.dot(u, u)

    def proj(v):
        return v - np.dot(v, u) * uu

    def objective(x):
        return float(f @ x - np.max(hull @ x))

    rng = np.random.default_rng(seed)
    g0 = proj(f - hull.mean(axis=0))
    if np.linalg.norm(g0) <= 1e-14:
        g0 = proj(rng.standard_normal(len(f)))
    L0 = qms.eval_coords(g0)
    if L0 <= 1e-14 * np.linalg.norm(g0):
        raise CertificateError("ascent direction lies in the seminorm kernel")
    x = g0 / L0
    best, best_x = objective(x), x.copy()
    scale = float(np.linalg.norm(x))
    half_best = best
    for t in range(1, iters + 1):
        Lx, gL = qms.supergradient(x)
        if Lx > 0:
            val = objective(x) / Lx
            if val > best:
                best, best_x = val, x / Lx
        if Lx <= 1.0 + 1e-9:
            j = int(np.argmax(hull @ x))
            d = proj(f - hull[j])
        else:
            d = -proj(gL)
        nd = np.linalg.norm(d)
        if nd == 0.0:
            break
        x = x + (scale / math.sqrt(t)) * d / nd
        if t == iters // 2:
            half_best = best
    best_x = best_x / max(qms.eval_coords(best_x), 1e-300)
    best = max(objective(best_x), 0.0)
    return best, best_x, max(best - half_best, 0.0), iters


def hull_distance(qms: QuantumMetricSpace, f: np.ndarray, hull: np.ndarray, iters: int = DEFAULT_ITERS, seed: int = 42, method: str = "auto") -> MKResult:
    """MK distance from the functional ``f`` to the convex hull of the rows of ``hull``.

    ``method`` is ``auto`` (LP when the seminorm is polyhedral), ``lp`` or ``ascent``.
    """
    if method not in ("auto", "lp", "ascent"):
        raise ValidationError(f"unknown method {method!r}")
    _require(qms)
    f = np.asarray(f, dtype=float)
    hull = np.atleast_2d(np.asarray(hull, dtype=float))
    if np.any(np.max(np.abs(hull - f), axis=1) <= SAME_TOL):
        return MKResult(0.0, "exact", np.zeros(qms.algebra.dim), 0.0, 0)
    if method == "lp" and not qms.polyhedral:
        raise ValidationError("the LP path needs a polyhedral seminorm")
    if qms.polyhedral and method != "ascent":
        val, x, it = _lp_hull_distance(qms, f, hull)
        status, resid = "exact", max(qms.eval_coords(x) - 1.0, 0.0)
    else:
        val, x, resid, it = _ascent_hull_distance(qms, f, hull, iters, seed)
        status = "certified_lower_bound"
    # pin the witness: f(x) = 0
    u = qms.algebra.unit_coords
    x = x - float(f @ x) / float(f @ u) * u
    return MKResult(val, status, x, resid, it)


def mk_distance(qms: QuantumMetricSpace, phi: State, psi: State, iters: int = DEFAULT_ITERS, seed: int = 42, method: str = "auto") -> MKResult:
    """``sup{|phi(a) - psi(a)| : L(a) <= 1}``, with a pinned witness."""
    for s in (phi, psi):
        if s.algebra != qms.algebra:
            raise ValidationError("state does not live on this algebra")
    return hull_distance(qms, phi.functional(), psi.functional()[None, :], iters, seed, method)


def mk_functionals(qms: QuantumMetricSpace, f: np.ndarray, g: np.ndarray, iters: int = DEFAULT_ITERS, seed: int = 42, method: str = "auto") -> MKResult:
    return hull_distance(qms, f, np.asarray(g)[None, :], iters, seed, method)


# ----------------------------------------------------------------- state nets


@dataclass
class StateNet:
    """Finite set of states (as functionals) with a covering radius.

    ``kind`` is ``"full"`` when the net covers the whole state space and
    ``"pure"`` when it only covers the pure states; the latter suffices for
    sup-type Hausdorff sides because distances to convex sets are convex.
    """

    algebra: CStarAlgebra
    functionals: np.ndarray
    resolution: float
    provenance: str
    kind: str = "full"
    meta: dict = field(default_factory=dict)

    def __len__(self):
        return self.functionals.shape[0]

    def states(self) -> list[State]:
        return [State.from_functional(self.algebra, f) for f in self.functionals]

    def pushforward(self, pi: StarMorphism) -> "StateNet":
        """Pull every state back along ``pi`` (``phi -> phi o pi``)."""
        if pi.target != self.algebra:
            raise ValidationError("net and morphism target differ")
        return StateNet(pi.source, self.functionals @ pi.matrix, self.resolution, self.provenance, self.kind, dict(self.meta))


def simplex_grid(n: int, N: int) -> np.ndarray:
    """All probability vectors with entries in (1/N) Z."""
    out = []
    for cut in itertools.combinations(range(N + n - 1), n - 1):
        prev, row = -1, []
        for c in cut:
            row.append(c - prev - 1)
            prev = c
        row.append(N + n - 2 - prev)
        out.append(row)
    return np.array(out, dtype=float) / N


def simplex_grid_size(n: int, N: int) -> int:
    return math.comb(N + n - 1, n - 1)


def simplex_denominator(n: int, diam: float, eps: float) -> int:
    """Smallest N with ``(diam/2) * n/(2N) <= eps`` (largest-remainder rounding bound)."""
    if diam <= 0:
        return 1
    return max(1, math.ceil(n * diam / (4.0 * eps) - 1e-12))


def bloch_ball_points(h: float) -> np.ndarray:
    """Cubic grid of spacing ``h`` covering the unit ball, projected into it."""
    # keep integer points with |i|^2 <= (reach/h)^2; ties at the boundary are kept
    reach = 1.0 + 0.5 * math.sqrt(3.0) * h
    bound = math.floor((reach / h) ** 2 + 1e-9)
    m = math.isqrt(bound)
    ax = np.arange(-m, m + 1)
    idx = np.array(np.meshgrid(ax, ax, ax, indexing="ij")).reshape(3, -1).T
    g = idx[np.sum(idx * idx, axis=1) <= bound] * h
    r = np.linalg.norm(g, axis=1)
    g[r > 1.0] /= r[r > 1.0, None]
    return g


def bloch_sphere_points(h: float) -> np.ndarray:
    """Unit vectors within chordal distance ``h`` of every point of the sphere.

    Faces of the cube ``[-1, 1]^3`` get a square grid of spacing ``sqrt(2) h``
    (covering radius ``h``); radial projection from outside the ball is
    1-Lipschitz, so the projected grid keeps the covering radius.
    """
    s = math.sqrt(2.0) * h
    k = max(1, math.ceil(2.0 / s))
    ax = np.linspace(-1.0, 1.0, k + 1)
    u, v = np.meshgrid(ax, ax, indexing="ij")
    u, v = u.ravel(), v.ravel()
    pts = []
    for axis in range(3):
        for sign in (-1.0, 1.0):
            p = np.empty((u.size, 3))
            p[:, axis] = sign
            others = [i for i in range(3) if i != axis]
            p[:, others[0]] = u
            p[:, others[1]] = v
            pts.append(p)
    p = np.unique(np.round(np.vstack(pts), 14), axis=0)
    return p / np.linalg.norm(p, axis=1, keepdims=True)


def _bloch_functionals(points: np.ndarray) -> np.ndarray:
    """Coordinates functionals of ``(I + r.sigma)/2`` in the M_2 Hermitian basis."""
    x, y, z = points.T
    r2 = 1.0 / math.sqrt(2.0)
    return np.column_stack([(1 + z) / 2, (1 - z) / 2, x * r2, y * r2])


def _random_pure_functionals(n: int, count: int, rng: np.random.Generator) -> np.ndarray:
    alg = CStarAlgebra((n,))
    basis = alg._bases[0]
    out = np.empty((count, n * n))
    for i in range(count):
        v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        v /= np.linalg.norm(v)
        out[i] = (basis.conj() @ np.outer(v, v.conj()).ravel()).real
    return out


def _embed_block(alg: CStarAlgebra, b: int, block_funcs: np.ndarray, weight: float = 1.0) -> np.ndarray:
    out = np.zeros((block_funcs.shape[0], alg.dim))
    out[:, alg.block_slice(b)] = weight * block_funcs
    return out


def build_state_net(
    qms: QuantumMetricSpace,
    eps: float,
    kind: str = "full",
    max_states: int = MAX_NET,
    n_random: int = 256,
    seed: int = 42,
) -> StateNet:
    """Net of the state space (``kind="full"``) or of the pure states (``kind="pure"``).

    Commutative algebras get simplex grids (full) or Dirac states (pure, exact).
    2x2 blocks get Bloch grids with trace-norm mesh ``eps / R``; larger blocks
    get random pure states and are flagged heuristic.
    """
    if not eps > 0:
        raise ValidationError("net resolution must be positive")
    if kind not in ("full", "pure"):
        raise ValidationError(f"unknown net kind {kind!r}")
    alg = qms.algebra
    if alg.dim == 1:
        return StateNet(alg, np.ones((1, 1)), 0.0, "exact", kind)
    rng = np.random.default_rng(seed)
    dims = alg.block_dims
    nb = len(dims)
    if kind == "pure":
        parts, prov, res = [], "exact", 0.0
        radius = None
        for b, n in enumerate(dims):
            if n == 1:
                parts.append(_embed_block(alg, b, np.ones((1, 1))))
                continue
            if n == 2:
                if radius is None:
                    radius = _radius(qms)
                pts = bloch_sphere_points(eps / radius.hi)
                parts.append(_embed_block(alg, b, _bloch_functionals(pts)))
                prov = worst_status(prov, "certified" if radius.status in ("exact", "certified") else "heuristic")
            else:
                parts.append(_embed_block(alg, b, _random_pure_functionals(n, n_random, rng)))
                prov = "heuristic"
            res = eps
        funcs = np.vstack(parts)
        if funcs.shape[0] > max_states:
            raise ResourceError(f"pure-state net of {funcs.shape[0]} states exceeds budget {max_states}")
        return StateNet(alg, funcs, res, prov, "pure")

    radius = _radius(qms)
    if alg.is_commutative:
        N = simplex_denominator(nb, radius.hi, eps)
        size = simplex_grid_size(nb, N)
        if size > max_states:
            Nmin = N
            while Nmin > 1 and simplex_grid_size(nb, Nmin) > max_states:
                Nmin -= 1
            eps_min = nb * radius.hi / (4.0 * Nmin)
            raise ResourceError(f"simplex grid of {size} states exceeds budget {max_states}; smallest feasible eps {eps_min:.4g}", eps_min)
        funcs = simplex_grid(nb, N)
        return StateNet(alg, funcs, eps, worst_status("certified", radius.status), "full", {"denominator": N})

    # mixtures: weight grid at eps/2 and per-block nets at eps/2
    e_w, e_b = (eps / 2, eps / 2) if nb > 1 else (None, eps)
    block_nets, prov = [], worst_status("certified", radius.status)
    for n in dims:
        if n == 1:
            block_nets.append(np.ones((1, 1)))
        elif n == 2:
            h = 2.0 * e_b / (math.sqrt(3.0) * radius.hi)
            block_nets.append(_bloch_functionals(bloch_ball_points(h)))
        else:
            block_nets.append(_random_pure_functionals(n, n_random, rng))
            prov = "heuristic"
    if nb == 1:
        funcs = block_nets[0]
        if funcs.shape[0] > max_states:
            raise ResourceError(f"net of {funcs.shape[0]} states exceeds budget {max_states}")
        return StateNet(alg, funcs, eps, prov, "full", {"points": funcs.shape[0]})
    N = simplex_denominator(nb, radius.hi, e_w)
    size = simplex_grid_size(nb, N) * int(np.prod([len(x) for x in block_nets]))
    if size > max_states:
        raise ResourceError(f"product net of {size} states exceeds budget {max_states}")
    rows = []
    for w in simplex_grid(nb, N):
        for combo in itertools.product(*[range(len(x)) for x in block_nets]):
            f = np.zeros(alg.dim)
            for b, idx in enumerate(combo):
                f[alg.block_slice(b)] = w[b] * block_nets[b][idx]
            rows.append(f)
    funcs = np.unique(np.round(np.array(rows), 14), axis=0)
    return StateNet(alg, funcs, eps, prov, "full", {"denominator": N})


def _radius(qms: QuantumMetricSpace) -> Interval:
    if "radius" not in qms._cache:
        qms._cache["radius"] = diameter_estimate(qms)
    return qms._cache["radius"]


# ------------------------------------------------------------ diameters, Hausdorff


def linear_algebra_diameter_bound(qms: QuantumMetricSpace) -> float:
    """``2 sqrt(sum n_beta) / sigma_min``: a certified (loose) diameter bound.

    ``sum_beta ||T_beta x||_HS^2 <= (sum n_beta) L(x)^2`` and the spread of a
    self-adjoint element is at most twice its HS distance to the scalars.
    """
    M = qms.stacked
    u = qms.algebra.unit_coords
    uu = np.outer(u, u) / float(u @ u)
    G = M.T @ M
    big = max(1.0, float(np.trace(G)))
    w, _ = linalg.symmetric_eigh(G + big * uu)
    smin = math.sqrt(max(w[0], 0.0))
    if smin <= 1e-12:
        raise CertificateError("stacked atoms are singular off the scalars")
    width = sum(t.image.block_dims[b] for t in qms.atoms for b in range(len(t.image.block_dims)))
    return 2.0 * math.sqrt(width) / smin


def diameter_estimate(qms: QuantumMetricSpace, net: StateNet | None = None, iters: int = 1500, seed: int = 42) -> Interval:
    """MK diameter of the state space.

    With a net: max pairwise MK over the net, widened by twice the resolution.
    Without one: exact over Dirac pairs for polyhedral seminorms; otherwise an
    alternating eigenvector/MK ascent for the lower end and the certified
    linear-algebra bound for the upper end.
    """
    _require(qms)
    if net is not None:
        F = net.functionals
        best, status = 0.0, net.provenance
        for i in range(len(F)):
            for j in range(i + 1, len(F)):
                r = mk_functionals(qms, F[i], F[j], iters, seed)
                best = max(best, r.value)
                status = worst_status(status, r.status)
        return Interval(max(0.0, best - 2 * net.resolution), best + 2 * net.resolution, worst_status(status, "certified") if status == "exact" and net.resolution > 0 else status)
    if qms.polyhedral and qms.algebra.is_commutative:
        n = qms.algebra.dim
        best = 0.0
        eye = np.eye(n)
        for i in range(n):
            for j in range(i + 1, n):
                best = max(best, mk_functionals(qms, eye[i], eye[j]).value)
        return Interval(best, best, "exact")
    lo = _alternating_diameter(qms, iters, seed)
    hi = linear_algebra_diameter_bound(qms)
    return Interval(lo, max(lo, hi), "certified")


def _alternating_diameter(qms: QuantumMetricSpace, iters: int, seed: int, restarts: int = 3, rounds: int = 3) -> float:
    alg = qms.algebra
    rng = np.random.default_rng(seed)
    best = 0.0
    for _ in range(restarts):
        a = alg.random_self_adjoint(rng)
        for _ in range(rounds):
            f_top, f_bot = _extreme_functionals(alg, a)
            r = mk_functionals(qms, f_top, f_bot, iters, int(rng.integers(1 << 30)))
            best = max(best, r.value)
            a = alg.from_coords(r.witness)
    return best


def _extreme_functionals(alg: CStarAlgebra, a: Element):
    """Vector states at the top and bottom of the spectrum of ``a``."""
    top = bot = None
    for b, x in enumerate(a.blocks):
        vals, vecs = linalg.hermitian_eigh(0.5 * (x + x.conj().T))
        if top is None or vals[-1] > top[0]:
            top = (vals[-1], b, vecs[:, -1])
        if bot is None or vals[0] < bot[0]:
            bot = (vals[0], b, vecs[:, 0])
    out = []
    for _, b, v in (top, bot):
        f = np.zeros(alg.dim)
        f[alg.block_slice(b)] = (alg._bases[b].conj() @ np.outer(v, v.conj()).ravel()).real
        out.append(f)
    return out


def hausdorff_distance(net_a: StateNet, net_b: StateNet, qms: QuantumMetricSpace, iters: int = DEFAULT_ITERS, seed: int = 42) -> Interval:
    """Discrete Hausdorff distance of two nets in ``mk_L``, widened by both resolutions."""
    if net_a.algebra != qms.algebra or net_b.algebra != qms.algebra:
        raise ValidationError("nets must live on the metric space's algebra")
    A, B = net_a.functionals, net_b.functionals
    D = np.zeros((len(A), len(B)))
    status = worst_status(net_a.provenance, net_b.provenance)
    for i in range(len(A)):
        for j in range(len(B)):
            if np.max(np.abs(A[i] - B[j])) <= SAME_TOL:
                continue
            r = mk_functionals(qms, A[i], B[j], iters, seed)
            D[i, j] = r.value
            status = worst_status(status, r.status)
    H = max(float(D.min(axis=1).max()), float(D.min(axis=0).max()))
    w = net_a.resolution + net_b.resolution
    if w > 0 and status == "exact":
        status = "certified"
    return Interval(max(0.0, H - w), H + w, status)


FULL = "full-state-space"


def directed_convex_distance(qms: QuantumMetricSpace, points: StateNet, hull, iters: int = DEFAULT_ITERS, seed: int = 42):
    """``max_{phi in points} dist(phi, conv(hull))``; ``hull`` may be :data:`FULL`."""
    if hull is FULL:
        return 0.0, "exact"
    best, status = 0.0, "exact"
    H = hull.functionals
    for f in points.functionals:
        r = hull_distance(qms, f, H, iters, seed)
        best = max(best, r.value)
        status = worst_status(status, r.status)
    return best, status


def convex_hausdorff(qms: QuantumMetricSpace, side_a, side_b, eps: float, iters: int = DEFAULT_ITERS, seed: int = 42) -> Interval:
    """Hausdorff distance between two closed convex sets of states.

    Each side is a pure-state :class:`StateNet` (its closed convex hull is
    meant) or :data:`FULL`. Suprema are taken over the net points (extreme
    points suffice), infima are exact distances to convex hulls.
    """
    if side_a is FULL and side_b is FULL:
        return Interval(0.0, 0.0, "exact")
    full_net = None
    if side_a is FULL or side_b is FULL:
        full_net = build_state_net(qms, eps, kind="pure", seed=seed)
    pa = full_net if side_a is FULL else side_a
    pb = full_net if side_b is FULL else side_b
    h_ab, s1 = directed_convex_distance(qms, pa, side_b, iters, seed)
    h_ba, s2 = directed_convex_distance(qms, pb, side_a, iters, seed)
    H = max(h_ab, h_ba)
    w = pa.resolution + pb.resolution
    status = worst_status(s1, s2, pa.provenance, pb.provenance)
    if w > 0 and status == "exact":
        status = "certified"
    return Interval(max(0.0, H - w), H + w, status)
