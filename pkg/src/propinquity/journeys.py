"""Journeys (finite chains of tunnels), the propinquity bound registry, and truncated chain spaces."""

from __future__ import annotations

import heapq
import json
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import linalg
from .cstar_core import CStarAlgebra, Element, StarMorphism, direct_sum, operator_norm, realize_subalgebra
from .errors import CertificateError, InconsistentSeminormError, ValidationError
from .mk_engine import DEFAULT_ITERS, Interval, diameter_estimate, worst_status
from .quantum_metric import (
    KernelCertificate,
    QuantumMetricSpace,
    SeminormAtom,
    check_lipschitz_pair,
    eval_seminorm,
)
from .tunnels import Tunnel, direct_sum_tunnel, identity_tunnel, lift_element

MAX_CHAIN = 8
MAX_CHAIN_DIM = 64


def space_id(space: QuantumMetricSpace) -> str:
    if not space.label:
        raise ValidationError("spaces in journeys need a registry label")
    return space.label


def default_eps(space: QuantumMetricSpace, frac: float = 0.05) -> float:
    d = diameter_estimate(space).hi
    return frac * d if d > 0 else frac


@dataclass(frozen=True)
class Journey:
    """Ordered legs with their measured length intervals.

    The journey length is the left-to-right sum of leg intervals, stored once
    at construction so that composition and reversal reuse it bit for bit.
    """

    legs: tuple
    leg_lengths: tuple
    length: Interval
    eps_net: float = 0.0

    def __post_init__(self):
        if not self.legs:
            raise ValidationError("a journey needs at least one leg")
        if len(self.legs) != len(self.leg_lengths):
            raise ValidationError("one length interval per leg")
        for t, u in zip(self.legs, self.legs[1:]):
            if space_id(t.cod) != space_id(u.dom):
                raise ValidationError(f"legs do not chain: {space_id(t.cod)} vs {space_id(u.dom)}")

    @staticmethod
    def from_legs(legs: Sequence[Tunnel], eps_net: float, iters: int = DEFAULT_ITERS, seed: int = 42) -> "Journey":
        lens = tuple(t.measure(eps_net, iters, seed).length for t in legs)
        return Journey.from_measured(tuple(legs), lens, eps_net)

    @staticmethod
    def from_measured(legs: Sequence[Tunnel], lens: Sequence[Interval], eps_net: float = 0.0) -> "Journey":
        total = lens[0]
        for x in lens[1:]:
            total = total + x
        return Journey(tuple(legs), tuple(lens), total, eps_net)

    @property
    def dom(self) -> QuantumMetricSpace:
        return self.legs[0].dom

    @property
    def cod(self) -> QuantumMetricSpace:
        return self.legs[-1].cod

    @property
    def size(self) -> int:
        return len(self.legs)

    @property
    def endpoints(self) -> tuple[str, str]:
        return space_id(self.dom), space_id(self.cod)

    def path(self) -> list[str]:
        return [space_id(self.dom)] + [space_id(t.cod) for t in self.legs]

    def kinds(self) -> tuple:
        return tuple(t.kind for t in self.legs)


def compose(j1: Journey, j2: Journey) -> Journey:
    """``j1`` followed by ``j2``; the length is the sum of the stored lengths."""
    if space_id(j1.cod) != space_id(j2.dom):
        raise ValidationError(f"cannot compose: {space_id(j1.cod)} is not {space_id(j2.dom)}")
    return Journey(j1.legs + j2.legs, j1.leg_lengths + j2.leg_lengths, j1.length + j2.length, max(j1.eps_net, j2.eps_net))


def reverse_journey(j: Journey) -> Journey:
    legs = tuple(t.reversed() for t in reversed(j.legs))
    return Journey(legs, tuple(reversed(j.leg_lengths)), j.length, j.eps_net)


def identity_journey(space: QuantumMetricSpace, eps_net: float | None = None) -> Journey:
    eps = default_eps(space) if eps_net is None else eps_net
    return Journey.from_legs([identity_tunnel(space)], eps)


def reduce_journey(j: Journey) -> Journey:
    """Loop erasure on registry identities; a closed loop collapses to the identity journey."""
    stack: list[tuple[str, int | None]] = [(space_id(j.dom), None)]
    for i, t in enumerate(j.legs):
        sid = space_id(t.cod)
        seen = [s for s, _ in stack]
        if sid in seen:
            del stack[seen.index(sid) + 1:]
        else:
            stack.append((sid, i))
    keep = [i for _, i in stack if i is not None]
    if not keep:
        return identity_journey(j.dom, j.eps_net or None)
    if len(keep) == len(j.legs):
        return j
    return Journey.from_measured([j.legs[i] for i in keep], [j.leg_lengths[i] for i in keep], j.eps_net)


# ------------------------------------------------------------------ itineraries


@dataclass(frozen=True)
class Itinerary:
    start: Element
    points: tuple
    lifts: tuple
    radius: float
    norm_bound: float
    final_norm: float

    @property
    def passed(self) -> bool:
        return self.final_norm <= self.norm_bound + 1e-6


def itinerary(j: Journey, a: Element, r: float | None = None) -> Itinerary:
    """Push ``a`` through every leg by minimal lifts; checks the summed fundamental estimate."""
    x = a
    r = eval_seminorm(j.dom, a) if r is None else r
    pts, lifts = [a], []
    for t in j.legs:
        lift = lift_element(t, x, "a")
        if lift.value > r * (1 + 1e-9) + 1e-9:
            raise CertificateError(f"lift exceeds radius: {lift.value} > {r}")
        lifts.append(lift)
        x = t.pi_b(lift.element)
        pts.append(x)
    reach = sum(t.measure(j.eps_net).reach.hi for t in j.legs) if j.eps_net > 0 else sum(m.hi for m in j.leg_lengths)
    return Itinerary(a, tuple(pts), tuple(lifts), r, operator_norm(a) + r * reach, operator_norm(x))


# --------------------------------------------------------------------- registry


def _class_predicate(cls) -> Callable[[Tunnel], bool]:
    if callable(cls):
        return cls
    if cls in (None, "all"):
        return lambda t: True
    if cls == "direct_sum_only":
        return lambda t: t.kind == "direct_sum"
    return lambda t: t.kind == cls or t.meta.get("class") == cls


@dataclass(frozen=True)
class PropinquityBound:
    a: str
    b: str
    value: Interval
    witness: Journey
    tunnel_class: str = "all"


@dataclass
class PropinquityRegistry:
    """Best known journeys between labelled spaces.

    ``bound`` minimizes ``length.hi`` over paths in the graph of registered
    journeys, so compositions through intermediate spaces are found
    automatically. Pairs are solved in a canonical order and reversed, which
    makes the bound exactly symmetric.
    """

    eps_net: float | None = None
    iters: int = DEFAULT_ITERS
    seed: int = 42
    auto_direct_sum: bool = True
    spaces: dict = field(default_factory=dict)
    journeys: list = field(default_factory=list)

    def add_space(self, space: QuantumMetricSpace) -> str:
        sid = space_id(space)
        if sid in self.spaces and self.spaces[sid] is not space:
            raise ValidationError(f"label {sid!r} is already registered to another space")
        self.spaces[sid] = space
        return sid

    def eps_for(self, *spaces: QuantumMetricSpace) -> float:
        if self.eps_net is not None:
            return self.eps_net
        return max(default_eps(s) for s in spaces)

    def add_journey(self, j: Journey) -> Journey:
        for s in (j.dom, j.cod):
            self.add_space(s)
        for t in j.legs:
            self.add_space(t.dom)
            self.add_space(t.cod)
        self.journeys.append(j)
        return j

    def add_tunnel(self, t: Tunnel, eps_net: float | None = None) -> Journey:
        eps = self.eps_for(t.dom, t.cod) if eps_net is None else eps_net
        return self.add_journey(Journey.from_legs([t], eps, self.iters, self.seed))

    def _edges(self, pred):
        best: dict = {}
        for j in self.journeys:
            if not all(pred(t) for t in j.legs):
                continue
            a, b = j.endpoints
            if a == b:
                continue
            for key, jj in (((a, b), j), ((b, a), None)):
                cur = best.get(key)
                if cur is None or j.length.hi < cur[0]:
                    best[key] = (j.length.hi, j if jj is not None else ("rev", j))
        return best

    def _search(self, a: str, b: str, pred):
        edges = self._edges(pred)
        adj: dict = {}
        for (u, v), (w, j) in edges.items():
            adj.setdefault(u, []).append((v, w, j))
        dist, prev = {a: 0.0}, {}
        heap = [(0.0, a)]
        while heap:
            d, u = heapq.heappop(heap)
            if u == b:
                break
            if d > dist.get(u, math.inf):
                continue
            for v, w, j in sorted(adj.get(u, []), key=lambda e: (e[0], e[1])):
                nd = d + w
                if nd < dist.get(v, math.inf):
                    dist[v], prev[v] = nd, (u, j)
                    heapq.heappush(heap, (nd, v))
        if b not in prev:
            return None
        legs = []
        v = b
        while v != a:
            u, j = prev[v]
            legs.append(reverse_journey(j[1]) if isinstance(j, tuple) else j)
            v = u
        out = legs[-1]
        for j in reversed(legs[:-1]):
            out = compose(out, j)
        return out

    def bound(self, a: str, b: str, tunnel_class="all") -> PropinquityBound:
        for s in (a, b):
            if s not in self.spaces:
                raise KeyError(f"space {s!r} is not registered")
        if (a, b) != tuple(sorted((a, b))):
            pb = self.bound(b, a, tunnel_class)
            return PropinquityBound(a, b, pb.value, reverse_journey(pb.witness), pb.tunnel_class)
        pred = _class_predicate(tunnel_class)
        tag = tunnel_class if isinstance(tunnel_class, str) else getattr(tunnel_class, "__name__", "user")
        if a == b:
            direct = [j for j in self.journeys if j.endpoints == (a, a) and all(pred(t) for t in j.legs)]
            if direct:
                best = min(direct, key=lambda j: j.length.hi)
            else:
                best = identity_journey(self.spaces[a], self.eps_for(self.spaces[a]))
            return PropinquityBound(a, b, best.length, best, tag)
        found = self._search(a, b, pred)
        if found is None and self.auto_direct_sum:
            t = direct_sum_tunnel(self.spaces[a], self.spaces[b])
            if pred(t):
                self.add_tunnel(t)
                found = self._search(a, b, pred)
        if found is None:
            raise LookupError(f"no journey from {a} to {b} in class {tag}")
        if found.size > 1:
            self.journeys.append(found)
        return PropinquityBound(a, b, found.length, found, tag)

    def export_json(self, pairs: Sequence[tuple[str, str]] | None = None, tunnel_class="all") -> str:
        ids = sorted(self.spaces)
        if pairs is None:
            pairs = [(x, y) for i, x in enumerate(ids) for y in ids[i + 1:]]
        rows = []
        for x, y in pairs:
            try:
                pb = self.bound(x, y, tunnel_class)
            except LookupError:
                continue
            rows.append(
                {
                    "a": x,
                    "b": y,
                    "lo": pb.value.lo,
                    "hi": pb.value.hi,
                    "status": pb.value.status,
                    "path": pb.witness.path(),
                    "kinds": list(pb.witness.kinds()),
                    "leg_lengths": [[m.lo, m.hi, m.status] for m in pb.witness.leg_lengths],
                    "eps_net": pb.witness.eps_net,
                }
            )
        return json.dumps({"format_version": 1, "spaces": ids, "bounds": rows}, indent=2, sort_keys=True)


def load_bounds(text: str) -> list[dict]:
    """Read an exported bound table back; witness journeys are kept as paths and leg intervals."""
    doc = json.loads(text)
    if doc.get("format_version") != 1:
        raise ValidationError("unknown registry format version")
    out = []
    for row in doc["bounds"]:
        legs = [Interval(lo, hi, st) for lo, hi, st in row["leg_lengths"]]
        total = legs[0]
        for x in legs[1:]:
            total = total + x
        if total.hi != row["hi"] or total.lo != row["lo"]:
            raise ValidationError(f"stored length of {row['a']}->{row['b']} does not match its legs")
        out.append(dict(row, value=total))
    return out


# ------------------------------------------------------------------ chain spaces


@dataclass
class ChainSpace:
    tunnels: tuple
    n: int
    space: QuantumMetricSpace
    embedding: StarMorphism | None
    coordinates: tuple
    kernel: KernelCertificate
    constraint_residual: float
    diameter: Interval
    diameter_bound: float
    lengths: tuple
    eps_net: float

    @property
    def bound_holds(self) -> bool:
        return self.diameter.lo <= self.diameter_bound + 4 * self.eps_net

    def coordinate(self, j: int, x: np.ndarray) -> np.ndarray:
        """Coordinates of ``d_j`` for a chain element given in chain-space coordinates."""
        return self.coordinates[j].matrix @ x


def _block_matrix(alg: CStarAlgebra, e: Element) -> np.ndarray:
    N = sum(alg.block_dims)
    out = np.zeros((N, N), dtype=complex)
    o = 0
    for b in e.blocks:
        n = b.shape[0]
        out[o:o + n, o:o + n] = b
        o += n
    return out


def _from_block_matrix(alg: CStarAlgebra, x: np.ndarray) -> Element:
    blocks, o = [], 0
    for n in alg.block_dims:
        blocks.append(x[o:o + n, o:o + n])
        o += n
    return alg.element(blocks)


def build_chain_space(
    tunnels: Sequence[Tunnel],
    n: int,
    eps_net: float | None = None,
    iters: int = DEFAULT_ITERS,
    seed: int = 42,
) -> ChainSpace:
    """``H_n = {(d_0..d_n) : omega_j(d_j) = pi_{j+1}(d_{j+1})}`` with ``max_j L^j(d_j)``.

    ``tunnels`` holds ``tau_0..tau_n``; ``omega_j`` is the codomain projection
    of ``tau_j`` and ``pi_{j+1}`` the domain projection of ``tau_{j+1}``.
    """
    if n < 0 or n > MAX_CHAIN:
        raise ValidationError(f"chain length must be in 0..{MAX_CHAIN}")
    taus = tuple(tunnels[: n + 1])
    if len(taus) != n + 1:
        raise ValidationError(f"H_{n} needs {n + 1} tunnels, got {len(taus)}")
    for t, u in zip(taus, taus[1:]):
        if t.cod.algebra != u.dom.algebra:
            raise ValidationError("consecutive tunnels must share an endpoint algebra")
    carriers = [t.carrier for t in taus]
    eps = default_eps(carriers[0]) if eps_net is None else eps_net
    diam0 = diameter_estimate(carriers[0])
    lengths = tuple(t.measure(eps, iters, seed).length for t in taus[:n])
    bound = diam0.hi + 4 * sum(m.hi for m in lengths)
    if n == 0:
        D = carriers[0]
        ident = StarMorphism(D.algebra, D.algebra, np.eye(D.algebra.dim))
        return ChainSpace(taus, 0, D, None, (ident,), check_lipschitz_pair(D), 0.0, diam0, bound, lengths, eps)
    total, projs = direct_sum(*[c.algebra for c in carriers])
    if sum(total.block_dims) > MAX_CHAIN_DIM:
        raise ValidationError(f"chain carrier is larger than {MAX_CHAIN_DIM}")
    cons = np.vstack([
        taus[j].pi_b.matrix @ projs[j].matrix - taus[j + 1].pi_a.matrix @ projs[j + 1].matrix for j in range(n)
    ])
    ns = linalg.nullspace(cons)
    u = total.unit_coords
    if ns.shape[1] == 0 or np.max(np.abs(cons @ u)) > 1e-9:
        raise InconsistentSeminormError("the compatibility constraints exclude the unit")
    span = [_block_matrix(total, total.from_coords(v)) for v in ns.T]
    real = realize_subalgebra(span, seed=seed)
    H = real.algebra
    cols = []
    for k in range(H.dim):
        x = real.from_blocks(H.basis_element(k))
        cols.append(total.sa_coords(_from_block_matrix(total, x), tol=1e-7))
    E = np.array(cols).T
    emb = StarMorphism(H, total, E)
    rep = emb.report()
    if not (rep.is_homomorphism and rep.injective):
        raise CertificateError("chain-space embedding is not a faithful *-homomorphism")
    resid = float(np.max(np.abs(cons @ E))) if E.size else 0.0
    if resid > 1e-9:
        raise CertificateError(f"chain-space constraints violated by {resid:.2e}")
    coords = tuple(StarMorphism(H, carriers[j].algebra, projs[j].matrix @ E) for j in range(n + 1))
    atoms = []
    for j, c in enumerate(carriers):
        for t in c.atoms:
            atoms.append(SeminormAtom("component_pullback", t.image, t.matrix @ coords[j].matrix, f"{j}:{t.label}"))
    space = QuantumMetricSpace(H, atoms, f"H_{n}")
    kern = check_lipschitz_pair(space)
    if not kern.passed:
        raise InconsistentSeminormError(f"chain-space seminorm kernel has dimension {kern.nullity}")
    diam = diameter_estimate(space)
    return ChainSpace(taus, n, space, emb, coords, kern, resid, diam, bound, lengths, eps)


# ----------------------------------------------------------- circle convergence


@dataclass(frozen=True)
class ConvergenceRow:
    k: int
    bound: Interval
    oracle: float
    journey_size: int


def circle_convergence(k_list: Sequence[int], k_max: int, eps_net: float | None = None, iters: int = DEFAULT_ITERS, seed: int = 42):
    """Journey bounds between ``C(Z_k)`` and ``C(Z_{k_max})`` through subgroup correspondences.

    Consecutive spaces in the ladder ``k, 2k, ...`` are joined by the
    nearest-point correspondence; its distortion is ``pi/k`` so every leg has
    length ``pi/(2k)`` and the journey from ``Z_k`` stays below ``pi/k``.
    """
    from .zoo import FiniteMetricSpace, circle_metric, circle_subgroup_space, correspondence_to_tunnel, nearest_subgroup_relation

    ks = sorted(set(int(k) for k in k_list))
    if list(k_list) != sorted(k_list):
        raise ValidationError("k_list must be ascending")
    if any(k < 1 or k_max % k for k in ks):
        raise ValidationError("every k must divide k_max")
    reg = PropinquityRegistry(eps_net=eps_net, iters=iters, seed=seed, auto_direct_sum=False)
    spaces: dict[int, QuantumMetricSpace] = {}

    def space(k):
        if k not in spaces:
            spaces[k] = circle_subgroup_space(k, f"Z_{k}")
            reg.add_space(spaces[k])
        return spaces[k]

    ladder = set(ks) | {k_max}
    for k in ks:
        j = k
        while j < k_max and k_max % (2 * j) == 0:
            ladder.add(2 * j)
            j *= 2
    for j in sorted(ladder):
        if j == k_max:
            continue
        nxt = min(x for x in ladder if x > j and x % j == 0)
        X, Y = FiniteMetricSpace(circle_metric(j)), FiniteMetricSpace(circle_metric(nxt))
        t = correspondence_to_tunnel(X, Y, nearest_subgroup_relation(j, nxt), space_x=space(j), space_y=space(nxt))
        reg.add_tunnel(t, eps_net if eps_net is not None else 0.05 * math.pi)
    rows = []
    top = space(k_max)
    for k in ks:
        pb = reg.bound(space(k).label, top.label)
        rows.append(ConvergenceRow(k, pb.value, math.pi / k if k < k_max else 0.0, pb.witness.size))
    return rows, reg
