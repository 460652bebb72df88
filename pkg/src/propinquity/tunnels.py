"""Tunnels between quantum compact metric spaces and their reach, depth and length.

A tunnel is a carrier space ``(D, L_D)`` with unital *-epimorphisms
``pi_a: D -> A`` and ``pi_b: D -> B`` whose dual maps are isometries of the
MK metrics. Reach compares the two pulled-back state spaces inside ``S(D)``,
depth compares ``S(D)`` with the convex hull of their union.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import linalg, simplex
from .cstar_core import (
    CStarAlgebra,
    Element,
    StarMorphism,
    direct_sum,
    identity_morphism,
    jordan_product,
    lie_product,
    operator_norm,
    require_morphism,
    tensor_embeddings,
    validate_morphism,
)
from .errors import CertificateError, ValidationError
from .mk_engine import (
    DEFAULT_ITERS,
    FULL,
    Interval,
    build_state_net,
    convex_hausdorff,
    diameter_estimate,
    hull_distance,
    worst_status,
)
from .quantum_metric import (
    QuantumMetricSpace,
    component_pullback,
    doubling_difference_atom,
    eval_seminorm,
    morphism_difference_atom,
    require_lipschitz_pair,
)

LIFT_TOL = 1e-9


@dataclass(frozen=True)
class TunnelReport:
    epimorphisms: bool
    max_contraction_excess: float
    lift_excess: float
    probes: int
    lift_status: str

    @property
    def passed(self) -> bool:
        return self.epimorphisms and self.max_contraction_excess <= 1e-9 and self.lift_excess <= 1e-6


@dataclass(frozen=True)
class TunnelMeasure:
    reach: Interval
    depth: Interval
    length: Interval
    eps_net: float


@dataclass(frozen=True)
class Lift:
    element: Element
    value: float
    status: str


class Tunnel:
    """``(D, L_D, pi_a, pi_b)`` from ``dom`` to ``cod``."""

    def __init__(
        self,
        carrier: QuantumMetricSpace,
        pi_a: StarMorphism,
        pi_b: StarMorphism,
        dom: QuantumMetricSpace,
        cod: QuantumMetricSpace,
        label: str = "",
        kind: str = "custom",
    ):
        if pi_a.source != carrier.algebra or pi_b.source != carrier.algebra:
            raise ValidationError("projections must start at the carrier algebra")
        if pi_a.target != dom.algebra or pi_b.target != cod.algebra:
            raise ValidationError("projections must land in the endpoint algebras")
        self.carrier = carrier
        self.pi_a = pi_a
        self.pi_b = pi_b
        self.dom = dom
        self.cod = cod
        self.label = label or f"{dom.label}->{cod.label}"
        self.kind = kind
        self.meta: dict = {}
        self._cache: dict = {}

    def __repr__(self):
        return f"Tunnel({self.label!r}, kind={self.kind})"

    def reversed(self) -> "Tunnel":
        rev = Tunnel(self.carrier, self.pi_b, self.pi_a, self.cod, self.dom, f"rev({self.label})", self.kind)
        rev.meta = dict(self.meta)
        for key, m in self._cache.items():
            if key[0] == "measure":
                rev._cache[key] = m
        return rev

    def endpoint(self, side: str):
        if side == "a":
            return self.pi_a, self.dom
        if side == "b":
            return self.pi_b, self.cod
        raise ValidationError("side must be 'a' or 'b'")

    def validate(self, n_probes: int = 500, n_lifts: int = 64, seed: int = 42) -> TunnelReport:
        return validate_tunnel(self, n_probes, n_lifts, seed)

    def measure(self, eps_net: float, iters: int = DEFAULT_ITERS, seed: int = 42) -> TunnelMeasure:
        key = ("measure", round(eps_net, 15), iters)
        if key not in self._cache:
            reach = compute_reach(self, eps_net, iters, seed)
            depth = compute_depth(self, eps_net, iters, seed)
            self._cache[key] = TunnelMeasure(reach, depth, Interval.join_max(reach, depth), eps_net)
        return self._cache[key]


def _is_bijective(pi: StarMorphism) -> bool:
    return pi.source.dim == pi.target.dim and pi.report().injective


def validate_tunnel(tau: Tunnel, n_probes: int = 500, n_lifts: int = 64, seed: int = 42) -> TunnelReport:
    """Admissibility: epimorphisms, contraction on probes, quotient condition via lifts."""
    require_lipschitz_pair(tau.carrier)
    epi = True
    for pi in (tau.pi_a, tau.pi_b):
        rep = validate_morphism(pi)
        epi = epi and rep.epimorphism
    rng = np.random.default_rng(seed)
    D = tau.carrier
    excess = 0.0
    for _ in range(n_probes):
        d = D.algebra.random_self_adjoint(rng)
        Ld = eval_seminorm(D, d)
        for pi, space in ((tau.pi_a, tau.dom), (tau.pi_b, tau.cod)):
            excess = max(excess, eval_seminorm(space, pi(d)) - Ld * (1 + 1e-12))
    lift_excess, status = 0.0, "exact"
    for side in ("a", "b"):
        pi, space = tau.endpoint(side)
        alg = space.algebra
        probes = [alg.random_self_adjoint(rng) for _ in range(n_lifts // 2)]
        probes += [alg.basis_element(k) for k in range(min(alg.dim, 16))]
        for a in probes:
            La = eval_seminorm(space, a)
            if La <= 1e-12:
                continue
            lift = lift_element(tau, a / La, side)
            lift_excess = max(lift_excess, lift.value - 1.0)
            status = worst_status(status, lift.status)
    return TunnelReport(epi, max(excess, 0.0), max(lift_excess, 0.0), n_probes, status)


# ------------------------------------------------------------------- lifts


def _affine_fiber(tau: Tunnel, side: str, a: Element):
    pi, _ = tau.endpoint(side)
    key = ("fiber", side)
    if key not in tau._cache:
        tau._cache[key] = linalg.nullspace(pi.matrix)
    K = tau._cache[key]
    target = pi.target.sa_coords(a)
    d0, resid = linalg.solve_consistent(pi.matrix, target)
    if resid > 1e-8 * max(1.0, float(np.max(np.abs(target)))):
        raise ValidationError("projection is not onto: no preimage")
    return d0, K


def _carrier_rows(D: QuantumMetricSpace) -> np.ndarray:
    if "rows" not in D._cache:
        from .mk_engine import _graph_prune

        rows = D.scalar_matrix
        rows = rows[np.max(np.abs(rows), axis=1) > 0]
        D._cache["rows"] = _graph_prune(np.unique(np.round(rows, 15), axis=0))
    return D._cache["rows"]


def lift_element(tau: Tunnel, a: Element, side: str = "a", iters: int = 2000) -> Lift:
    """A preimage ``d`` of ``a`` with (near) minimal ``L_D(d)``.

    Polyhedral carriers: ``min s`` s.t. ``|R d| <= s`` on the fiber, by simplex.
    Otherwise: subgradient descent on the fiber, best iterate kept.
    """
    D = tau.carrier
    d0, K = _affine_fiber(tau, side, a)
    if K.shape[1] == 0:
        return Lift(D.algebra.from_coords(d0), D.eval_coords(d0), "exact")
    if D.polyhedral:
        R = _carrier_rows(D)
        RK, Rd = R @ K, R @ d0
        s0 = float(np.max(np.abs(Rd)))
        m, k = RK.shape
        A = np.zeros((2 * m, k + 1))
        A[:m, :k], A[m:, :k] = RK, -RK
        A[:, k] = -1.0
        b = np.concatenate([s0 - Rd, s0 + Rd])
        c = np.zeros(k + 1)
        c[k] = -1.0
        res = simplex.maximize(c, A, np.clip(b, 0.0, None))
        d = d0 + K @ res.x[:k]
        return Lift(D.algebra.from_coords(d), D.eval_coords(d), "exact")
    z = np.zeros(K.shape[1])
    best_val, best_z = D.eval_coords(d0), z.copy()
    scale = max(1e-3, float(np.linalg.norm(d0)))
    for t in range(1, iters + 1):
        val, g = D.supergradient(d0 + K @ z)
        if val < best_val:
            best_val, best_z = val, z.copy()
        gk = K.T @ g
        n = np.linalg.norm(gk)
        if n == 0.0:
            break
        z = z - (scale / (t ** 0.5)) * gk / n * 0.1
    d = d0 + K @ best_z
    return Lift(D.algebra.from_coords(d), D.eval_coords(d), "certified_lower_bound")


def sample_lifts(tau: Tunnel, a: Element, r: float, count: int, side: str = "a", seed: int = 42) -> list[Element]:
    """Feasible lifts ``d`` with ``pi(d) = a`` and ``L_D(d) <= r`` spread over the fiber."""
    D = tau.carrier
    base = lift_element(tau, a, side)
    if base.value > r * (1 + 1e-12) + 1e-12:
        raise ValidationError(f"radius {r} below the minimal lift value {base.value}")
    d0, K = _affine_fiber(tau, side, a)
    dstar = D.algebra.sa_coords(base.element)
    out = [base.element]
    if K.shape[1] == 0:
        return out
    rng = np.random.default_rng(seed)
    other_pi = tau.pi_b if side == "a" else tau.pi_a
    if D.polyhedral:
        R = _carrier_rows(D)
        RK = R @ K
        slack = np.clip(r - R @ dstar, 0.0, None)
        slack2 = np.clip(r + R @ dstar, 0.0, None)
        A = np.vstack([RK, -RK])
        b = np.concatenate([slack, slack2])
        P = other_pi.matrix @ K
        for i in range(count - 1):
            w = rng.standard_normal(P.shape[0])
            if i % 2 == 0 and P.shape[0]:
                w = np.zeros(P.shape[0])
                w[rng.integers(P.shape[0])] = rng.choice([-1.0, 1.0])
            try:
                res = simplex.maximize(P.T @ w, A, b)
            except Exception:
                continue
            out.append(D.algebra.from_coords(dstar + K @ res.x))
        return out
    # hit-and-run inside {z : L_D(d* + K z) <= r}
    z = np.zeros(K.shape[1])
    for _ in range(count - 1):
        u = rng.standard_normal(K.shape[1])
        u /= np.linalg.norm(u)
        lo = -_ray_limit(D, dstar + K @ z, -(K @ u), r)
        hi = _ray_limit(D, dstar + K @ z, K @ u, r)
        z = z + rng.uniform(lo, hi) * u
        out.append(D.algebra.from_coords(dstar + K @ z))
    return out


def _ray_limit(D: QuantumMetricSpace, x: np.ndarray, v: np.ndarray, r: float) -> float:
    lo, hi = 0.0, 1.0
    while D.eval_coords(x + hi * v) <= r and hi < 1e6:
        lo, hi = hi, 2 * hi
    for _ in range(50):
        mid = 0.5 * (lo + hi)
        if D.eval_coords(x + mid * v) <= r:
            lo = mid
        else:
            hi = mid
    return lo


# ---------------------------------------------------------- reach and depth


def _side_set(tau: Tunnel, side: str, eps: float, seed: int):
    pi, space = tau.endpoint(side)
    if _is_bijective(pi):
        return FULL
    return build_state_net(space, eps, kind="pure", seed=seed).pushforward(pi)


def compute_reach(tau: Tunnel, eps_net: float, iters: int = DEFAULT_ITERS, seed: int = 42) -> Interval:
    """Hausdorff distance in ``mk_{L_D}`` between ``pi_a^*(S(A))`` and ``pi_b^*(S(B))``."""
    require_lipschitz_pair(tau.carrier)
    sa = _side_set(tau, "a", eps_net, seed)
    sb = _side_set(tau, "b", eps_net, seed)
    return convex_hausdorff(tau.carrier, sa, sb, eps_net, iters, seed)


def compute_depth(tau: Tunnel, eps_net: float, iters: int = DEFAULT_ITERS, seed: int = 42) -> Interval:
    """Hausdorff distance between ``S(D)`` and the closed convex hull of both pulled-back state spaces."""
    require_lipschitz_pair(tau.carrier)
    sa = _side_set(tau, "a", eps_net, seed)
    sb = _side_set(tau, "b", eps_net, seed)
    if sa is FULL or sb is FULL:
        return Interval(0.0, 0.0, "exact")
    hull = np.vstack([sa.functionals, sb.functionals])
    pure_d = build_state_net(tau.carrier, eps_net, kind="pure", seed=seed)
    H, status = 0.0, worst_status(sa.provenance, sb.provenance, pure_d.provenance)
    for f in pure_d.functionals:
        r = hull_distance(tau.carrier, f, hull, iters, seed)
        H = max(H, r.value)
        status = worst_status(status, r.status)
    lo = max(0.0, H - max(sa.resolution, sb.resolution))
    hi = H + pure_d.resolution
    if hi > lo and status == "exact":
        status = "certified"
    return Interval(lo, hi, status)


def compute_length(tau: Tunnel, eps_net: float, iters: int = DEFAULT_ITERS, seed: int = 42) -> Interval:
    return tau.measure(eps_net, iters, seed).length


# ------------------------------------------------------------- constructions


def identity_tunnel(space: QuantumMetricSpace, iso: StarMorphism | None = None, target: QuantumMetricSpace | None = None, n_probes: int = 200, seed: int = 42) -> Tunnel:
    """``(A, L_A, id, h)`` for a Lip-norm preserving *-isomorphism ``h: A -> B``."""
    if iso is None:
        iso = identity_morphism(space.algebra)
        target = space
    if target is None:
        raise ValidationError("identity tunnel with an isomorphism needs the target space")
    rep = validate_morphism(iso)
    if not (rep.is_homomorphism() and rep.injective and rep.surjective):
        raise ValidationError("identity tunnels need a *-isomorphism")
    rng = np.random.default_rng(seed)
    for _ in range(n_probes):
        a = space.algebra.random_self_adjoint(rng)
        la, lb = eval_seminorm(space, a), eval_seminorm(target, iso(a))
        if abs(la - lb) > 1e-9 * max(1.0, la):
            raise ValidationError(f"isomorphism is not isometric for the Lip-norms ({la} vs {lb})")
    return Tunnel(space, identity_morphism(space.algebra), iso, space, target, f"id({space.label})", "identity")


def direct_sum_carrier(a: QuantumMetricSpace, b: QuantumMetricSpace, rho_a: StarMorphism, rho_b: StarMorphism, scale: float, label: str = "") -> tuple[QuantumMetricSpace, StarMorphism, StarMorphism]:
    total, (pa, pb) = direct_sum(a.algebra, b.algebra)
    atoms = [component_pullback(t, pa, f"A:{t.label}") for t in a.atoms]
    atoms += [component_pullback(t, pb, f"B:{t.label}") for t in b.atoms]
    atoms.append(morphism_difference_atom(rho_a, rho_b, pa, pb, scale))
    return QuantumMetricSpace(total, atoms, label or f"{a.label}(+){b.label}"), pa, pb


def direct_sum_tunnel(a: QuantumMetricSpace, b: QuantumMetricSpace, scale: float | None = None, embeddings=None) -> Tunnel:
    """``L(a, b) = max(L_A(a), L_B(b), ||rho_a(a) - rho_b(b)|| / scale)``.

    Default embeddings are ``a -> a (x) 1`` and ``b -> 1 (x) b``; the default
    scale is the larger diameter upper end, which makes this a tunnel of
    length at most ``scale``; two one-point spaces fall back to scale 1.
    """
    if scale is None:
        scale = max(diameter_estimate(a).hi, diameter_estimate(b).hi) or 1.0
    if embeddings is None:
        _, rho_a, rho_b = tensor_embeddings(a.algebra, b.algebra)
    else:
        rho_a, rho_b = embeddings
    for rho in (rho_a, rho_b):
        rep = require_morphism(rho)
        if not rep.injective:
            raise ValidationError("direct-sum tunnels need faithful embeddings")
    D, pa, pb = direct_sum_carrier(a, b, rho_a, rho_b, scale)
    t = Tunnel(D, pa, pb, a, b, f"ds({a.label},{b.label})", "direct_sum")
    t.meta["scale"] = scale
    return t


def build_doubling_lipnorm(space: QuantumMetricSpace, gamma: float):
    """``L_gamma(d1, d2) = max(L(d1), L(d2), ||d1 - d2|| / gamma)`` on ``D (+) D``."""
    if not gamma > 0:
        raise ValidationError("gamma must be positive")
    total, (p1, p2) = direct_sum(space.algebra, space.algebra)
    atoms = [component_pullback(t, p1, f"1:{t.label}") for t in space.atoms]
    atoms += [component_pullback(t, p2, f"2:{t.label}") for t in space.atoms]
    atoms.append(doubling_difference_atom(p1, p2, gamma))
    return QuantumMetricSpace(total, atoms, f"double({space.label},{gamma:g})"), p1, p2


def doubling_tunnel(space: QuantumMetricSpace, gamma: float) -> Tunnel:
    D, p1, p2 = build_doubling_lipnorm(space, gamma)
    return Tunnel(D, p1, p2, space, space, f"dbl({space.label})", "doubling")


# ---------------------------------------------------------- target sets


@dataclass
class TargetSetReport:
    radius: float
    lifts: int
    max_norm_excess: float
    max_lift_norm_excess: float
    max_lip_excess: float
    diameter: float
    diameter_bound: float
    reach_hi: float
    length_hi: float

    @property
    def passed(self) -> bool:
        return (
            self.max_norm_excess <= 1e-6
            and self.max_lift_norm_excess <= 1e-6
            and self.max_lip_excess <= 1e-6
            and self.diameter <= self.diameter_bound + 1e-6
        )


def target_set_check(tau: Tunnel, a: Element, r: float, eps_net: float, count: int = 16, seed: int = 42) -> TargetSetReport:
    """Sample ``t_tau(a | r)`` and test the norm, Lip and diameter estimates."""
    m = tau.measure(eps_net, seed=seed)
    reach_hi, length_hi = m.reach.hi, m.length.hi
    lifts = sample_lifts(tau, a, r, count, "a", seed)
    na = operator_norm(a)
    norm_ex = lift_ex = lip_ex = 0.0
    images = []
    for d in lifts:
        b = tau.pi_b(d)
        images.append(b)
        norm_ex = max(norm_ex, operator_norm(b) - (na + r * reach_hi))
        lift_ex = max(lift_ex, operator_norm(d) - (na + 2 * r * length_hi))
        lip_ex = max(lip_ex, eval_seminorm(tau.cod, b) - r)
    diam = 0.0
    for i in range(len(images)):
        for j in range(i + 1, len(images)):
            diam = max(diam, operator_norm(images[i] - images[j]))
    return TargetSetReport(r, len(lifts), norm_ex, lift_ex, lip_ex, diam, 2 * r * reach_hi, reach_hi, length_hi)


@dataclass
class ProductTargetReport:
    trials: int
    max_jordan_excess: float
    max_lie_excess: float

    @property
    def passed(self) -> bool:
        return self.max_jordan_excess <= 1e-6 and self.max_lie_excess <= 1e-6


def product_target_check(tau: Tunnel, pairs, r: float, eps_net: float, seed: int = 42) -> ProductTargetReport:
    """Jordan and Lie products of lifts stay inside ``t(a o a' | r(||a|| + ||a'|| + 4 r lambda))``."""
    lam = tau.measure(eps_net, seed=seed).length.hi
    je = le = 0.0
    for a, a2 in pairs:
        d = lift_element(tau, a, "a").element
        d2 = lift_element(tau, a2, "a").element
        rr = max(r, eval_seminorm(tau.carrier, d), eval_seminorm(tau.carrier, d2))
        bound = rr * (operator_norm(a) + operator_norm(a2) + 4 * rr * lam)
        for prod, slot in ((jordan_product, 0), (lambda x, y: lie_product(x, y).real_part(), 1)):
            dd = prod(d, d2)
            img_ok = operator_norm(tau.pi_a(dd) - prod(a, a2))
            ex = max(eval_seminorm(tau.carrier, dd) - bound, eval_seminorm(tau.cod, tau.pi_b(dd)) - bound, img_ok - 1e-9)
            if slot == 0:
                je = max(je, ex)
            else:
                le = max(le, ex)
    return ProductTargetReport(len(pairs), max(je, 0.0), max(le, 0.0))
