"""The twelve acceptance criteria at their stated tolerances.

Each test prints one ``PASS``/``FAIL`` line; the same lines are repeated in
the pytest terminal summary.
"""

import itertools
import math
import time

import numpy as np
import pytest

from propinquity.cstar_core import operator_norm, probability_state, pullback_state
from propinquity.journeys import PropinquityRegistry, Journey, build_chain_space, circle_convergence, compose, reverse_journey
from propinquity.mk_engine import Interval, diameter_estimate, mk_distance
from propinquity.quantum_metric import check_leibniz, eval_seminorm
from propinquity.tunnels import build_doubling_lipnorm, direct_sum_tunnel, identity_tunnel, lift_element, sample_lifts, target_set_check
from propinquity.zoo import (
    FiniteMetricSpace,
    FuzzyTorusSpec,
    circle_subgroup_space,
    clock_shift_action,
    correspondence_to_tunnel,
    finite_metric_space,
    fuzzy_torus_space,
    gh_distance_exact,
    group_action_space,
    random_metric_space,
)

from .conftest import ACCEPTANCE_LINES
from .oracles import gh_by_maps, gh_by_relations, random_connected_metric


def report(num, name, passed, detail):
    line = f"[{'PASS' if passed else 'FAIL'}] AC{num:02d} {name}: {detail}"
    ACCEPTANCE_LINES[num] = line
    print(line)
    assert passed, line


def _classical_pairs(count, seed):
    rng = np.random.default_rng(seed)
    out = []
    for i in range(count):
        # at least one side has two points, so eps_net = 0.05 * diameter is positive
        a = finite_metric_space(random_connected_metric(int(rng.integers(2, 4)), rng), f"A{i}")
        b = finite_metric_space(random_connected_metric(int(rng.integers(1, 4)), rng), f"B{i}")
        out.append((a, b))
    return out


def _pair_eps(a, b):
    return 0.05 * max(diameter_estimate(a).hi, diameter_estimate(b).hi, 1e-12)


def test_ac01_dirac_recovery():
    t0 = time.perf_counter()
    rng = np.random.default_rng(2024)
    worst = 0.0
    for _ in range(50):
        n = int(rng.integers(2, 7))
        m = random_connected_metric(n, rng)
        S = finite_metric_space(m)
        for x, y in itertools.combinations(range(n), 2):
            r = mk_distance(S, probability_state(S.algebra, np.eye(n)[x]), probability_state(S.algebra, np.eye(n)[y]))
            worst = max(worst, abs(r.value - m[x, y]))
    dt = time.perf_counter() - t0
    report(1, "Dirac recovery", worst <= 1e-9 and dt < 10, f"max error {worst:.2e}, {dt:.2f}s")


def test_ac02_leibniz_suite():
    t0 = time.perf_counter()
    rng = np.random.default_rng(7)
    spaces = [finite_metric_space(random_connected_metric(n, rng)) for n in (2, 3, 4, 5, 6)]
    spaces += [circle_subgroup_space(k) for k in (3, 6)]
    specs = [
        FuzzyTorusSpec((2,)),
        FuzzyTorusSpec((3,)),
        FuzzyTorusSpec((2, 2)),
        FuzzyTorusSpec((2, 2), [[0, 0.5], [-0.5, 0]]),
        FuzzyTorusSpec((3, 3), [[0, 1 / 3], [-1 / 3, 0]]),
    ]
    spaces += [fuzzy_torus_space(s) for s in specs]
    spaces += [group_action_space(clock_shift_action(n)) for n in (2, 3)]
    worst = max(check_leibniz(S, 1000, seed=11).max_violation for S in spaces)
    dt = time.perf_counter() - t0
    report(2, "Leibniz suite", worst <= 1e-9 and dt < 60, f"{len(spaces)} spaces, max violation {worst:.2e}, {dt:.2f}s")


def test_ac03_identity_tunnel():
    ok, worst = True, 0.0
    rng = np.random.default_rng(3)
    spaces = [finite_metric_space(random_connected_metric(4, rng), "C4"), fuzzy_torus_space(FuzzyTorusSpec((2, 2), [[0, 0.5], [-0.5, 0]]), "F")]
    for S in spaces:
        eps = 0.02 * diameter_estimate(S).hi
        t = identity_tunnel(S)
        m = t.measure(eps)
        worst = max(worst, m.length.hi / eps)
        r = t.reversed()
        ok &= m.length.hi <= 2 * eps and m.length.contains(0.0)
        ok &= r.measure(eps) == m and r.reversed().measure(eps) == m
        j = Journey.from_legs([t], eps)
        ok &= reverse_journey(reverse_journey(j)).length == j.length == reverse_journey(j).length
    report(3, "identity tunnel", ok, f"max length.hi / eps_net = {worst:.3f} (limit 2)")


def test_ac04_direct_sum_depth():
    ok, worst = True, 0.0
    for a, b in _classical_pairs(20, 4):
        eps = _pair_eps(a, b)
        d = direct_sum_tunnel(a, b).measure(eps).depth
        ok &= d.contains(0.0) and d.hi <= 2 * eps
        worst = max(worst, d.hi / eps)
    report(4, "direct-sum depth", ok, f"20 pairs, max depth.hi / eps_net = {worst:.3f}")


def test_ac05_regularity_bound():
    ok, worst = True, -math.inf
    for a, b in _classical_pairs(20, 4):
        eps = _pair_eps(a, b)
        L = direct_sum_tunnel(a, b).measure(eps).length
        cap = max(diameter_estimate(a).hi, diameter_estimate(b).hi) + 4 * eps
        ok &= L.hi <= cap
        worst = max(worst, L.hi - cap)
    report(5, "regularity bound", ok, f"20 pairs, max (length.hi - cap) = {worst:.3e}")


def _sweep_tunnels():
    out = []
    for a, b in _classical_pairs(10, 6):
        out.append(direct_sum_tunnel(a, b))
    X, Y = FiniteMetricSpace([[0, 1, 2], [1, 0, 1], [2, 1, 0]]), FiniteMetricSpace([[0, 3], [3, 0]])
    g = gh_distance_exact(X, Y)
    out.append(correspondence_to_tunnel(X, Y, g.correspondence))
    out.append(identity_tunnel(finite_metric_space(X, "X")))
    return out


@pytest.fixture(scope="module")
def lift_sweep():
    """500 lifts: per tunnel, random elements and radii, lifts spread over each fiber."""
    rng = np.random.default_rng(5)
    tunnels = _sweep_tunnels()
    per_tunnel = 500 // len(tunnels) + 1
    rows = []
    for t in tunnels:
        eps = _pair_eps(t.dom, t.cod)
        m = t.measure(eps)
        while sum(1 for r in rows if r[0] is t) < per_tunnel:
            a = t.dom.algebra.random_self_adjoint(rng)
            r = max(eval_seminorm(t.dom, a), lift_element(t, a).value) * float(rng.uniform(1.0, 1.5))
            lifts = sample_lifts(t, a, r, 6, seed=int(rng.integers(1 << 30)))
            rows.append((t, a, r, lifts, m))
    return rows


def test_ac06_fundamental_and_lift_estimates(lift_sweep):
    count, worst_b, worst_d, worst_l = 0, -math.inf, -math.inf, -math.inf
    for t, a, r, lifts, m in lift_sweep:
        na = operator_norm(a)
        for d in lifts:
            count += 1
            b = t.pi_b(d)
            worst_b = max(worst_b, operator_norm(b) - (na + r * m.reach.hi))
            worst_d = max(worst_d, operator_norm(d) - (na + 2 * r * m.length.hi))
            worst_l = max(worst_l, eval_seminorm(t.cod, b) - r)
    ok = count >= 500 and worst_b <= 1e-6 and worst_d <= 1e-6 and worst_l <= 1e-9
    report(6, "fundamental and lift estimates", ok, f"{count} lifts, max excess |b| {worst_b:.2e}, |d| {worst_d:.2e}, L_B {worst_l:.2e}")


def test_ac07_target_diameter(lift_sweep):
    worst, n = -math.inf, 0
    for t, a, r, lifts, m in lift_sweep:
        imgs = [t.pi_b(d) for d in lifts]
        diam = max((operator_norm(x - y) for x, y in itertools.combinations(imgs, 2)), default=0.0)
        worst = max(worst, diam - 2 * r * m.reach.hi)
        n += 1
    t = _sweep_tunnels()[0]
    rep = target_set_check(t, t.dom.algebra.unit(), 0.0 + 1e-12, _pair_eps(t.dom, t.cod), count=4)
    report(7, "target diameter", worst <= 1e-6 and rep.passed, f"{n} target sets, max (diam - 2 r reach.hi) = {worst:.2e}")


def test_ac08_journey_algebra():
    rng = np.random.default_rng(8)
    pairs = _classical_pairs(4, 8)
    spaces = [pairs[0][0], pairs[0][1], pairs[1][0], pairs[1][1], pairs[2][0]]
    legs = [direct_sum_tunnel(x, y) for x, y in zip(spaces, spaces[1:])]
    eps = 0.1
    js = [Journey.from_legs([t], eps) for t in legs]
    ok = True
    acc = js[0]
    for j in js[1:]:
        nxt = compose(acc, j)
        ok &= nxt.length.lo == acc.length.lo + j.length.lo and nxt.length.hi == acc.length.hi + j.length.hi
        acc = nxt
    ok &= reverse_journey(acc).length == acc.length
    back = reverse_journey(reverse_journey(acc))
    ok &= back.path() == acc.path() and back.leg_lengths == acc.leg_lengths
    ok &= all(u.carrier is t.carrier and u.pi_a is t.pi_a and u.pi_b is t.pi_b for u, t in zip(back.legs, acc.legs))
    reg = PropinquityRegistry(eps_net=eps)
    for t in legs:
        reg.add_tunnel(t)
    ids = sorted(reg.spaces)
    slack = -math.inf
    for a, b, c in itertools.product(ids, repeat=3):
        ab, ba = reg.bound(a, b).value, reg.bound(b, a).value
        ok &= ab == ba
        slack = max(slack, reg.bound(a, c).value.hi - ab.hi - reg.bound(b, c).value.hi)
    ok &= slack <= 1e-12
    report(8, "journey algebra", ok, f"{len(ids)} spaces, max triangle excess {slack:.2e}")


def test_ac09_doubling_construction():
    rng = np.random.default_rng(9)
    S = finite_metric_space(FiniteMetricSpace([[0, 2], [2, 0]]), "X2")
    worst_excess, worst_resid = -math.inf, 0.0
    for gamma in (0.25, 1.0, 3.0):
        D, p1, p2 = build_doubling_lipnorm(S, gamma)
        for _ in range(20):
            phi = probability_state(S.algebra, rng.dirichlet(np.ones(2)))
            r = mk_distance(D, pullback_state(phi, p1), pullback_state(phi, p2))
            worst_excess = max(worst_excess, r.value - gamma)
            worst_resid = max(worst_resid, r.residual / gamma)
    ok = worst_excess <= 1e-9 and worst_resid <= 0.05
    report(9, "doubling construction", ok, f"max (mk - gamma) {worst_excess:.2e}, max residual/gamma {worst_resid:.2e}")


def test_ac10_circle_convergence():
    t0 = time.perf_counter()
    ks = [2, 4, 8, 16, 32]
    eps = 0.05 * math.pi
    rows, _ = circle_convergence(ks, 64, eps)
    his = [r.bound.hi for r in rows]
    ok = all(b <= a + 2 * eps for a, b in zip(his, his[1:]))
    ok &= all(r.bound.hi <= math.pi / r.k + 4 * eps for r in rows)
    dt = time.perf_counter() - t0
    ok &= dt < 300
    report(10, "circle convergence", ok, "bounds " + ", ".join(f"k={r.k}:{r.bound.hi:.4f}" for r in rows) + f"; {dt:.1f}s")


def test_ac11_chain_diameter():
    rng = np.random.default_rng(11)
    ok, worst = True, -math.inf
    for c in range(10):
        size = int(rng.integers(1, 5))
        spaces = [finite_metric_space(random_connected_metric(int(rng.integers(1, 4)), rng), f"S{c}_{i}") for i in range(size + 1)]
        taus = []
        for x, y in zip(spaces, spaces[1:]):
            if rng.random() < 0.5:
                taus.append(direct_sum_tunnel(x, y))
            else:
                X, Y = x.meta["metric_space"], y.meta["metric_space"]
                taus.append(correspondence_to_tunnel(X, Y, gh_distance_exact(X, Y).correspondence, space_x=x, space_y=y))
        eps = max(_pair_eps(t.dom, t.cod) for t in taus)
        ch = build_chain_space(taus, size - 1, eps)
        ok &= ch.bound_holds
        worst = max(worst, ch.diameter.lo - ch.diameter_bound - 4 * eps)
    report(11, "chain diameter", ok, f"10 chains, max (diam.lo - bound - 4 eps_net) = {worst:.3e}")


def test_ac12_gh_oracle():
    one, two1, two3 = FiniteMetricSpace([[0]]), FiniteMetricSpace([[0, 1], [1, 0]]), FiniteMetricSpace([[0, 3], [3, 0]])
    ok = gh_distance_exact(two1, one).value == 0.5 and gh_distance_exact(two1, two3).value == 1.0
    ok &= gh_by_relations(two1.metric, one.metric) == 0.5 and gh_by_maps(two1.metric, two3.metric) == 1.0
    rng = np.random.default_rng(12)
    triples = 0
    for _ in range(30):
        X, Y, Z = (random_metric_space(int(rng.integers(1, 5)), rng, integer=True) for _ in range(3))
        g = {(p, q): gh_distance_exact(P, Q).value for (p, P), (q, Q) in itertools.product(enumerate((X, Y, Z)), repeat=2)}
        for p in range(3):
            ok &= g[p, p] == 0.0
            for q in range(3):
                ok &= g[p, q] == g[q, p]
                for r in range(3):
                    ok &= g[p, r] <= g[p, q] + g[q, r]
        triples += 1
    report(12, "GH oracle", bool(ok), f"worked pairs exact; axioms on {triples} triples")
