import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from propinquity.errors import ValidationError
from propinquity.journeys import (
    MAX_CHAIN,
    Journey,
    PropinquityRegistry,
    build_chain_space,
    circle_convergence,
    compose,
    identity_journey,
    itinerary,
    load_bounds,
    reduce_journey,
    reverse_journey,
)
from propinquity.mk_engine import Interval, diameter_estimate
from propinquity.quantum_metric import eval_seminorm
from propinquity.tunnels import direct_sum_tunnel, identity_tunnel
from propinquity.zoo import FiniteMetricSpace, correspondence_to_tunnel, finite_metric_space

from .oracles import random_connected_metric

EPS = 0.1
TWO = FiniteMetricSpace([[0, 2], [2, 0]])
ONE = FiniteMetricSpace([[0]])


def _spaces(n, seed=0):
    rng = np.random.default_rng(seed)
    return [finite_metric_space(random_connected_metric(2 + i % 2, rng), chr(ord("A") + i)) for i in range(n)]


@pytest.fixture(scope="module")
def spaces():
    return _spaces(6)


@pytest.fixture(scope="module")
def legs(spaces):
    # unmeasured tunnels between every ordered pair, for journeys with planted lengths
    return {(a.label, b.label): direct_sum_tunnel(a, b, scale=3.0) for a in spaces for b in spaces if a is not b}


def _journey(legs, path, rng):
    ts = [legs[(x, y)] for x, y in zip(path, path[1:])]
    lens = []
    for _ in ts:
        lo = float(rng.uniform(0, 1))
        lens.append(Interval(lo, lo + float(rng.uniform(0, 0.2)), "certified"))
    return Journey.from_measured(ts, lens, EPS)


def test_empty_and_broken_journeys(legs):
    with pytest.raises(ValidationError):
        Journey((), (), Interval(0, 0))
    with pytest.raises(ValidationError):
        Journey.from_measured([legs[("A", "B")], legs[("C", "D")]], [Interval(0, 1)] * 2)


@given(st.integers(0, 10_000))
def test_composition_is_additive_and_associative(legs, seed):
    rng = np.random.default_rng(seed)
    j1, j2, j3 = _journey(legs, "AB", rng), _journey(legs, "BCD", rng), _journey(legs, "DE", rng)
    j12 = compose(j1, j2)
    assert j12.length.lo == j1.length.lo + j2.length.lo
    assert j12.length.hi == j1.length.hi + j2.length.hi
    left, right = compose(j12, j3), compose(j1, compose(j2, j3))
    assert left.legs == right.legs and left.leg_lengths == right.leg_lengths
    assert left.length.lo == pytest.approx(right.length.lo, abs=1e-12)
    assert left.length.hi == pytest.approx(right.length.hi, abs=1e-12)
    with pytest.raises(ValidationError):
        compose(j1, j3)


@given(st.integers(0, 10_000))
def test_reversal(legs, seed):
    j = _journey(legs, "ABCE", np.random.default_rng(seed))
    r = reverse_journey(j)
    assert r.endpoints == ("E", "A") and r.length == j.length
    rr = reverse_journey(r)
    assert rr.path() == j.path() and rr.length == j.length and rr.leg_lengths == j.leg_lengths


def test_identity_journey_composition(spaces, legs):
    idj = identity_journey(spaces[1], EPS)
    assert idj.length.contains(0.0) and idj.length.hi <= 2 * EPS
    j = _journey(legs, "AB", np.random.default_rng(0))
    c = compose(j, idj)
    assert c.length.hi - j.length.hi <= 2 * EPS and c.length.lo >= j.length.lo


def test_reduce_examples(legs):
    rng = np.random.default_rng(0)
    j = _journey(legs, "ABAC", rng)
    red = reduce_journey(j)
    assert red.path() == ["A", "C"] and red.legs == (j.legs[2],)
    plain = _journey(legs, "ABCD", rng)
    assert reduce_journey(plain) is plain
    loop = reduce_journey(_journey(legs, "ABA", rng))
    assert loop.path() == ["A", "A"] and loop.kinds() == ("identity",)


def _plant_path(rng, letters="ABCDEF", size=5):
    path = [str(rng.choice(list(letters)))]
    while len(path) < size + 1:
        nxt = str(rng.choice([c for c in letters if c != path[-1]]))
        path.append(nxt)
    return "".join(path)


@settings(max_examples=100)
@given(st.integers(0, 100_000))
def test_reduction_never_increases_length(legs, seed):
    rng = np.random.default_rng(seed)
    j = _journey(legs, _plant_path(rng), rng)
    red = reduce_journey(j)
    path = red.path()
    assert len(set(path[:-1])) == len(path) - 1 or path == [path[0], path[0]]
    if red.kinds() != ("identity",):
        assert red.length.hi <= j.length.hi + 1e-12
    assert red.endpoints == j.endpoints


# ---------------------------------------------------------------- registry


@pytest.fixture(scope="module")
def registry():
    reg = PropinquityRegistry(eps_net=EPS)
    X = finite_metric_space(TWO, "X")
    P = finite_metric_space(ONE, "P")
    L = finite_metric_space(FiniteMetricSpace([[0, 1, 2], [1, 0, 1], [2, 1, 0]]), "L")
    reg.add_tunnel(correspondence_to_tunnel(TWO, ONE, [(0, 0), (1, 0)], space_x=X, space_y=P))
    reg.add_tunnel(direct_sum_tunnel(P, L))
    return reg


def test_registry_symmetry_and_triangle(registry):
    ids = sorted(registry.spaces)
    for a in ids:
        for b in ids:
            ab, ba = registry.bound(a, b), registry.bound(b, a)
            assert ab.value == ba.value
            for c in ids:
                assert registry.bound(a, c).value.hi <= ab.value.hi + registry.bound(b, c).value.hi + 1e-12


def test_registry_examples(registry):
    xp = registry.bound("X", "P")
    assert xp.value.hi <= 1.0 + 2 * EPS and xp.value.contains(1.0)
    xl = registry.bound("X", "L")
    assert xl.witness.path() == ["X", "P", "L"]
    assert xl.value.hi == registry.bound("X", "P").value.hi + registry.bound("P", "L").value.hi
    same = registry.bound("X", "X")
    assert same.value.contains(0.0) and same.value.hi <= 2 * EPS
    with pytest.raises(KeyError):
        registry.bound("X", "nowhere")


def test_registry_class_filter_and_auto_direct_sum():
    reg = PropinquityRegistry(eps_net=EPS)
    X, P = finite_metric_space(TWO, "X"), finite_metric_space(ONE, "P")
    reg.add_tunnel(correspondence_to_tunnel(TWO, ONE, [(0, 0), (1, 0)], space_x=X, space_y=P))
    pb = reg.bound("X", "P", "direct_sum_only")
    assert pb.witness.kinds() == ("direct_sum",)
    # regularity: a direct-sum journey is bounded by the larger diameter
    assert pb.value.hi <= max(diameter_estimate(X).hi, diameter_estimate(P).hi) + 2 * EPS
    assert reg.bound("X", "P", "correspondence").witness.kinds() == ("correspondence",)
    closed = PropinquityRegistry(eps_net=EPS, auto_direct_sum=False)
    closed.add_space(X)
    closed.add_space(P)
    with pytest.raises(LookupError):
        closed.bound("X", "P")


def test_registry_rejects_label_clash():
    reg = PropinquityRegistry()
    reg.add_space(finite_metric_space(TWO, "X"))
    with pytest.raises(ValidationError):
        reg.add_space(finite_metric_space(ONE, "X"))
    blank = finite_metric_space(ONE)
    blank.label = ""
    with pytest.raises(ValidationError):
        reg.add_space(blank)


def test_export_round_trip(registry):
    text = registry.export_json()
    rows = load_bounds(text)
    assert {(r["a"], r["b"]) for r in rows} == {("L", "P"), ("L", "X"), ("P", "X")}
    for r in rows:
        assert r["value"].hi == registry.bound(r["a"], r["b"]).value.hi
    doc = json.loads(text)
    doc["bounds"][0]["hi"] += 1.0
    with pytest.raises(ValidationError):
        load_bounds(json.dumps(doc))
    with pytest.raises(ValidationError):
        load_bounds(json.dumps({"format_version": 2, "bounds": []}))


def test_itinerary_accumulated_estimate(registry):
    j = registry.bound("X", "L").witness
    rng = np.random.default_rng(4)
    for _ in range(5):
        a = j.dom.algebra.random_self_adjoint(rng)
        it = itinerary(j, a)
        assert it.passed and len(it.points) == j.size + 1
        for lift, t in zip(it.lifts, j.legs):
            assert lift.value <= it.radius + 1e-9
            assert eval_seminorm(t.cod, t.pi_b(lift.element)) <= it.radius + 1e-9


# ------------------------------------------------------------- chain spaces


def test_chain_space_n0():
    X = finite_metric_space(TWO, "X")
    t = direct_sum_tunnel(X, finite_metric_space(ONE, "P"))
    ch = build_chain_space([t], 0, EPS)
    assert ch.space is t.carrier
    assert ch.diameter == diameter_estimate(t.carrier)


def test_identity_chain_is_diagonal():
    X = finite_metric_space(TWO, "X")
    t = identity_tunnel(X)
    ch = build_chain_space([t, t], 1, EPS)
    assert ch.space.algebra.dim == X.algebra.dim
    rng = np.random.default_rng(0)
    for _ in range(5):
        x = ch.space.algebra.sa_coords(ch.space.algebra.random_self_adjoint(rng))
        assert np.allclose(ch.coordinate(0, x), ch.coordinate(1, x))
    assert ch.diameter.contains(diameter_estimate(X).hi)
    assert ch.bound_holds


def test_mixed_chain_bound():
    X = finite_metric_space(TWO, "X")
    Y = finite_metric_space(FiniteMetricSpace([[0, 1], [1, 0]]), "Y")
    Z = finite_metric_space(FiniteMetricSpace([[0, 3], [3, 0]]), "Z")
    t0, t1 = direct_sum_tunnel(X, Y), direct_sum_tunnel(Y, Z)
    ch = build_chain_space([t0, t1], 1, EPS)
    assert ch.kernel.passed and ch.constraint_residual <= 1e-9
    assert ch.bound_holds
    assert ch.diameter_bound == pytest.approx(diameter_estimate(t0.carrier).hi + 4 * ch.lengths[0].hi)
    # the max construction dominates each coordinate seminorm
    rng = np.random.default_rng(1)
    H = ch.space
    for _ in range(20):
        x = H.algebra.sa_coords(H.algebra.random_self_adjoint(rng))
        for j, t in enumerate((t0, t1)):
            assert H.eval_coords(x) >= t.carrier.eval_coords(ch.coordinate(j, x)) - 1e-12


def test_chain_space_validation():
    X = finite_metric_space(TWO, "X")
    t = identity_tunnel(X)
    with pytest.raises(ValidationError):
        build_chain_space([t], 1, EPS)
    with pytest.raises(ValidationError):
        build_chain_space([t] * (MAX_CHAIN + 2), MAX_CHAIN + 1, EPS)
    other = direct_sum_tunnel(finite_metric_space(ONE, "P"), X)
    with pytest.raises(ValidationError):
        build_chain_space([t, other], 1, EPS)


# ------------------------------------------------------- circle convergence


def test_circle_convergence_small():
    rows, reg = circle_convergence([2, 4, 8], 16)
    for row in rows:
        assert row.bound.hi < math.pi / row.k
    assert [r.journey_size for r in rows] == [3, 2, 1]
    with pytest.raises(ValidationError):
        circle_convergence([3], 16)
