"""Command line front end.

Space configs are JSON documents::

    {"label": "X", "kind": "finite_metric", "metric": [[0, 1], [1, 0]]}
    {"label": "Z4", "kind": "circle_subgroup", "k": 4}
    {"label": "T", "kind": "fuzzy_torus", "k": [2, 2], "theta": [[0, 0.5], [-0.5, 0]]}
    {"label": "M3", "kind": "group_action", "n": 3}

``finite_metric`` accepts an optional ``"pairs"`` list restricting the pair
atoms. Results go out as CSV with a ``format_version`` first row; every
numeric cell has a status.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import time

import numpy as np

from . import __version__
from .cstar_core import dirac_state, identity_morphism, probability_state, tracial_state, vector_state
from .errors import PropinquityError, ResourceError
from .journeys import Journey, build_chain_space, circle_convergence, compose, reduce_journey
from .mk_engine import diameter_estimate, mk_distance
from .quantum_metric import check_leibniz, check_lipschitz_pair
from .tunnels import direct_sum_tunnel, doubling_tunnel, identity_tunnel
from .zoo import (
    FiniteMetricSpace,
    FuzzyTorusSpec,
    circle_metric,
    circle_subgroup_space,
    clock_shift_action,
    correspondence_to_tunnel,
    finite_metric_space,
    fuzzy_torus_space,
    gh_distance_exact,
    gh_distance_heuristic,
    group_action_space,
)

FORMAT_VERSION = 1
COLUMNS = ["command", "item", "value", "lo", "hi", "status", "passed"]
CONSTRUCTIONS = ("identity", "direct_sum", "correspondence", "doubling")


class ConfigError(Exception):
    """Unreadable or malformed input; maps to exit code 2."""


# ----------------------------------------------------------------- configs


def load_config(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as e:
        raise ConfigError(f"{path}: {e.strerror}") from e
    except json.JSONDecodeError as e:
        raise ConfigError(f"{path}:{e.lineno}:{e.colno}: {e.msg}") from e
    if not isinstance(doc, dict) or "kind" not in doc:
        raise ConfigError(f"{path}: expected an object with a 'kind' key")
    doc.setdefault("label", path.rsplit("/", 1)[-1].rsplit(".", 1)[0])
    doc["_path"] = path
    return doc


def metric_of(cfg: dict) -> FiniteMetricSpace | None:
    if cfg["kind"] == "finite_metric":
        return FiniteMetricSpace(np.array(cfg["metric"], dtype=float))
    if cfg["kind"] == "circle_subgroup":
        return FiniteMetricSpace(circle_metric(int(cfg["k"])))
    return None


def build_space(cfg: dict):
    kind, label = cfg["kind"], str(cfg["label"])
    try:
        if kind == "finite_metric":
            pairs = cfg.get("pairs")
            return finite_metric_space(metric_of(cfg), label, [tuple(p) for p in pairs] if pairs is not None else None)
        if kind == "circle_subgroup":
            return circle_subgroup_space(int(cfg["k"]), label)
        if kind == "fuzzy_torus":
            return fuzzy_torus_space(FuzzyTorusSpec(tuple(cfg["k"]), cfg.get("theta")), label)
        if kind == "group_action":
            return group_action_space(clock_shift_action(int(cfg["n"])), label)
    except KeyError as e:
        raise ConfigError(f"{cfg['_path']}: missing key {e.args[0]!r} for kind {kind}") from e
    except (TypeError, ValueError) as e:
        raise ConfigError(f"{cfg['_path']}: {e}") from e
    raise ConfigError(f"{cfg['_path']}: unknown kind {kind!r}")


def parse_state(alg, text: str):
    """``dirac:i``, ``prob:w0,w1,...``, ``vector:block:c0,c1,...`` or ``tracial``."""
    try:
        head, _, rest = text.partition(":")
        if head == "dirac":
            return dirac_state(alg, int(rest))
        if head == "prob":
            return probability_state(alg, [float(x) for x in rest.split(",")])
        if head == "vector":
            b, _, vec = rest.partition(":")
            return vector_state(alg, int(b), [complex(x.replace(" ", "")) for x in vec.split(",")])
        if head == "tracial":
            return tracial_state(alg)
    except (ValueError, IndexError) as e:
        raise ConfigError(f"state {text!r}: {e}") from e
    raise ConfigError(f"state {text!r}: expected dirac:i, prob:..., vector:b:... or tracial")


# ---------------------------------------------------------------- reporting


class Report:
    def __init__(self, command: str, args):
        self.command = command
        self.rows: list[list] = []
        self.failed = False
        self.add("seed", args.seed)
        self.add("iters", args.iters)
        self.add("tol", args.tol)

    def add(self, item, value, lo=None, hi=None, status="exact", passed=None):
        self.rows.append([self.command, item, _fmt(value), _fmt(lo), _fmt(hi), status, "" if passed is None else str(bool(passed)).lower()])
        if passed is False:
            self.failed = True

    def interval(self, item, iv, passed=None):
        mid = 0.5 * (iv.lo + iv.hi)
        self.add(item, mid, iv.lo, iv.hi, iv.status if iv.lo == iv.hi or iv.status != "exact" else "interval", passed)

    def write(self, out):
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["format_version", FORMAT_VERSION])
        w.writerow(COLUMNS)
        w.writerows(self.rows)


def _fmt(x):
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x)).lower()
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


def _eps(args, *spaces) -> float:
    if args.net_resolution is not None:
        return args.net_resolution
    return 0.05 * max(max(diameter_estimate(s).hi for s in spaces), 1e-12)


def make_tunnel(construction: str, ca: dict, cb: dict, sa, sb, args):
    if construction == "identity":
        if sa.algebra != sb.algebra:
            raise PropinquityError("identity tunnels need isomorphic algebras")
        return identity_tunnel(sa, identity_morphism(sa.algebra), sb)
    if construction == "direct_sum":
        return direct_sum_tunnel(sa, sb, args.scale)
    if construction == "correspondence":
        X, Y = metric_of(ca), metric_of(cb)
        if X is None or Y is None:
            raise PropinquityError("correspondence tunnels need classical spaces")
        if args.relation:
            R = [tuple(int(v) for v in p.split("-")) for p in args.relation.split(",")]
        else:
            R = _gh(X, Y).correspondence
        return correspondence_to_tunnel(X, Y, R, args.scale, sa, sb)
    if construction == "doubling":
        return doubling_tunnel(sa, args.gamma)
    raise ConfigError(f"unknown construction {construction!r}")


def _gh(X, Y):
    try:
        return gh_distance_exact(X, Y)
    except ResourceError:
        return gh_distance_heuristic(X, Y)


# ------------------------------------------------------------------ commands


def cmd_check(args, rep: Report):
    cfg = load_config(args.config)
    space = build_space(cfg)
    kern = check_lipschitz_pair(space, args.tol)
    rep.add("kernel_nullity", kern.nullity, status="exact", passed=kern.passed)
    rep.add("unit_residual", kern.unit_residual, status="exact", passed=kern.unit_residual <= args.tol)
    if not kern.passed:
        return
    lb = check_leibniz(space, args.trials, args.seed)
    rep.add("leibniz_violation", lb.max_violation, status="heuristic", passed=lb.max_violation <= args.tol)
    rep.interval("diameter", diameter_estimate(space), passed=True)


def cmd_dist(args, rep: Report):
    space = build_space(load_config(args.config))
    phi = parse_state(space.algebra, args.state_a)
    psi = parse_state(space.algebra, args.state_b)
    r = mk_distance(space, phi, psi, args.iters, args.seed)
    rep.add("mk", r.value, r.value, r.value, r.status)
    rep.add("residual", r.residual, status=r.status)


def _measure_rows(rep: Report, t, args, prefix=""):
    eps = _eps(args, t.dom, t.cod)
    m = t.measure(eps, args.iters, args.seed)
    rep.add(prefix + "eps_net", eps)
    rep.interval(prefix + "reach", m.reach)
    rep.interval(prefix + "depth", m.depth)
    rep.interval(prefix + "length", m.length)
    return m


def cmd_tunnel(args, rep: Report):
    ca, cb = load_config(args.config_a), load_config(args.config_b)
    sa, sb = build_space(ca), build_space(cb)
    t = make_tunnel(args.construction, ca, cb, sa, sb, args)
    v = t.validate(n_probes=200, n_lifts=32, seed=args.seed)
    rep.add("contraction_excess", v.max_contraction_excess, status="heuristic", passed=v.max_contraction_excess <= args.tol)
    rep.add("eps_lift", v.lift_excess, status=v.lift_status, passed=v.passed)
    if v.passed:
        _measure_rows(rep, t, args)


def _legs(args, configs, spaces):
    kinds = args.construction.split(",")
    if len(kinds) == 1:
        kinds = kinds * (len(spaces) - 1)
    if len(kinds) != len(spaces) - 1:
        raise ConfigError("give one construction or one per leg")
    return [make_tunnel(k, configs[i], configs[i + 1], spaces[i], spaces[i + 1], args) for i, k in enumerate(kinds)]


def cmd_journey(args, rep: Report):
    configs = [load_config(p) for p in args.configs]
    if len(configs) < 2:
        raise ConfigError("a journey needs at least two spaces")
    spaces = [build_space(c) for c in configs]
    legs = _legs(args, configs, spaces)
    eps = _eps(args, *spaces)
    j = None
    for i, t in enumerate(legs):
        step = Journey.from_legs([t], eps, args.iters, args.seed)
        rep.interval(f"leg{i}:{t.kind}", step.length)
        j = step if j is None else compose(j, step)
    rep.interval("journey_length", j.length)
    rep.interval("reduced_length", reduce_journey(j).length)


def cmd_converge(args, rep: Report):
    ks = [int(x) for x in args.k_list.split(",")]
    k_max = args.k_max or max(ks)
    rows, _ = circle_convergence(ks, k_max, args.net_resolution, args.iters, args.seed)
    eps = args.net_resolution if args.net_resolution is not None else 0.05 * math.pi
    prev = math.inf
    for r in rows:
        ok = r.bound.hi <= r.oracle + 4 * eps and r.bound.hi <= prev + 2 * eps
        prev = r.bound.hi
        rep.interval(f"k={r.k}", r.bound, passed=ok)
        rep.add(f"k={r.k}:pi/k", r.oracle, status="exact")


def cmd_chain(args, rep: Report):
    configs = [load_config(p) for p in args.configs]
    spaces = [build_space(c) for c in configs]
    legs = _legs(args, configs, spaces)
    n = len(legs) - 1 if args.n is None else args.n
    eps = args.net_resolution
    c = build_chain_space(legs, n, eps, args.iters, args.seed)
    rep.add("n", n)
    rep.add("kernel_nullity", c.kernel.nullity, passed=c.kernel.passed)
    rep.interval("chain_diameter", c.diameter)
    rep.add("diameter_bound", c.diameter_bound, status="certified", passed=c.bound_holds)


def cmd_gh(args, rep: Report):
    ca, cb = load_config(args.config_a), load_config(args.config_b)
    X, Y = metric_of(ca), metric_of(cb)
    if X is None or Y is None:
        raise ConfigError("gh needs classical spaces")
    g = _gh(X, Y)
    rep.add("gh", g.value, g.value if g.exact else None, g.value, "exact" if g.exact else "heuristic")
    rep.add("correspondence", " ".join(f"{x}-{y}" for x, y in g.correspondence), status="exact" if g.exact else "heuristic")


COMMANDS = {
    "check": cmd_check,
    "dist": cmd_dist,
    "tunnel": cmd_tunnel,
    "journey": cmd_journey,
    "converge": cmd_converge,
    "chain": cmd_chain,
    "gh": cmd_gh,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--net-resolution", type=float, default=None, help="state-net resolution (default 0.05 * diameter)")
    common.add_argument("--seed", type=int, default=42)
    common.add_argument("--iters", type=int, default=5000)
    common.add_argument("--tol", type=float, default=1e-9)
    common.add_argument("-o", "--output", default="-", help="CSV path, '-' for stdout")
    p = argparse.ArgumentParser(prog="propinquity", description="Propinquity bounds for finite quantum metric spaces.")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("check", parents=[common], help="kernel, Leibniz and diameter certificates")
    s.add_argument("config")
    s.add_argument("--trials", type=int, default=1000)

    s = sub.add_parser("dist", parents=[common], help="MK distance between two states")
    s.add_argument("config")
    s.add_argument("state_a")
    s.add_argument("state_b")

    def tunnel_opts(s, multi=False):
        s.add_argument("--construction", default="direct_sum", help=("comma list of " if multi else "") + "|".join(CONSTRUCTIONS))
        s.add_argument("--scale", type=float, default=None, help="bridge scale (direct_sum, correspondence)")
        s.add_argument("--gamma", type=float, default=1.0, help="doubling parameter")
        s.add_argument("--relation", default=None, help="correspondence as x-y,x-y,...")

    s = sub.add_parser("tunnel", parents=[common], help="reach, depth and length of one tunnel")
    s.add_argument("config_a")
    s.add_argument("config_b")
    tunnel_opts(s)

    s = sub.add_parser("journey", parents=[common], help="journey through a list of spaces")
    s.add_argument("configs", nargs="+")
    tunnel_opts(s, True)

    s = sub.add_parser("converge", parents=[common], help="circle subgroup convergence table")
    s.add_argument("--family", choices=["circle"], default="circle")
    s.add_argument("--k-list", default="2,4,8,16")
    s.add_argument("--k-max", type=int, default=None)

    s = sub.add_parser("chain", parents=[common], help="truncated chain-space diameter")
    s.add_argument("configs", nargs="+")
    s.add_argument("--n", type=int, default=None)
    tunnel_opts(s, True)

    s = sub.add_parser("gh", parents=[common], help="Gromov-Hausdorff distance of two classical spaces")
    s.add_argument("config_a")
    s.add_argument("config_b")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    rep = Report(args.command, args)
    t0 = time.perf_counter()
    try:
        COMMANDS[args.command](args, rep)
    except ConfigError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except PropinquityError as e:
        print(f"certificate failure: {e}", file=sys.stderr)
        rep.add("error", type(e).__name__, status="exact", passed=False)
    buf = io.StringIO()
    rep.write(buf)
    if args.output == "-":
        sys.stdout.write(buf.getvalue())
    else:
        with open(args.output, "w", encoding="utf-8", newline="") as fh:
            fh.write(buf.getvalue())
    print(f"{args.command}: {time.perf_counter() - t0:.3f}s", file=sys.stderr)
    return 1 if rep.failed else 0


if __name__ == "__main__":
    sys.exit(main())
