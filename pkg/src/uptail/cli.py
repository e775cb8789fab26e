"""Command-line front end.

Exit codes: 0 success, 2 usage error, 3 budget exceeded.  Exact quantities
are printed as "num/den" strings; p is accepted as a rational "a/b" (or a
decimal, converted exactly) for the exact engines and as a decimal for the
Monte Carlo and rate commands.  Infinity is spelled "inf".
"""

from __future__ import annotations

import argparse
import json
import math
import random
import sys
import time
from fractions import Fraction

from . import bounds as bounds_mod
from . import cores as cores_mod
from . import moments as moments_mod
from . import montecarlo as mc_mod
from . import variational as var_mod
from .aps import ApModel, IntegerSet, count_aps, extremal_ap_count, full_set
from .graphs import Graph, SubgraphModel, complete_graph, parse_graph6
from .models import InducedSubgraphModel
from .variational import BudgetExceededError


def _fraction(text):
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a rational: {text!r}") from exc


def _real_or_inf(text):
    if text.strip().lower() == "inf":
        return math.inf
    try:
        return float(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from exc


def _parse_grid(text):
    """start:stop:step, endpoints inclusive up to rounding."""
    try:
        start_s, stop_s, step_s = text.split(":")
        start, stop, step = float(start_s), float(stop_s), float(step_s)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not a start:stop:step range: {text!r}") from exc
    if step <= 0 or stop < start:
        raise argparse.ArgumentTypeError(f"bad range: {text!r}")
    values = []
    i = 0
    while True:
        value = start + i * step
        if value > stop + step * 1e-9:
            break
        values.append(round(value, 12))
        i += 1
    return values


def _build_model(args):
    kind = args.model
    if kind == "triangles":
        return SubgraphModel(complete_graph(3), args.n, _fraction(args.p))
    if kind == "clique":
        if args.r is None:
            raise SystemExit2("--r is required for clique models")
        return SubgraphModel(complete_graph(args.r), args.n, _fraction(args.p))
    if kind == "pattern":
        if args.pattern is None:
            raise SystemExit2("--pattern is required for pattern models")
        return SubgraphModel(parse_graph6(args.pattern), args.n, _fraction(args.p))
    if kind == "induced":
        if args.pattern is None:
            raise SystemExit2("--pattern is required for induced models")
        return InducedSubgraphModel(parse_graph6(args.pattern), args.n, _fraction(args.p))
    if kind == "ap":
        return ApModel(args.N, args.k, _fraction(args.p))
    raise SystemExit2(f"unknown model {kind!r}")


class SystemExit2(Exception):
    """Usage error raised past argparse's own checks."""


def _add_model_flags(parser):
    parser.add_argument("--model", required=True,
                        choices=["triangles", "clique", "pattern", "induced", "ap"])
    parser.add_argument("--n", type=int, default=None, help="host vertex count")
    parser.add_argument("--N", type=int, default=None, help="AP ground-set size")
    parser.add_argument("--k", type=int, default=3, help="progression length")
    parser.add_argument("--r", type=int, default=None, help="clique order")
    parser.add_argument("--pattern", default=None, help="pattern graph in graph6")
    parser.add_argument("--p", required=True, help="success probability, rational a/b or decimal")


def _emit(args, payload):
    text = payload if isinstance(payload, str) else json.dumps(payload, sort_keys=True)
    if getattr(args, "out", None):
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _frac_str(x):
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


# ---------------------------------------------------------------------------
# Verb implementations
# ---------------------------------------------------------------------------

def _cmd_rate(args):
    if args.family == "clique":
        result = var_mod.min_planting_cost(args.r, args.delta, args.c)
        _emit(args, {"phi": result.phi, "argmins": list(result.argmins),
                     "normalization": "n^2 p^(r-1) log(1/p)"})
        return 0
    if args.family == "regular":
        pattern = parse_graph6(args.pattern)
        degs = pattern.degrees()
        if len(set(degs)) != 1 or not pattern.is_connected():
            raise SystemExit2("rate regular needs a connected regular pattern")
        clique_cost = args.delta ** (2 / pattern.n) / 2
        theta = var_mod.theta_root(pattern, args.delta)
        if args.c == 0:
            rate = clique_cost
        elif math.isinf(args.c):
            rate = min(clique_cost, theta)
        else:
            raise SystemExit2("rate regular supports only --c 0 and --c inf")
        _emit(args, {"rate": rate, "theta": theta,
                     "normalization": "n^2 p^Delta log(1/p)"})
        return 0
    if args.family == "ap":
        delta = args.delta
        _emit(args, {
            "localised_rate": math.sqrt(delta),
            "localised_normalization": "N p^(k/2) log(1/p)",
            "poisson_rate_per_mean": var_mod.poisson_rate(delta, 1.0),
        })
        return 0
    raise SystemExit2(f"unknown rate family {args.family!r}")


def _cmd_phi(args):
    model = _build_model(args)
    if args.solver == "brute":
        witness = var_mod.min_conditioning_witness(model, args.delta, budget=args.budget)
    elif args.solver == "subcube":
        witness = var_mod.min_subcube_witness(model, args.delta, budget=args.budget)
    elif args.solver == "construct":
        witness = var_mod.build_construction(args.kind, model, args.delta)
    else:
        raise SystemExit2(f"unknown phi solver {args.solver!r}")
    _emit(args, witness.to_json())
    return 0


def _cmd_dist(args):
    model = _build_model(args)
    dist = moments_mod.exact_distribution(model)
    _emit(args, dist.to_json())
    return 0


def _cmd_moments(args):
    model = _build_model(args)
    result = moments_mod.factorial_moments(model, args.tmax)
    payload = {
        "from_dist": [_frac_str(x) for x in result.from_dist],
        "from_tuples": None if result.from_tuples is None
        else [_frac_str(x) for x in result.from_tuples],
    }
    _emit(args, payload)
    return 0


def _cmd_cores(args):
    model = _build_model(args)
    if args.action == "enumerate":
        params = cores_mod.CoreParams(model=model, delta=args.delta, eps=args.eps,
                                      K=args.K, phi_plus=args.phi_plus)
        report = cores_mod.enumerate_cores(params, args.m, budget=args.budget)
        _emit(args, report.to_json())
        return 0
    if args.action == "extract":
        conditioning = _parse_conditioning(model, args)
        core = cores_mod.extract_core(model, conditioning, Fraction(args.s))
        if isinstance(core, IntegerSet):
            payload = {"elements": core.elements()}
        else:
            payload = {"edges": sorted(map(list, core.edges))}
        _emit(args, payload)
        return 0
    raise SystemExit2(f"unknown cores action {args.action!r}")


def _parse_conditioning(model, args):
    if isinstance(model, ApModel):
        if not args.elements:
            raise SystemExit2("--elements is required for AP conditioning")
        return IntegerSet.from_elements(int(x) for x in args.elements.split(","))
    if not args.edges:
        raise SystemExit2("--edges is required for graph conditioning")
    edges = set()
    for token in args.edges.split(","):
        a, b = token.split("-")
        edges.add((int(a), int(b)))
    return Graph(model.n, frozenset(edges))


def _cmd_mc(args):
    if args.action == "sample":
        model = _build_model(args)
        plant = None
        if args.plant_edges or args.plant_elements:
            plant_args = argparse.Namespace(edges=args.plant_edges,
                                            elements=args.plant_elements)
            plant = _parse_conditioning(model, plant_args)
        cfg = mc_mod.McConfig(model=model, delta=args.delta, samples=args.samples,
                              seed=args.seed, plant=plant)
        estimate = mc_mod.sample_tail(cfg)
        _emit(args, estimate.to_json())
        return 0
    if args.action == "detect":
        graph = parse_graph6(args.graph)
        if args.event == "clique":
            witness = mc_mod.detect_clique_event(graph, args.eps, args.x, args.p_real,
                                                 r=args.r)
        else:
            witness = mc_mod.detect_hub_event(graph, args.eps, args.x, args.p_real,
                                              args.r)
        _emit(args, {"event": args.event, "found": witness is not None,
                     "witness": list(witness) if witness is not None else None})
        return 0
    raise SystemExit2(f"unknown mc action {args.action!r}")


def _cmd_check(args):
    if args.battery == "extremal-ap":
        started = time.time()
        violations = 0
        for k in range(3, args.kmax + 1):
            table = [extremal_ap_count(m, k) for m in range(args.n + 1)]
            from .aps import progression_masks
            masks = progression_masks(args.n, k)
            for subset_mask in range(1 << args.n):
                size = bin(subset_mask).count("1")
                hits = sum(1 for q in masks if q & subset_mask == q)
                if hits > table[size]:
                    violations += 1
        _emit(args, {"n": args.n, "k_range": [3, args.kmax],
                     "subsets_per_k": 1 << args.n, "violations": violations,
                     "seconds": round(time.time() - started, 3)})
        return 0 if violations == 0 else 1
    if args.battery == "alpha":
        mismatches = 0
        checked = 0
        for mask in range(1 << (args.max_n * (args.max_n - 1) // 2)):
            graph = _graph_from_mask(args.max_n, mask)
            checked += 1
            if bounds_mod.fractional_independence(graph).alpha_star != \
                    bounds_mod.alpha_star_bruteforce(graph):
                mismatches += 1
        rng = random.Random(args.seed)
        for _ in range(args.random):
            graph = _random_graph(rng, 7)
            checked += 1
            if bounds_mod.fractional_independence(graph).alpha_star != \
                    bounds_mod.alpha_star_bruteforce(graph):
                mismatches += 1
        _emit(args, {"checked": checked, "mismatches": mismatches})
        return 0 if mismatches == 0 else 1
    if args.battery == "bounds":
        summary = run_bound_battery(args.pairs, args.seed)
        _emit(args, summary)
        return 0 if summary["violations"] == 0 else 1
    if args.battery == "stability":
        model = _build_model(args)
        lhs, bound, holds, blockers = moments_mod.stability_inequality_check(
            model, args.delta, args.eps, args.ell)
        _emit(args, {"lhs": _frac_str(lhs), "bound": bound, "holds": holds,
                     "qualifying_sets": blockers})
        return 0 if holds else 1
    if args.battery == "janson":
        family = _janson_family(args)
        exact, bound, holds = moments_mod.hypergeometric_janson_check(
            family, args.t, args.s, args.eps)
        _emit(args, {"exact": _frac_str(exact), "bound": bound, "holds": holds})
        return 0 if holds else 1
    raise SystemExit2(f"unknown check battery {args.battery!r}")


def _janson_family(args):
    import itertools
    if args.family == "pairs":
        return [list(c) for c in itertools.combinations(range(args.t), 2)]
    if args.family == "triples":
        return [list(c) for c in itertools.combinations(range(args.t), 3)]
    rng = random.Random(args.seed)
    family = []
    for _ in range(args.count):
        size = rng.randint(1, max(1, args.t // 2))
        family.append(sorted(rng.sample(range(args.t), size)))
    return family


def _graph_from_mask(n, mask):
    from itertools import combinations
    pairs = list(combinations(range(n), 2))
    return Graph(n, frozenset(pairs[i] for i in range(len(pairs)) if mask >> i & 1))


def _random_graph(rng, max_n, min_n=2):
    n = rng.randint(min_n, max_n)
    edges = {(u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < rng.uniform(0.2, 0.9)}
    return Graph(n, frozenset(edges))


def run_bound_battery(pairs, seed):
    """Seeded random instances for all six embedding bounds; returns a
    summary with per-kind counts and the number of violations."""
    from itertools import combinations
    rng = random.Random(seed)
    per_kind = {k: 0 for k in
                ("cycle", "jor", "edge_regular", "edge_bipartite", "bad_edges", "stars")}
    violations = 0
    attempts = 0
    while sum(per_kind.values()) < pairs and attempts < 100 * pairs:
        attempts += 1
        kind = rng.choice(list(per_kind))
        host = _random_graph(rng, 8, min_n=3)
        if host.num_edges == 0:
            continue
        try:
            if kind == "cycle":
                from .graphs import cycle_graph
                report = bounds_mod.embedding_bound(kind, cycle_graph(rng.randint(3, 6)), host)
            elif kind == "jor":
                pattern = _random_graph(rng, 5, min_n=2)
                if pattern.num_edges == 0 or any(d == 0 for d in pattern.degrees()):
                    continue
                report = bounds_mod.embedding_bound(kind, pattern, host)
            elif kind == "edge_regular":
                from .graphs import cycle_graph
                pattern = rng.choice([complete_graph(3), complete_graph(4),
                                      cycle_graph(4), cycle_graph(5), complete_graph(2)])
                edge = rng.choice(sorted(host.edges))
                report = bounds_mod.embedding_bound(kind, pattern, host, extra=edge)
            elif kind == "edge_bipartite":
                from .graphs import star_graph
                pattern = rng.choice([star_graph(2), star_graph(3), star_graph(4),
                                      _double_star(1, 2), _double_star(2, 3)])
                if bounds_mod._bipartite_sides_with_full_degree(pattern) is None:
                    continue
                edge = rng.choice(sorted(host.edges))
                report = bounds_mod.embedding_bound(kind, pattern, host, extra=edge)
            elif kind == "bad_edges":
                pattern = rng.choice([complete_graph(3), complete_graph(4)])
                chosen = [e for e in sorted(host.edges) if rng.random() < 0.5]
                if not chosen:
                    continue
                marked = Graph(host.n, frozenset(chosen))
                report = bounds_mod.embedding_bound(kind, pattern, host, extra=marked)
            else:  # stars
                from .graphs import complete_bipartite
                a, b = rng.randint(1, 4), rng.randint(1, 4)
                bip_edges = {(i, a + j) for i in range(a) for j in range(b)
                             if rng.random() < 0.8}
                bip = Graph(a + b, frozenset(bip_edges))
                if bip.num_edges == 0 or b == 0:
                    continue
                s = rng.randint(2, 4)
                q_min = Fraction(bip.num_edges, b)
                q = q_min + rng.randint(0, 2)
                if q > a:
                    continue
                parts = (tuple(range(a)), tuple(range(a, a + b)))
                report = bounds_mod.embedding_bound(
                    kind, None, bip, extra=(q, s, parts))
        except bounds_mod.PreconditionError:
            continue
        per_kind[kind] += 1
        if not report.holds:
            violations += 1
    return {"pairs": sum(per_kind.values()), "per_kind": per_kind,
            "violations": violations, "seed": seed}


def _double_star(i, j):
    edges = {(0, 1)}
    next_vertex = 2
    for _ in range(i):
        edges.add((0, next_vertex))
        next_vertex += 1
    for _ in range(j):
        edges.add((1, next_vertex))
        next_vertex += 1
    return Graph(next_vertex, frozenset(edges))


def phase_diagram_rows(r, delta_grid, c_grid):
    rows = []
    for delta in delta_grid:
        for c in c_grid:
            result = var_mod.min_planting_cost(r, delta, c)
            if len(result.argmins) > 1:
                label = "tie"
            else:
                x = result.argmins[0]
                if x == 0:
                    label = "clique"
                elif x == 1:
                    label = "hub"
                else:
                    label = f"mixed:{x:.6g}"
            rows.append((delta, c, result.phi, label))
    return rows


def emit_phase_diagram(r, delta_grid, c_grid, out=None):
    rows = phase_diagram_rows(r, delta_grid, c_grid)
    lines = ["delta,c,phi,argmin_label"]
    lines += [f"{d:.12g},{c:.12g},{phi:.12g},{label}" for d, c, phi, label in rows]
    text = "\n".join(lines)
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    return text


def _cmd_phase_diagram(args):
    text = emit_phase_diagram(args.r, _parse_grid(args.delta_grid),
                              _parse_grid(args.c_grid), out=args.out)
    if not args.out:
        print(text)
    return 0


# ---------------------------------------------------------------------------
# Parser assembly
# ---------------------------------------------------------------------------

def _build_parser():
    parser = argparse.ArgumentParser(prog="uptail",
                                     description="upper-tail machinery at desk scale")
    sub = parser.add_subparsers(dest="verb", required=True)

    rate = sub.add_parser("rate", help="closed-form rate evaluation")
    rate_sub = rate.add_subparsers(dest="family", required=True)
    rc = rate_sub.add_parser("clique")
    rc.add_argument("--r", type=int, required=True)
    rc.add_argument("--delta", type=float, required=True)
    rc.add_argument("--c", type=_real_or_inf, required=True)
    rc.add_argument("--out")
    rr = rate_sub.add_parser("regular")
    rr.add_argument("--pattern", required=True)
    rr.add_argument("--delta", type=float, required=True)
    rr.add_argument("--c", type=_real_or_inf, required=True)
    rr.add_argument("--out")
    ra = rate_sub.add_parser("ap")
    ra.add_argument("--delta", type=float, required=True)
    ra.add_argument("--k", type=int, default=3)
    ra.add_argument("--out")

    phi = sub.add_parser("phi", help="minimum-cost conditioning solvers")
    phi_sub = phi.add_subparsers(dest="solver", required=True)
    for name in ("brute", "subcube"):
        sp = phi_sub.add_parser(name)
        _add_model_flags(sp)
        sp.add_argument("--delta", type=float, required=True)
        sp.add_argument("--budget", type=int, default=1 << 22)
        sp.add_argument("--out")
    pc = phi_sub.add_parser("construct")
    _add_model_flags(pc)
    pc.add_argument("--kind", choices=["clique", "hub", "interval"], required=True)
    pc.add_argument("--delta", type=float, required=True)
    pc.add_argument("--out")

    dist = sub.add_parser("dist", help="exact distributions")
    dist_sub = dist.add_subparsers(dest="action", required=True)
    de = dist_sub.add_parser("exact")
    _add_model_flags(de)
    de.add_argument("--out")

    mom = sub.add_parser("moments", help="factorial moments, both routes")
    _add_model_flags(mom)
    mom.add_argument("--tmax", type=int, default=4)
    mom.add_argument("--out")

    cores = sub.add_parser("cores", help="core census and extraction")
    cores_sub = cores.add_subparsers(dest="action", required=True)
    ce = cores_sub.add_parser("enumerate")
    _add_model_flags(ce)
    ce.add_argument("--delta", type=float, required=True)
    ce.add_argument("--eps", type=float, required=True)
    ce.add_argument("--K", type=float, required=True)
    ce.add_argument("--phi-plus", dest="phi_plus", type=float, required=True)
    ce.add_argument("--m", type=int, required=True)
    ce.add_argument("--budget", type=int, default=5_000_000)
    ce.add_argument("--out")
    cx = cores_sub.add_parser("extract")
    _add_model_flags(cx)
    cx.add_argument("--s", required=True, help="total slack, rational")
    cx.add_argument("--edges", default=None, help="comma list like 0-1,0-2")
    cx.add_argument("--elements", default=None, help="comma list like 1,2,3")
    cx.add_argument("--out")

    mc = sub.add_parser("mc", help="Monte Carlo sampling and detection")
    mc_sub = mc.add_subparsers(dest="action", required=True)
    ms = mc_sub.add_parser("sample")
    _add_model_flags(ms)
    ms.add_argument("--delta", type=float, required=True)
    ms.add_argument("--samples", type=int, required=True)
    ms.add_argument("--seed", type=int, required=True)
    ms.add_argument("--plant-edges", default=None)
    ms.add_argument("--plant-elements", default=None)
    ms.add_argument("--out")
    md = mc_sub.add_parser("detect")
    md.add_argument("--graph", required=True, help="host graph in graph6")
    md.add_argument("--event", choices=["clique", "hub"], required=True)
    md.add_argument("--eps", type=float, required=True)
    md.add_argument("--x", type=float, required=True)
    md.add_argument("--p-real", type=float, required=True)
    md.add_argument("--r", type=int, default=3)
    md.add_argument("--out")

    check = sub.add_parser("check", help="verification batteries")
    check_sub = check.add_subparsers(dest="battery", required=True)
    ca = check_sub.add_parser("extremal-ap")
    ca.add_argument("--n", type=int, default=16)
    ca.add_argument("--kmax", type=int, default=4)
    ca.add_argument("--out")
    cb = check_sub.add_parser("bounds")
    cb.add_argument("--pairs", type=int, default=1000)
    cb.add_argument("--seed", type=int, default=1)
    cb.add_argument("--out")
    cal = check_sub.add_parser("alpha")
    cal.add_argument("--max-n", dest="max_n", type=int, default=5)
    cal.add_argument("--random", type=int, default=500)
    cal.add_argument("--seed", type=int, default=1)
    cal.add_argument("--out")
    cs = check_sub.add_parser("stability")
    _add_model_flags(cs)
    cs.add_argument("--delta", type=float, required=True)
    cs.add_argument("--eps", type=float, required=True)
    cs.add_argument("--ell", type=int, required=True)
    cs.add_argument("--out")
    cj = check_sub.add_parser("janson")
    cj.add_argument("--t", type=int, required=True)
    cj.add_argument("--s", type=int, required=True)
    cj.add_argument("--eps", type=float, required=True)
    cj.add_argument("--family", default="pairs", help="pairs, triples, or random")
    cj.add_argument("--count", type=int, default=6)
    cj.add_argument("--seed", type=int, default=1)
    cj.add_argument("--out")

    pd = sub.add_parser("phase-diagram", help="grid sweep of the planting cost")
    pd.add_argument("--r", type=int, required=True)
    pd.add_argument("--delta-grid", dest="delta_grid", required=True)
    pd.add_argument("--c-grid", dest="c_grid", required=True)
    pd.add_argument("--out")

    return parser


_DISPATCH = {
    "rate": _cmd_rate,
    "phi": _cmd_phi,
    "dist": _cmd_dist,
    "moments": _cmd_moments,
    "cores": _cmd_cores,
    "mc": _cmd_mc,
    "check": _cmd_check,
    "phase-diagram": _cmd_phase_diagram,
}


def run(argv):
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if exc.code is not None else 2
    try:
        return _DISPATCH[args.verb](args)
    except BudgetExceededError as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return 3
    except SystemExit2 as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main():
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
