"""Fractional independence via the bipartite double cover, embedding-count
upper bounds, the star/clique stability extractors, and the Q-family of
subgraphs of a regular pattern.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

from .graphs import (
    Graph,
    _normalize_edge,
    are_isomorphic,
    enumerate_embeddings,
)

REL_SLACK = 1e-12  # comparison slack for irrational bounds


class PreconditionError(ValueError):
    """A bound was requested on an instance that violates its hypothesis."""


# ---------------------------------------------------------------------------
# Fractional independence number, constructively via the double cover
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FracIndepResult:
    alpha_star: Fraction
    assignment: dict       # vertex -> Fraction in {0, 1/2, 1}
    partition: tuple       # (V1, V2) as sorted tuples
    cover: tuple           # vertex-disjoint edges/cycles (tuples of vertices) covering V1


def _max_bipartite_matching(left_adj, n_right):
    """Kuhn's augmenting-path matching; deterministic for a fixed input order."""
    match_left = {}
    match_right = {}

    def try_augment(u, seen):
        for v in left_adj[u]:
            if v in seen:
                continue
            seen.add(v)
            if v not in match_right or try_augment(match_right[v], seen):
                match_left[u] = v
                match_right[v] = u
                return True
        return False

    for u in sorted(left_adj):
        try_augment(u, set())
    return match_left, match_right


def _koenig_independent_set(left_adj, match_left, match_right):
    """Independent set of size |L|+|R|-|M| from alternating reachability."""
    reachable_left = {u for u in left_adj if u not in match_left}
    reachable_right = set()
    frontier = list(reachable_left)
    while frontier:
        u = frontier.pop()
        for v in left_adj[u]:
            if v not in reachable_right:
                reachable_right.add(v)
                w = match_right.get(v)
                if w is not None and w not in reachable_left:
                    reachable_left.add(w)
                    frontier.append(w)
    return reachable_left, reachable_right


def fractional_independence(graph):
    """Largest fractional independent set weight, with the half-integral
    certificate and an edge/cycle cover of the half-weight part."""
    n = graph.n
    left_adj = {("L", v): [] for v in range(n)}
    for u, v in sorted(graph.edges):
        left_adj[("L", u)].append(("R", v))
        left_adj[("L", v)].append(("R", u))
    for key in left_adj:
        left_adj[key].sort()
    match_left, match_right = _max_bipartite_matching(left_adj, n)
    in_left, in_right = _koenig_independent_set(left_adj, match_left, match_right)
    independent = {("L", v) for v in range(n) if ("L", v) in in_left}
    independent |= {("R", v) for v in range(n) if ("R", v) not in in_right}

    assignment = {}
    for v in range(n):
        hits = (("L", v) in independent) + (("R", v) in independent)
        assignment[v] = Fraction(hits, 2)
    alpha_star = sum(assignment.values(), Fraction(0))

    # shadow of the matching: max degree 2, components are paths and cycles
    shadow = set()
    for (side, u), (_, v) in match_left.items():
        shadow.add(_normalize_edge(u, v))
    adj = {v: set() for v in range(n)}
    for u, v in shadow:
        adj[u].add(v)
        adj[v].add(u)

    v2 = [v for v in range(n) if not adj[v]]
    cover = []
    seen = set()
    for start in sorted(adj):
        if start in seen or not adj[start]:
            continue
        if len(adj[start]) == 2:
            continue  # handle path endpoints first; cycles in a second pass
        path = [start]
        seen.add(start)
        while True:
            nxt = [u for u in adj[path[-1]] if u not in seen]
            if not nxt:
                break
            path.append(nxt[0])
            seen.add(nxt[0])
        if len(path) % 2 == 1:  # even number of edges: drop the smaller endpoint
            if path[0] > path[-1]:
                path = path[::-1]
            v2.append(path[0])
            path = path[1:]
        for i in range(0, len(path), 2):
            cover.append((path[i], path[i + 1]))
    for start in sorted(adj):
        if start in seen or not adj[start]:
            continue
        cycle = [start]
        seen.add(start)
        while True:
            nxt = [u for u in adj[cycle[-1]] if u not in seen]
            if not nxt:
                break
            cycle.append(nxt[0])
            seen.add(nxt[0])
        cover.append(tuple(cycle))

    v2 = sorted(v2)
    v1 = sorted(set(range(n)) - set(v2))
    return FracIndepResult(alpha_star=alpha_star, assignment=assignment,
                           partition=(tuple(v1), tuple(v2)), cover=tuple(cover))


def alpha_star_bruteforce(graph):
    """Oracle: maximise the weight over all assignments in {0, 1/2, 1}^V."""
    best = Fraction(0)
    levels = [Fraction(0), Fraction(1, 2), Fraction(1)]
    edges = list(graph.edges)

    def recurse(v, weights):
        nonlocal best
        if v == graph.n:
            best = max(best, sum(weights, Fraction(0)))
            return
        for level in levels:
            # normalized edges have u < w, so u is already assigned when w == v
            if all(weights[u] + level <= 1 for u, w in edges if w == v):
                recurse(v + 1, weights + [level])

    recurse(0, [])
    return best


# ---------------------------------------------------------------------------
# Embedding-count upper bounds
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BoundReport:
    kind: str
    bound: object          # Fraction when exact, float otherwise
    actual: int
    holds: bool
    exact: bool

    def to_json(self):
        import json
        if self.exact:
            frac = Fraction(self.bound)
            bound = f"{frac.numerator}/{frac.denominator}"
        else:
            bound = float(self.bound)
        return json.dumps({"kind": self.kind, "bound": bound, "actual": self.actual,
                           "holds": self.holds, "exact": self.exact}, sort_keys=True)


def _finish(kind, bound, actual, exact):
    if exact:
        holds = Fraction(actual) <= Fraction(bound)
    else:
        holds = actual <= bound * (1 + REL_SLACK)
    return BoundReport(kind=kind, bound=bound, actual=actual, holds=holds, exact=exact)


def _power(base, exponent):
    """base**exponent, exact when the exponent is a nonnegative integer."""
    frac = Fraction(exponent).limit_denominator(10 ** 9)
    if frac.denominator == 1 and frac >= 0:
        return Fraction(base) ** int(frac), True
    return float(base) ** float(exponent), False


def embeddings_through_edge(pattern, host, edge):
    """Number of embeddings whose image contains ``edge``."""
    counted = 0
    target = _normalize_edge(*edge)
    from .graphs import _embeddings
    for phi in _embeddings(pattern, host):
        if any(_normalize_edge(phi[u], phi[v]) == target for u, v in pattern.edges):
            counted += 1
    return counted


def star_embeddings_from(host, centres, s):
    """|Emb_U(K_{1,s}, host)| = sum over centres of falling factorial of degree."""
    total = 0
    for u in centres:
        d = host.degree(u)
        term = 1
        for i in range(s):
            term *= d - i
        total += max(term, 0)
    return total


def _is_cycle(graph):
    return graph.num_edges == graph.n and graph.n >= 3 and \
        all(d == 2 for d in graph.degrees()) and graph.is_connected()


def _is_regular(graph):
    degs = [d for d in graph.degrees()]
    return len(set(degs)) == 1 and degs[0] > 0


def _bipartite_sides_with_full_degree(graph):
    """(A, B) with every A-vertex of maximum degree and |A| < |B|, or None."""
    parts = graph.bipartition()
    if parts is None:
        return None
    delta = max(graph.degrees())
    for side_a, side_b in (parts, parts[::-1]):
        if not side_a or len(side_a) >= len(side_b):
            continue
        if all(graph.degree(a) == delta for a in side_a):
            return tuple(side_a), tuple(side_b)
    return None


def embedding_bound(kind, pattern, host, extra=None):
    """One of the six embedding-count upper bounds, checked against brute force.

    kinds: cycle, jor, edge_regular, edge_bipartite, bad_edges, stars.
    ``extra`` carries the edge (edge_*), the subgraph (bad_edges), or
    (q, s[, parts]) for stars.
    """
    two_e = 2 * host.num_edges
    if kind == "cycle":
        if pattern is None or not _is_cycle(pattern):
            raise PreconditionError("cycle bound needs the pattern to be a cycle")
        length = pattern.n
        bound, exact = _power(two_e, Fraction(length, 2))
        actual = enumerate_embeddings(pattern, host).total
        return _finish(kind, bound, actual, exact)

    if kind == "jor":
        if pattern.num_edges == 0 or any(d == 0 for d in pattern.degrees()):
            raise PreconditionError("bound needs a nonempty pattern without isolated vertices")
        alpha = fractional_independence(pattern).alpha_star
        cap = min(two_e, host.n)
        b1, e1 = _power(two_e, pattern.n - alpha)
        b2, e2 = _power(cap, 2 * alpha - pattern.n)
        exact = e1 and e2
        bound = b1 * b2 if exact else float(b1) * float(b2)
        actual = enumerate_embeddings(pattern, host).total
        return _finish(kind, bound, actual, exact)

    if kind == "edge_regular":
        if not _is_regular(pattern):
            raise PreconditionError("edge_regular bound needs a regular pattern")
        if extra is None:
            raise PreconditionError("edge_regular bound needs a host edge")
        u, v = _normalize_edge(*extra)
        if not host.has_edge(u, v):
            raise PreconditionError(f"({u},{v}) is not an edge of the host")
        delta = max(pattern.degrees())
        e_j = pattern.num_edges
        du, dv = host.degree(u), host.degree(v)
        bound = 4 * e_j * float(two_e) ** (pattern.n / 2 - (2 * delta - 1) / delta) \
            * float(4 * du * dv) ** ((delta - 1) / delta)
        actual = embeddings_through_edge(pattern, host, (u, v))
        return _finish(kind, bound, actual, exact=False)

    if kind == "edge_bipartite":
        if pattern.num_edges == 0 or not pattern.is_connected():
            raise PreconditionError("edge_bipartite bound needs a nonempty connected pattern")
        sides = _bipartite_sides_with_full_degree(pattern)
        if sides is None:
            raise PreconditionError(
                "edge_bipartite bound needs a bipartition with one smaller side of full degree")
        if extra is None:
            raise PreconditionError("edge_bipartite bound needs a host edge")
        u, v = _normalize_edge(*extra)
        if not host.has_edge(u, v):
            raise PreconditionError(f"({u},{v}) is not an edge of the host")
        side_a, side_b = sides
        e_j = pattern.num_edges
        cap = min(host.num_edges, host.n)
        bound = Fraction(e_j * (host.degree(u) + host.degree(v))) \
            * Fraction(two_e) ** (len(side_a) - 1) \
            * Fraction(cap) ** (len(side_b) - len(side_a) - 1)
        actual = embeddings_through_edge(pattern, host, (u, v))
        return _finish(kind, bound, actual, exact=True)

    if kind == "bad_edges":
        if not _is_regular(pattern):
            raise PreconditionError("bad_edges bound needs a regular pattern")
        if extra is None or not isinstance(extra, Graph):
            raise PreconditionError("bad_edges bound needs a subgraph of the host")
        if not extra.edges <= host.edges:
            raise PreconditionError("the marked graph must be a subgraph of the host")
        if host.num_edges == 0:
            raise PreconditionError("host must have at least one edge")
        delta = max(pattern.degrees())
        e_j = pattern.num_edges
        bound = e_j * float(two_e) ** (pattern.n / 2) \
            * float(Fraction(extra.num_edges, host.num_edges)) ** (1 / delta)
        actual = sum(embeddings_through_edge(pattern, host, e) for e in extra.edges)
        return _finish(kind, bound, actual, exact=False)

    if kind == "stars":
        if extra is None or len(extra) < 2:
            raise PreconditionError("stars bound needs extra=(q, s[, parts])")
        q, s = Fraction(extra[0]), int(extra[1])
        parts = extra[2] if len(extra) > 2 else None
        if s < 2:
            raise PreconditionError("stars bound needs s >= 2")
        side_u, side_v = _identify_parts(host, parts)
        if not 0 < q <= len(side_u):
            raise PreconditionError("stars bound needs 0 < q <= |U|")
        if host.num_edges > q * len(side_v):
            raise PreconditionError("stars bound needs e_G <= q|V|")
        floor_q = math.floor(q)
        frac_q = q - floor_q
        if frac_q == 0:
            bound = Fraction(floor_q) * Fraction(len(side_v)) ** s
            exact = True
        else:
            bound = (floor_q + float(frac_q) ** s) * float(len(side_v)) ** s
            exact = False
        actual = star_embeddings_from(host, side_u, s)
        return _finish(kind, bound, actual, exact)

    raise PreconditionError(f"unknown bound kind {kind!r}")


def _identify_parts(host, parts):
    """Resolve the (U, V) sides of a bipartite host, validating crossings."""
    if parts is not None:
        side_u, side_v = [tuple(sorted(p)) for p in parts]
        su, sv = set(side_u), set(side_v)
        if su & sv or su | sv != set(range(host.n)):
            raise PreconditionError("parts must partition the vertex set")
        for a, b in host.edges:
            if (a in su) == (b in su):
                raise PreconditionError("part identification failure: an edge does not cross")
        return side_u, side_v
    two_col = host.bipartition()
    if two_col is None:
        raise PreconditionError("part identification failure: host is not bipartite")
    return tuple(two_col[0]), tuple(two_col[1])


# ---------------------------------------------------------------------------
# Subgraphs of a regular pattern that can carry extremal edge counts
# ---------------------------------------------------------------------------

def _has_full_degree_side(subgraph, delta):
    """True iff every component has a colour class all of whose degrees are delta."""
    parts = subgraph.bipartition()
    if parts is None:
        return False
    adj = subgraph.adjacency_masks()
    seen = set()
    for start in range(subgraph.n):
        if start in seen:
            continue
        component = {start}
        frontier = [start]
        while frontier:
            v = frontier.pop()
            for u in range(subgraph.n):
                if adj[v] >> u & 1 and u not in component:
                    component.add(u)
                    frontier.append(u)
        seen |= component
        in_a = component & set(parts[0])
        in_b = component & set(parts[1])
        ok_a = bool(in_a) and all(subgraph.degree(v) == delta for v in in_a)
        ok_b = bool(in_b) and all(subgraph.degree(v) == delta for v in in_b)
        if not (ok_a or ok_b):
            return False
    return True


def q_family(pattern):
    """The subgraphs (up to isomorphism) of a connected regular pattern that
    are either the whole pattern or bipartite with a full-degree side."""
    if not pattern.is_connected():
        raise PreconditionError("pattern must be connected")
    degs = pattern.degrees()
    if len(set(degs)) != 1 or degs[0] == 0:
        raise PreconditionError("pattern must be regular and nonempty")
    delta = degs[0]
    found = []
    edges = sorted(pattern.edges)
    for size in range(1, len(edges) + 1):
        for chosen in combinations(edges, size):
            sub_full = Graph(pattern.n, frozenset(chosen))
            sub = sub_full.induced(sub_full.support())
            if size == len(edges):
                member = True      # the whole pattern
            else:
                member = _has_full_degree_side(sub, delta)
            if member and not any(are_isomorphic(sub, g) for g in found):
                found.append(sub)
    return found


# ---------------------------------------------------------------------------
# Constructive stability: dense-subgraph extraction from near-extremal counts
# ---------------------------------------------------------------------------

def clique_count_deficiency(graph, r):
    """eps with |Emb(K_r, G)| = (1-eps)(2e_G)^{r/2}, clamped to >= e_G^{-1/2}."""
    from .graphs import complete_graph
    e_g = graph.num_edges
    if e_g == 0:
        return 1.0
    emb = enumerate_embeddings(complete_graph(r), graph).total
    eps = 1 - emb / float(2 * e_g) ** (r / 2)
    return max(eps, e_g ** -0.5)


def _k4_link_matrix(graph):
    """Adjacency matrix of the auxiliary graph on E(G): two edges are linked
    iff their four endpoints are distinct and induce a complete graph."""
    import numpy as np
    edges = sorted(graph.edges)
    m = len(edges)
    heads = np.array([e[0] for e in edges])
    tails = np.array([e[1] for e in edges])
    adj = np.zeros((graph.n, graph.n), dtype=bool)
    for a, b in edges:
        adj[a, b] = adj[b, a] = True
    hh = heads[:, None]
    ht = tails[:, None]
    disjoint = (hh != heads[None, :]) & (hh != tails[None, :]) & \
        (ht != heads[None, :]) & (ht != tails[None, :])
    linked = disjoint & adj[hh, heads[None, :]] & adj[hh, tails[None, :]] & \
        adj[ht, heads[None, :]] & adj[ht, tails[None, :]]
    return edges, linked


def extract_dense_subgraph(graph, r, peel_threshold=None):
    """Peel the K4-link graph to expose a near-clique when the K_r embedding
    count is close to its (2e_G)^{r/2} ceiling.

    Returns the induced subgraph on surviving edge endpoints (vertex labels
    preserved), or None when the minimum-degree guarantee is vacuous and no
    explicit ``peel_threshold`` was supplied.
    """
    if r < 3:
        raise ValueError("r must be at least 3")
    e_g = graph.num_edges
    if e_g == 0:
        return None
    eps = clique_count_deficiency(graph, r)
    guarantee = (1 - 4 * math.sqrt(eps)) * math.sqrt(2 * e_g)
    if peel_threshold is None:
        if guarantee <= 0:
            return None
        eps_path = 3 * eps if r % 2 else eps
        peel_threshold = (1 - 2 * math.sqrt(eps_path)) * e_g
    import numpy as np
    edges, linked = _k4_link_matrix(graph)
    alive_mask = np.ones(len(edges), dtype=bool)
    while True:
        degrees = (linked & alive_mask[None, :]).sum(axis=1)
        doomed = alive_mask & (degrees < peel_threshold)
        if not doomed.any():
            break
        alive_mask &= ~doomed
    alive = [edges[i] for i in range(len(edges)) if alive_mask[i]]
    if not alive:
        return None
    survivors = sorted({v for e in alive for v in e})
    keep = set(survivors)
    kept_edges = frozenset(e for e in graph.edges if e[0] in keep and e[1] in keep)
    return Graph(graph.n, kept_edges)


def min_degree_guarantee(graph, r):
    """The (1 - 4 sqrt(eps)) sqrt(2 e_G) floor promised by the extractor."""
    eps = clique_count_deficiency(graph, r)
    return (1 - 4 * math.sqrt(eps)) * math.sqrt(2 * graph.num_edges)


# ---------------------------------------------------------------------------
# High-degree / low-degree split with exact accounting
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SplitReport:
    clique_drop: int           # Emb(K_r, G) - Emb(K_r, G[V])
    clique_drop_bound: int     # r |U| Emb(K_{r-1}, G)
    star_total: int            # Emb(K_{1,r-1}, G)
    star_bipartite: int        # centre in U, leaves in V, edges crossing
    t1: int                    # centre in U, some leaf in U
    t2: int                    # centre in V
    u_size_bound: float        # 2 e_G / theta


def split_high_degree(graph, theta, r):
    """Partition by the degree cutoff and report the exact loss accounting."""
    if theta <= 0:
        raise ValueError("theta must be positive")
    from .graphs import complete_graph
    degs = graph.degrees()
    side_u = tuple(sorted(v for v in range(graph.n) if degs[v] >= theta))
    side_v = tuple(sorted(v for v in range(graph.n) if degs[v] < theta))
    u_set = set(side_u)

    low = graph.induced(side_v) if side_v else Graph(0)
    if low.num_edges > 0 and r <= low.n:
        emb_low = enumerate_embeddings(complete_graph(r), low).total
    else:
        emb_low = 0
    emb_full = enumerate_embeddings(complete_graph(r), graph).total if graph.num_edges else 0
    emb_minus = enumerate_embeddings(complete_graph(r - 1), graph).total \
        if graph.num_edges and r - 1 >= 2 else 0

    s = r - 1

    def falling(x):
        return math.prod(range(x, x - s, -1)) if x >= s else 0

    star_total = star_embeddings_from(graph, range(graph.n), s)
    star_bip = t1 = t2 = 0
    for v in range(graph.n):
        d = degs[v]
        d_low = sum(1 for u in graph.neighbors(v) if u not in u_set)
        if v in u_set:
            star_bip += falling(d_low)
            t1 += falling(d) - falling(d_low)
        else:
            t2 += falling(d)

    report = SplitReport(
        clique_drop=emb_full - emb_low,
        clique_drop_bound=r * len(side_u) * emb_minus,
        star_total=star_total,
        star_bipartite=star_bip,
        t1=t1,
        t2=t2,
        u_size_bound=2 * graph.num_edges / theta,
    )
    return side_u, side_v, report


# ---------------------------------------------------------------------------
# Star-count witness extraction
# ---------------------------------------------------------------------------

def star_witness(graph, q, s, eps, parts=None):
    """Top-degree witness for a near-extremal star count.

    Returns (W, W') or None.  W is the ceil(q) largest-degree vertices of U;
    the success conditions are the crossing-edge mass and the count of
    near-full-degree members.  The e_G <= q|V| hypothesis of the star-count
    bound is not enforced here; it belongs to the bound, not the extractor.
    """
    q = Fraction(q)
    if s < 2:
        raise PreconditionError("s must be at least 2")
    side_u, side_v = _identify_parts(graph, parts)
    if not 0 < q <= len(side_u):
        raise PreconditionError("q must lie in (0, |U|]")
    size_w = math.ceil(q)
    ranked = sorted(side_u, key=lambda v: (-graph.degree(v), v))
    witness = tuple(sorted(ranked[:size_w]))
    crossing = sum(graph.degree(w) for w in witness)
    if crossing < (1 - eps) * float(q) * len(side_v):
        return None
    full = tuple(sorted(w for w in witness if graph.degree(w) >= (1 - eps) * len(side_v)))
    if len(full) < math.floor((1 - eps) * len(witness)):
        return None
    return witness, full
