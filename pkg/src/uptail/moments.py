"""Exact distributions on the p-biased hypercube, factorial moments both
ways, the Markov-side Poisson bound, dependency-graph cluster censuses, and
the hypergeometric second-moment check.

Everything probabilistic here is an exact rational; logs and exp only appear
in the final bound values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

import numpy as np

from .graphs import SubgraphModel
from .models import (
    conditional_mean_given_mask,
    ground_size,
    is_monotone,
    model_degree,
    model_mean,
    monomial_masks,
    placement_masks,
)
from .variational import BudgetExceededError, _masks_by_size

MAX_COORDS = 22


@dataclass(frozen=True)
class ExactDist:
    pmf: dict               # value -> Fraction
    n_outcomes: int

    def mean(self):
        return sum((Fraction(v) * pr for v, pr in self.pmf.items()), Fraction(0))

    def tail_at_least(self, threshold):
        """P(X >= threshold), exact for a rational threshold."""
        threshold = Fraction(threshold)
        return sum((pr for v, pr in self.pmf.items() if v >= threshold), Fraction(0))

    def to_json(self):
        import json
        return json.dumps(
            {str(v): f"{pr.numerator}/{pr.denominator}" for v, pr in sorted(self.pmf.items())},
            sort_keys=True)


def exact_distribution(model):
    """Full enumeration of the 2^N outcomes into an exact pmf of the count."""
    n = ground_size(model)
    if n > MAX_COORDS:
        raise BudgetExceededError(f"{n} coordinates exceed the {MAX_COORDS}-coordinate cap")
    outcomes = np.arange(1 << n, dtype=np.uint32)
    values = np.zeros(1 << n, dtype=np.int32)
    if is_monotone(model):
        for mask in monomial_masks(model):
            values[(outcomes & np.uint32(mask)) == mask] += 1
    else:
        for pmask, amask in placement_masks(model):
            hit = (outcomes & np.uint32(pmask)) == pmask
            hit &= (outcomes & np.uint32(amask)) == 0
            values[hit] += 1
    pops = np.bitwise_count(outcomes).astype(np.int64)
    joint = values.astype(np.int64) * (n + 1) + pops
    counts = np.bincount(joint, minlength=(int(values.max()) + 1) * (n + 1))

    p = Fraction(model.p)
    q = 1 - p
    weight = [p ** j * q ** (n - j) for j in range(n + 1)]
    pmf = {}
    for v in range(int(values.max()) + 1):
        total = Fraction(0)
        for j in range(n + 1):
            c = int(counts[v * (n + 1) + j]) if v * (n + 1) + j < len(counts) else 0
            if c:
                total += c * weight[j]
        if total:
            pmf[v] = total
    assert sum(pmf.values()) == 1
    return ExactDist(pmf=pmf, n_outcomes=1 << n)


# ---------------------------------------------------------------------------
# Factorial moments
# ---------------------------------------------------------------------------

def _falling(value, t):
    out = 1
    for i in range(t):
        out *= value - i
    return out


def factorial_moments_from_dist(dist, t_max):
    return [sum((Fraction(_falling(v, t)) * pr for v, pr in dist.pmf.items()), Fraction(0))
            for t in range(t_max + 1)]


def factorial_moments_tuple_sum(model, t_max, budget=2_000_000):
    """M_t as the sum over ordered t-tuples of distinct monomials of
    p^{|union|}; exact, no early exit."""
    if not is_monotone(model):
        raise TypeError("tuple-sum moments are defined for monotone models")
    masks = monomial_masks(model)
    p = Fraction(model.p)
    moments = [Fraction(1)]
    visited = 0

    def recurse(depth, used_indices, union, limit):
        nonlocal visited, acc
        if depth == limit:
            visited += 1
            if visited > budget:
                raise BudgetExceededError(f"more than {budget} tuples at t={limit}")
            acc += p ** bin(union).count("1")
            return
        for i in range(len(masks)):
            if i in used_indices:
                continue
            used_indices.add(i)
            recurse(depth + 1, used_indices, union | masks[i], limit)
            used_indices.discard(i)

    for t in range(1, t_max + 1):
        acc = Fraction(0)
        recurse(0, set(), 0, t)
        moments.append(acc)
    return moments


@dataclass(frozen=True)
class FactorialMoments:
    from_dist: list
    from_tuples: list | None


def factorial_moments(model, t_max, tuple_budget=2_000_000):
    """Both computations of M_0..M_{t_max}; the tuple route degrades to None
    past its budget."""
    dist = exact_distribution(model)
    from_dist = factorial_moments_from_dist(dist, t_max)
    try:
        from_tuples = factorial_moments_tuple_sum(model, t_max, budget=tuple_budget)
    except BudgetExceededError:
        from_tuples = None
    return FactorialMoments(from_dist=from_dist, from_tuples=from_tuples)


def poisson_markov_bound(model, delta, t, dist=None):
    """log ff((1+delta) mu, t) - log M_t: a lower bound on the negative log
    tail for any integer-valued nonnegative count."""
    mean = model_mean(model)
    if t < 1 or Fraction(t) > (1 + Fraction(delta)) * mean:
        raise ValueError("t must satisfy 1 <= t <= (1+delta) E[X]")
    if dist is None:
        dist = exact_distribution(model)
    m_t = factorial_moments_from_dist(dist, t)[t]
    if m_t <= 0:
        return math.inf
    x = float((1 + Fraction(delta)) * mean)
    log_ff = sum(math.log(x - i) for i in range(t))
    return log_ff - math.log(m_t)


def falling_factorial_log(x, t):
    """Split log ff(x+t, t) into its integral main term and the remainder,
    which the comparison argument confines to [0, (t+1)/x]."""
    if x <= 0:
        raise ValueError("x must be positive")
    if t < 0:
        raise ValueError("t must be nonnegative")
    if t == 0:
        return 0.0, 0.0
    ratio = t / x
    main = ((1 + ratio) * math.log1p(ratio) - ratio) * x + t * math.log(x)
    exact = math.lgamma(x + t + 1) - math.lgamma(x + 1)
    return main, exact - main


# ---------------------------------------------------------------------------
# Dependency-graph cluster censuses
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Hypergraph:
    n_vertices: int
    edges: tuple            # vertex bitmasks

    @property
    def uniformity(self):
        sizes = {bin(e).count("1") for e in self.edges}
        return sizes.pop() if len(sizes) == 1 else None

    def __post_init__(self):
        if len(set(self.edges)) != len(self.edges):
            raise ValueError("hyperedges must be distinct")


def ap_hypergraph(n, k):
    from .aps import progression_masks
    return Hypergraph(n_vertices=n, edges=tuple(progression_masks(n, k)))


def subgraph_hypergraph(model):
    """Vertices are the edge slots of K_n; hyperedges are the pattern copies."""
    return Hypergraph(n_vertices=ground_size(model), edges=tuple(monomial_masks(model)))


def _connected_subsets(adjacency, max_size):
    """Every connected vertex set of the dependency graph, once each."""
    count = len(adjacency)
    results = []

    def grow(current, members, frontier_forbidden):
        results.append(tuple(members))
        if len(members) == max_size:
            return
        neighborhood = 0
        for v in members:
            neighborhood |= adjacency[v]
        candidates = neighborhood & ~current & ~frontier_forbidden
        forbidden = frontier_forbidden
        w = candidates
        while w:
            low = w & -w
            v = low.bit_length() - 1
            w ^= low
            grow(current | low, members + [v], forbidden)
            forbidden |= low

    for start in range(count):
        grow(1 << start, [start], (1 << (start + 1)) - 1)
    return results


@dataclass(frozen=True)
class ClusterCensus:
    by_size: dict           # s -> exact E[#clusters of s edges fully present]
    by_size_km: dict | None  # (s, k, m) -> exact expectation (graph models)

    def to_csv(self):
        """Rows s,k,m,expectation; k and m are blank for the coarse census."""
        lines = ["s,k,m,expectation"]
        if self.by_size_km is not None:
            for (s, k, m), value in sorted(self.by_size_km.items()):
                lines.append(f"{s},{k},{m},{value.numerator}/{value.denominator}")
        else:
            for s, value in sorted(self.by_size.items()):
                lines.append(f"{s},,,{value.numerator}/{value.denominator}")
        return "\n".join(lines)


def dependency_clusters(hypergraph, p, s_max):
    """E[D_s] for s <= s_max: sum over connected s-sets of p^{|union|}."""
    p = Fraction(p)
    edges = hypergraph.edges
    adjacency = []
    for i, e in enumerate(edges):
        mask = 0
        for j, f in enumerate(edges):
            if i != j and e & f:
                mask |= 1 << j
        adjacency.append(mask)
    by_size = {s: Fraction(0) for s in range(1, s_max + 1)}
    for members in _connected_subsets(adjacency, s_max):
        union = 0
        for idx in members:
            union |= edges[idx]
        by_size[len(members)] += p ** bin(union).count("1")
    return ClusterCensus(by_size=by_size, by_size_km=None)


def subgraph_cluster_census(model, s_max):
    """Cluster census for a subgraph model with the (s, k, m) refinement:
    k spanned vertices and m edges of the cluster union."""
    from .models import edge_index_map
    hypergraph = subgraph_hypergraph(model)
    _, pairs = edge_index_map(model.n)
    p = Fraction(model.p)
    edges = hypergraph.edges
    adjacency = []
    for i, e in enumerate(edges):
        mask = 0
        for j, f in enumerate(edges):
            if i != j and e & f:
                mask |= 1 << j
        adjacency.append(mask)
    by_size = {s: Fraction(0) for s in range(1, s_max + 1)}
    by_km = {}
    for members in _connected_subsets(adjacency, s_max):
        union = 0
        for idx in members:
            union |= edges[idx]
        m = bin(union).count("1")
        spanned = set()
        rest = union
        while rest:
            low = rest & -rest
            spanned.update(pairs[low.bit_length() - 1])
            rest ^= low
        key = (len(members), len(spanned), m)
        term = p ** m
        by_size[len(members)] += term
        by_km[key] = by_km.get(key, Fraction(0)) + term
    return ClusterCensus(by_size=by_size, by_size_km=by_km)


def ap_cluster_union_count(n, k, m, budget=20_000_000):
    """Number of m-element subsets of {1..n} that are the union of a single
    cluster of k-term progressions.

    A set qualifies iff some connected component of the progressions inside
    it covers it entirely.
    """
    if m < k:
        return 0
    if math.comb(n, m) * max(1, len(ap_hypergraph(n, k).edges)) > budget:
        raise BudgetExceededError(f"scanning C({n},{m}) subsets exceeds the budget")
    from .aps import progression_masks
    masks = progression_masks(n, k)
    count = 0
    for chosen in combinations(range(n), m):
        smask = 0
        for v in chosen:
            smask |= 1 << v
        inside = [q for q in masks if q & smask == q]
        if not inside:
            continue
        # connected components of the progressions inside the set
        remaining = list(inside)
        covered = False
        while remaining:
            component = remaining.pop()
            changed = True
            while changed:
                changed = False
                for q in remaining[:]:
                    if q & component:
                        component |= q
                        remaining.remove(q)
                        changed = True
            if component == smask:
                covered = True
                break
        if covered:
            count += 1
    return count


# ---------------------------------------------------------------------------
# Hypergeometric second-moment (Janson-style) check
# ---------------------------------------------------------------------------

def hypergeometric_janson_check(family, t, s, eps):
    """Exact lower-tail probability of the hypergeometric cover count versus
    the 2 exp(-eps^2 mu^2 / (2(mu+Delta))) bound.

    ``family`` lists subsets of range(t); S is a uniform s-subset; Z counts
    members contained in S.
    """
    if not 0 <= s <= t:
        raise ValueError("s must lie between 0 and t")
    members = [frozenset(b) for b in family]
    ratio = Fraction(s, t) if t else Fraction(0)
    mu = sum((ratio ** len(b) for b in members), Fraction(0))
    delta_term = Fraction(0)
    for i, b1 in enumerate(members):
        for j, b2 in enumerate(members):
            if i != j and b1 & b2:
                delta_term += ratio ** len(b1 | b2)
    cut = (1 - Fraction(eps)) * mu
    hits = 0
    total = 0
    for chosen in combinations(range(t), s):
        total += 1
        pack = set(chosen)
        z = sum(1 for b in members if b <= pack)
        if z <= cut:
            hits += 1
    exact = Fraction(hits, total) if total else Fraction(1)
    if mu + delta_term > 0:
        exponent = -float(eps) ** 2 * float(mu) ** 2 / (2 * float(mu + delta_term))
    else:
        exponent = 0.0
    bound = 2 * math.exp(exponent)
    return exact, bound, float(exact) <= bound + 1e-12


# ---------------------------------------------------------------------------
# Exact verification of the blocked-tail moment inequality
# ---------------------------------------------------------------------------

def stability_inequality_check(model, delta, eps, ell):
    """P(X >= (1+delta)E[X] and no qualifying set fully present) versus
    ((1+delta-eps)/(1+delta))^ell, everything on the left exact.

    Qualifying sets are those of at most degree*ell coordinates whose
    conditional mean reaches (1+delta-eps)E[X].
    """
    n = ground_size(model)
    if n > MAX_COORDS:
        raise BudgetExceededError(f"{n} coordinates exceed the {MAX_COORDS}-coordinate cap")
    if ell < 1:
        raise ValueError("ell must be a positive integer")
    mean = model_mean(model)
    bias_floor = (1 + Fraction(delta) - Fraction(eps)) * mean
    tail_floor = (1 + Fraction(delta)) * mean
    size_cap = min(n, model_degree(model) * ell)
    blockers = []
    for size in range(size_cap + 1):
        for mask in _masks_by_size(n, size):
            if conditional_mean_given_mask(model, mask) >= bias_floor:
                blockers.append(mask)
    p = Fraction(model.p)
    q = 1 - p
    weight = [p ** j * q ** (n - j) for j in range(n + 1)]
    masks = monomial_masks(model) if is_monotone(model) else None
    lhs = Fraction(0)
    for outcome in range(1 << n):
        value = sum(1 for m in masks if m & outcome == m)
        if Fraction(value) < tail_floor:
            continue
        if any(b & outcome == b for b in blockers):
            continue
        lhs += weight[bin(outcome).count("1")]
    bound = ((1 + delta - eps) / (1 + delta)) ** ell
    return lhs, bound, float(lhs) <= bound + 1e-12, len(blockers)
