"""Coordinate-level view of the counting models.

Every model exposes the same small surface: a ground set of Bernoulli
coordinates, the value of the count on a given outcome, its exact mean, and
exact conditional means given forced coordinates.  Subset/graph objects are
translated to coordinate bitmasks here so that the solvers and the core
machinery can stay model-agnostic.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations

from .aps import ApModel, IntegerSet, progression_masks
from .graphs import Graph, SubgraphModel, _embeddings, _normalize_edge, complete_graph, model_copies, to_graph6


@dataclass(frozen=True)
class InducedSubgraphModel:
    """Count induced copies of ``pattern`` in G(n, p).

    Not monotone: each placement requires its non-edges to be absent.
    """

    pattern: Graph
    n: int
    p: Fraction

    def __post_init__(self):
        object.__setattr__(self, "p", Fraction(self.p))
        if not 0 < self.p < 1:
            raise ValueError("p must lie strictly between 0 and 1")
        if self.pattern.n < 1:
            raise ValueError("pattern must have at least one vertex")


def edge_index_map(n):
    """Fixed bijection between edges of K_n and coordinates 0..C(n,2)-1."""
    pairs = list(combinations(range(n), 2))
    return {e: i for i, e in enumerate(pairs)}, pairs


def ground_size(model):
    if isinstance(model, (SubgraphModel, InducedSubgraphModel)):
        return model.n * (model.n - 1) // 2
    if isinstance(model, ApModel):
        return model.N
    raise TypeError(f"unsupported model {type(model).__name__}")


def is_monotone(model):
    return isinstance(model, (SubgraphModel, ApModel))


@lru_cache(maxsize=256)
def _monomial_masks_subgraph(pattern_key, n):
    from .graphs import parse_graph6
    index, _ = edge_index_map(n)
    model = SubgraphModel(parse_graph6(pattern_key), n, Fraction(1, 2))
    masks = []
    for copy in model_copies(model):
        mask = 0
        for e in copy:
            mask |= 1 << index[e]
        masks.append(mask)
    return tuple(masks)


@lru_cache(maxsize=256)
def _placement_masks_induced(pattern_key, n):
    """(present-mask, absent-mask) per placement of the pattern in K_n."""
    from .graphs import parse_graph6
    pattern = parse_graph6(pattern_key)
    index, _ = edge_index_map(n)
    host = complete_graph(n)
    placements = set()
    if pattern.num_edges > 0 and all(d > 0 for d in pattern.degrees()):
        maps = _embeddings(pattern, host)
        support = list(range(pattern.n))
    else:
        # patterns with isolated vertices: place vertex sets directly
        maps = (perm for verts in combinations(range(n), pattern.n)
                for perm in _permutations_of(verts))
        support = list(range(pattern.n))
    for phi in maps:
        verts = frozenset(phi[v] for v in support)
        present = frozenset(_normalize_edge(phi[u], phi[v]) for u, v in pattern.edges)
        all_pairs = frozenset(_normalize_edge(u, v) for u, v in combinations(sorted(verts), 2))
        placements.add((present, all_pairs - present))
    masks = []
    for present, absent in sorted(placements, key=lambda t: (sorted(map(sorted, t[0])), sorted(map(sorted, t[1])))):
        pmask = 0
        for e in present:
            pmask |= 1 << index[e]
        amask = 0
        for e in absent:
            amask |= 1 << index[e]
        masks.append((pmask, amask))
    return tuple(masks)


def _permutations_of(verts):
    from itertools import permutations
    return permutations(verts)


def monomial_masks(model):
    """Coordinate bitmasks of the monomials (monotone models only)."""
    if isinstance(model, SubgraphModel):
        return _monomial_masks_subgraph(to_graph6(model.pattern), model.n)
    if isinstance(model, ApModel):
        return progression_masks(model.N, model.k)
    raise TypeError("monomial masks exist only for monotone models")


def placement_masks(model):
    if isinstance(model, InducedSubgraphModel):
        return _placement_masks_induced(to_graph6(model.pattern), model.n)
    raise TypeError("placement masks exist only for induced models")


def model_degree(model):
    """Largest number of coordinates a single monomial touches."""
    if isinstance(model, SubgraphModel):
        return model.pattern.num_edges
    if isinstance(model, ApModel):
        return model.k
    if isinstance(model, InducedSubgraphModel):
        return model.pattern.n * (model.pattern.n - 1) // 2
    raise TypeError(f"unsupported model {type(model).__name__}")


def value_on_outcome(model, ones_mask):
    """X evaluated at the outcome whose 1-coordinates are ``ones_mask``."""
    if is_monotone(model):
        return sum(1 for m in monomial_masks(model) if m & ones_mask == m)
    total = 0
    for pmask, amask in placement_masks(model):
        if pmask & ones_mask == pmask and amask & ones_mask == 0:
            total += 1
    return total


def model_mean(model):
    p = Fraction(model.p)
    if is_monotone(model):
        return sum((p ** bin(m).count("1") for m in monomial_masks(model)), Fraction(0))
    q = 1 - p
    return sum((p ** bin(pm).count("1") * q ** bin(am).count("1")
                for pm, am in placement_masks(model)), Fraction(0))


def max_value(model):
    """Largest possible value of the count (all coordinates on, for monotone)."""
    if isinstance(model, SubgraphModel):
        return len(model_copies(model))
    if isinstance(model, ApModel):
        from .aps import extremal_ap_count
        return extremal_ap_count(model.N, model.k)
    return max(value_on_outcome(model, y) for y in range(1 << ground_size(model)))


def conditional_mean_given_mask(model, ones_mask):
    """E[X | the coordinates in ``ones_mask`` are 1], exact (monotone models)."""
    if not is_monotone(model):
        raise TypeError("use conditional_mean_given_subcube for non-monotone models")
    p = Fraction(model.p)
    powers = {}
    total = Fraction(0)
    for m in monomial_masks(model):
        missing = bin(m & ~ones_mask).count("1")
        if missing not in powers:
            powers[missing] = p ** missing
        total += powers[missing]
    return total


def conditional_mean_given_subcube(model, ones_mask, zeros_mask):
    """E[X | fixed coordinates], exact, for monotone and induced models."""
    if ones_mask & zeros_mask:
        raise ValueError("a coordinate cannot be fixed to both 0 and 1")
    p = Fraction(model.p)
    if is_monotone(model):
        total = Fraction(0)
        for m in monomial_masks(model):
            if m & zeros_mask:
                continue
            total += p ** bin(m & ~ones_mask).count("1")
        return total
    q = 1 - p
    total = Fraction(0)
    for pmask, amask in placement_masks(model):
        if pmask & zeros_mask or amask & ones_mask:
            continue
        total += p ** bin(pmask & ~ones_mask).count("1") * q ** bin(amask & ~zeros_mask).count("1")
    return total


# ---------------------------------------------------------------------------
# Translating model-level objects (graphs, integer sets) to coordinate masks
# ---------------------------------------------------------------------------

def graph_to_mask(model, subgraph):
    index, _ = edge_index_map(model.n)
    mask = 0
    for e in subgraph.edges:
        mask |= 1 << index[e]
    return mask


def mask_to_graph(model, mask):
    _, pairs = edge_index_map(model.n)
    edges = frozenset(pairs[i] for i in range(len(pairs)) if mask >> i & 1)
    return Graph(model.n, edges)


def subset_to_mask(model, subset):
    return subset.mask


def mask_to_subset(model, mask):
    return IntegerSet(mask)


def conditioning_to_mask(model, conditioning):
    if isinstance(model, (SubgraphModel, InducedSubgraphModel)):
        if not isinstance(conditioning, Graph):
            raise TypeError("graph models condition on Graph objects")
        return graph_to_mask(model, conditioning)
    if isinstance(model, ApModel):
        if not isinstance(conditioning, IntegerSet):
            raise TypeError("AP models condition on IntegerSet objects")
        return subset_to_mask(model, conditioning)
    raise TypeError(f"unsupported model {type(model).__name__}")


def mask_to_conditioning(model, mask):
    if isinstance(model, (SubgraphModel, InducedSubgraphModel)):
        return mask_to_graph(model, mask)
    return mask_to_subset(model, mask)
