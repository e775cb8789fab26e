"""Seed/core predicates, greedy core extraction, exhaustive core census, and
the exact per-edge gain decomposition for the triangle model.

A conditioning object is an IntegerSet for AP models and a subgraph of K_n
for subgraph models; everything is reduced to coordinate masks internally.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction

from .aps import ApModel, IntegerSet
from .graphs import Graph, SubgraphModel, are_isomorphic, complete_graph
from .models import (
    conditional_mean_given_mask,
    conditioning_to_mask,
    ground_size,
    mask_to_conditioning,
    model_mean,
)
from .variational import BudgetExceededError, _masks_by_size


@dataclass(frozen=True)
class CoreParams:
    model: object
    delta: float
    eps: float
    K: float            # size/gain constant, supplied by the user
    phi_plus: float     # the value standing in for the (delta+eps)-level cost

    def __post_init__(self):
        if not 0 < self.eps < 0.5:
            raise ValueError("eps must lie in (0, 1/2)")
        if self.K <= 0 or self.phi_plus <= 0:
            raise ValueError("K and phi_plus must be positive")


@dataclass(frozen=True)
class CoreCheck:
    bias_ok: bool       # conditional mean reaches (1 + delta - eps) E[X]
    size_ok: bool       # |I| <= K phi_plus
    gain_ok: bool       # every single-element gain reaches E[X]/(K phi_plus)

    @property
    def is_core(self):
        return self.bias_ok and self.size_ok and self.gain_ok


def _single_item_masks(mask):
    while mask:
        low = mask & -mask
        yield low
        mask ^= low


def _item_key(model, single_bit_mask):
    """Human-facing key of a one-coordinate mask: an edge or an element."""
    if isinstance(model, ApModel):
        return single_bit_mask.bit_length()
    from .models import edge_index_map
    _, pairs = edge_index_map(model.n)
    return pairs[single_bit_mask.bit_length() - 1]


def item_gains(model, conditioning):
    """Exact drop of the conditional mean when one forced item is released."""
    mask = conditioning_to_mask(model, conditioning)
    full = conditional_mean_given_mask(model, mask)
    return {_item_key(model, low): full - conditional_mean_given_mask(model, mask & ~low)
            for low in _single_item_masks(mask)}


def _gains_by_bit(model, mask):
    full = conditional_mean_given_mask(model, mask)
    return full, {low: full - conditional_mean_given_mask(model, mask & ~low)
                  for low in _single_item_masks(mask)}


def is_core(params, conditioning):
    """Per-condition breakdown of the core predicate, evaluated exactly."""
    model = params.model
    mask = conditioning_to_mask(model, conditioning)
    mean = model_mean(model)
    size = bin(mask).count("1")
    cond_mean, gains = _gains_by_bit(model, mask)
    bias_ok = cond_mean >= (1 + Fraction(params.delta) - Fraction(params.eps)) * mean
    size_ok = size <= params.K * params.phi_plus
    gain_floor = mean / (Fraction(params.K) * Fraction(params.phi_plus))
    gain_ok = all(g >= gain_floor for g in gains.values())
    return CoreCheck(bias_ok=bias_ok, size_ok=size_ok, gain_ok=gain_ok)


def extract_core(model, conditioning, s):
    """Peel items whose gain falls below s/|I_original| until none is left.

    The threshold is fixed by the ORIGINAL size throughout the peeling, so
    the total loss telescopes to at most s.  Ties go to the smallest gain,
    then the smallest coordinate.
    """
    s = Fraction(s)
    if s < 0:
        raise ValueError("s must be nonnegative")
    mask = conditioning_to_mask(model, conditioning)
    original_size = bin(mask).count("1")
    if original_size == 0:
        return conditioning
    threshold = s / original_size
    while mask:
        _, gains = _gains_by_bit(model, mask)
        removable = [(g, low) for low, g in gains.items() if g < threshold]
        if not removable:
            break
        _, victim = min(removable, key=lambda t: (t[0], t[1]))
        mask &= ~victim
    return mask_to_conditioning(model, mask)


@dataclass(frozen=True)
class CoreReport:
    size: int
    count: int
    witnesses: tuple
    stability_bound: float
    passes: bool

    def to_json(self):
        items = []
        for w in self.witnesses:
            if isinstance(w, IntegerSet):
                items.append(w.elements())
            else:
                items.append(sorted(map(list, w.edges)))
        return json.dumps({
            "size": self.size,
            "count": self.count,
            "stability_bound": self.stability_bound,
            "passes": self.passes,
            "witnesses": items,
        }, sort_keys=True)


def enumerate_cores(params, m, budget=5_000_000, item_order=None):
    """Exhaustive scan of all size-m conditioning sets against the core
    predicate.  ``item_order`` permutes the iteration (used by the
    independent recount); the result set must not depend on it."""
    model = params.model
    n = ground_size(model)
    if m > n:
        return CoreReport(size=m, count=0, witnesses=(),
                          stability_bound=_stability_bound(model, params.eps, m), passes=True)
    if math.comb(n, m) > budget:
        raise BudgetExceededError(
            f"C({n},{m}) = {math.comb(n, m)} subsets exceed the budget {budget}")
    mean = model_mean(model)
    bias_floor = (1 + Fraction(params.delta) - Fraction(params.eps)) * mean
    gain_floor = mean / (Fraction(params.K) * Fraction(params.phi_plus))
    size_ok = m <= params.K * params.phi_plus
    witnesses = []
    if size_ok:
        masks = _masks_by_size(n, m)
        if item_order is not None:
            perm = list(item_order)
            if sorted(perm) != list(range(n)):
                raise ValueError("item_order must be a permutation of the coordinates")
            masks = (_permute_mask(mask, perm) for mask in _masks_by_size(n, m))
        found = set()
        for mask in masks:
            cond_mean, gains = _gains_by_bit(model, mask)
            if cond_mean >= bias_floor and all(g >= gain_floor for g in gains.values()):
                found.add(mask)
        witnesses = [mask_to_conditioning(model, mask) for mask in sorted(found)]
    bound = _stability_bound(model, params.eps, m)
    return CoreReport(size=m, count=len(witnesses), witnesses=tuple(witnesses),
                      stability_bound=bound, passes=len(witnesses) <= bound)


def _permute_mask(mask, perm):
    out = 0
    i = 0
    while mask >> i:
        if mask >> i & 1:
            out |= 1 << perm[i]
        i += 1
    return out


def _stability_bound(model, eps, m):
    return float(1 / Fraction(model.p)) ** (eps * m / 2)


# ---------------------------------------------------------------------------
# Exact per-edge gain decomposition (triangle model)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EdgeClass:
    closing: int            # third vertices adjacent to both endpoints
    one_sided: int          # third vertices adjacent to exactly one endpoint
    isolated: int           # remaining third vertices
    gain: Fraction          # (1-p)(closing + one_sided p + isolated p^2)
    inside_a: bool          # both endpoints reach the lower degree threshold
    touches_b: bool         # some endpoint reaches the higher degree threshold


def classify_core_edges(model, core_graph, threshold_a, threshold_b):
    """For each core edge, split the n-2 completing vertices by how they meet
    the core, and flag endpoint membership in the two degree classes."""
    if not isinstance(model, SubgraphModel) or not are_isomorphic(model.pattern, complete_graph(3)):
        raise ValueError("edge classification is defined for the triangle model")
    n, p = model.n, model.p
    degs = core_graph.degrees()
    class_a = {v for v in range(n) if degs[v] >= threshold_a}
    class_b = {v for v in range(n) if degs[v] >= threshold_b}
    result = {}
    for u, v in sorted(core_graph.edges):
        closing = one_sided = 0
        for w in range(n):
            if w in (u, v):
                continue
            hits = core_graph.has_edge(u, w) + core_graph.has_edge(v, w)
            if hits == 2:
                closing += 1
            elif hits == 1:
                one_sided += 1
        isolated = (n - 2) - closing - one_sided
        gain = (1 - p) * (closing + one_sided * p + isolated * p ** 2)
        result[(u, v)] = EdgeClass(
            closing=closing, one_sided=one_sided, isolated=isolated, gain=gain,
            inside_a=u in class_a and v in class_a,
            touches_b=u in class_b or v in class_b)
    return result
