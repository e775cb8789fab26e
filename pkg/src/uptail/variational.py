"""Closed-form planting costs for clique counts, minimiser classification,
planted constructions, and brute-force solvers for the minimum-cost
conditioning problem in subset and subcube form.

Closed forms live in floating point; witnesses carry exact rational
conditional means so that feasibility is never a rounding question.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

import numpy as np

from .aps import ApModel, IntegerSet, extremal_ap_count
from .graphs import Graph, SubgraphModel, complete_graph
from .models import (
    InducedSubgraphModel,
    conditional_mean_given_mask,
    conditional_mean_given_subcube,
    ground_size,
    is_monotone,
    mask_to_conditioning,
    max_value,
    model_mean,
)

ARGMIN_TOL = 1e-9


class BudgetExceededError(RuntimeError):
    """Search ran past its budget; ``best_so_far`` holds any partial result."""

    def __init__(self, message, best_so_far=None):
        super().__init__(message)
        self.best_so_far = best_so_far


class InfeasibleConstructionError(ValueError):
    """The requested planted structure does not fit in the ground set."""


# ---------------------------------------------------------------------------
# Closed-form planting costs
# ---------------------------------------------------------------------------

def mixture_cost(r, delta, c, x):
    """Normalised edge cost of a clique/hub mixture routing a fraction x of
    the excess through the hub; finite positive c only.

    The hub term is continuous at integer excess levels but has infinite
    right-slope there, so levels within 1e-9 of an integer are snapped to it
    (the fractional part of an integer is zero).
    """
    if r < 3:
        raise ValueError("r must be at least 3")
    if delta <= 0:
        raise ValueError("delta must be positive")
    if not 0 < c < math.inf:
        raise ValueError("c must be finite and positive; use the limit evaluators")
    if not 0 <= x <= 1:
        raise ValueError("x must lie in [0, 1]")
    t = x * delta * c / r
    if abs(t - round(t)) < 1e-9:
        t = round(t)
    return (delta * (1 - x)) ** (2 / r) / 2 + (math.floor(t) + (t - math.floor(t)) ** (1 / (r - 1))) / c


def mixture_cost_infinite(r, delta, x):
    """Uniform limit of the mixture cost as c grows."""
    return (delta * (1 - x)) ** (2 / r) / 2 + x * delta / r


def mixture_cost_grid(r, delta, c, xs):
    """Vectorised mixture cost over an array of x values."""
    xs = np.asarray(xs, dtype=np.float64)
    first = (delta ** (2 / r) / 2) * (1 - xs) ** (2 / r)
    if math.isinf(c):
        return first + xs * (delta / r)
    t = xs * (delta * c / r)
    nearest = np.rint(t)
    t = np.where(np.abs(t - nearest) < 1e-9, nearest, t)
    fl = np.floor(t)
    return first + (fl + (t - fl) ** (1 / (r - 1))) / c


@dataclass(frozen=True)
class MinimiserSet:
    phi: float
    argmins: tuple
    mix_point: float | None = None   # the interior candidate, when defined


def min_planting_cost(r, delta, c):
    """Minimum of the mixture cost with its attaining x values.

    c = 0 and c = inf are evaluated through their uniform limits.
    """
    if r < 3:
        raise ValueError("r must be at least 3")
    if delta <= 0:
        raise ValueError("delta must be positive")
    clique_cost = delta ** (2 / r) / 2
    if c == 0:
        return MinimiserSet(phi=clique_cost, argmins=(0.0,), mix_point=None)
    if math.isinf(c):
        hub_cost = delta / r
        phi = min(clique_cost, hub_cost)
        argmins = tuple(x for x, v in ((0.0, clique_cost), (1.0, hub_cost))
                        if v <= phi + ARGMIN_TOL)
        return MinimiserSet(phi=phi, argmins=argmins, mix_point=None)
    if c < 0:
        raise ValueError("c must be nonnegative")
    t = delta * c / r
    if abs(t - round(t)) < 1e-9:
        t = round(t)
    floor_t = math.floor(t)
    frac_t = t - floor_t
    hub_cost = (floor_t + frac_t ** (1 / (r - 1))) / c
    mix_point = r * floor_t / (delta * c) if t > 0 else 0.0
    mixed_cost = floor_t / c + (r * frac_t / c) ** (2 / r) / 2
    candidates = [(0.0, clique_cost), (mix_point, mixed_cost), (1.0, hub_cost)]
    phi = min(v for _, v in candidates)
    argmins = sorted({round(x, 15) for x, v in candidates if v <= phi + ARGMIN_TOL})
    return MinimiserSet(phi=phi, argmins=tuple(argmins), mix_point=mix_point)


def clique_hub_crossover(r, lo=1e-9, hi=None, tol=1e-12):
    """The delta at which the pure-clique and pure-hub costs cross (c = inf),
    located by bisection on their difference."""
    if hi is None:
        hi = float(r ** 3)

    def gap(d):
        return d ** (2 / r) / 2 - d / r

    if gap(lo) <= 0:
        raise ValueError("no sign change: lower end already favours the clique")
    while gap(hi) > 0:
        hi *= 2
    for _ in range(200):
        mid = (lo + hi) / 2
        if gap(mid) > 0:
            lo = mid
        else:
            hi = mid
        if hi - lo < tol:
            break
    return (lo + hi) / 2


def poisson_rate(delta, mean):
    """((1+d) log(1+d) - d) * mean."""
    if delta < 0 or mean < 0:
        raise ValueError("delta and mean must be nonnegative")
    if delta == 0:
        return 0.0
    return ((1 + delta) * math.log(1 + delta) - delta) * mean


# ---------------------------------------------------------------------------
# Independence polynomial (reporting aid for the regular-pattern rate)
# ---------------------------------------------------------------------------

def independence_polynomial(graph):
    """Coefficients [i_0, i_1, ...]: number of independent sets by size."""
    counts = [0] * (graph.n + 1)
    adj = graph.adjacency_masks()
    verts = list(range(graph.n))

    def grow(idx, chosen, forbidden):
        counts[chosen] += 1
        for v in verts[idx:]:
            if not forbidden >> v & 1:
                grow(v + 1, chosen + 1, forbidden | adj[v] | 1 << v)

    grow(0, 0, 0)
    return counts


def theta_root(graph, delta, tol=1e-12):
    """Positive solution of (independence polynomial)(theta) = 1 + delta."""
    coeffs = independence_polynomial(graph)

    def poly(x):
        return sum(ck * x ** k for k, ck in enumerate(coeffs))

    lo, hi = 0.0, 1.0
    while poly(hi) < 1 + delta:
        hi *= 2
    for _ in range(200):
        mid = (lo + hi) / 2
        if poly(mid) < 1 + delta:
            lo = mid
        else:
            hi = mid
        if hi - lo < tol:
            break
    return (lo + hi) / 2


# ---------------------------------------------------------------------------
# Witnesses
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Witness:
    kind: str                     # subset | subcube | graph
    payload: object               # IntegerSet | (IntegerSet ones, IntegerSet zeros) | Graph
    log_cost: float
    conditional_mean: Fraction | None
    feasible: bool

    def to_json(self):
        if self.kind == "graph" and self.payload is not None:
            payload = {"n": self.payload.n, "edges": sorted(map(list, self.payload.edges))}
        elif self.kind == "subset" and self.payload is not None:
            payload = {"elements": self.payload.elements()}
        elif self.kind == "subcube" and self.payload is not None:
            ones, zeros = self.payload
            payload = {"fixed_one": ones.elements(), "fixed_zero": zeros.elements()}
        else:
            payload = None
        mean = None if self.conditional_mean is None else \
            f"{self.conditional_mean.numerator}/{self.conditional_mean.denominator}"
        return json.dumps({
            "kind": self.kind,
            "payload": payload,
            "log_cost": self.log_cost if math.isfinite(self.log_cost) else "inf",
            "conditional_mean": mean,
            "feasible": self.feasible,
        }, sort_keys=True)


def _witness_kind(model):
    return "subset" if isinstance(model, ApModel) else "graph"


def _snap_ceil(x, tol=1e-9):
    nearest = round(x)
    return nearest if abs(x - nearest) < tol else math.ceil(x)


def _snap_floor(x, tol=1e-9):
    nearest = round(x)
    return nearest if abs(x - nearest) < tol else math.floor(x)


def _feasibility(model, cond_mean, delta):
    return cond_mean >= (1 + Fraction(delta)) * model_mean(model)


def _graph_witness(model, graph, delta):
    from .graphs import conditional_expectation_subgraph
    mean = conditional_expectation_subgraph(model, graph)
    return Witness(kind="graph", payload=graph,
                   log_cost=graph.num_edges * math.log(1 / float(model.p)),
                   conditional_mean=mean,
                   feasible=_feasibility(model, mean, delta))


def build_construction(kind, model, delta):
    """Plant a clique, a hub, or an initial interval sized for excess delta.

    The witness carries the exact conditional mean; ``feasible`` records
    whether the target (1+delta) multiple of the mean is actually met.
    """
    if delta <= 0:
        raise ValueError("delta must be positive")
    if kind == "clique":
        if not isinstance(model, SubgraphModel):
            raise TypeError("clique construction applies to subgraph models")
        degs = model.pattern.degrees()
        if len(set(degs)) != 1:
            raise InfeasibleConstructionError("clique sizing needs a regular pattern")
        v_h, deg = model.pattern.n, degs[0]
        size = _snap_ceil((1 + delta) ** (1 / v_h) * model.n * float(model.p) ** (deg / 2))
        if size > model.n:
            raise InfeasibleConstructionError(
                f"clique needs {size} vertices, host has {model.n}")
        clique = Graph(model.n, frozenset(combinations(range(size), 2)))
        return _graph_witness(model, clique, delta)

    if kind == "hub":
        if not isinstance(model, SubgraphModel):
            raise TypeError("hub construction applies to subgraph models")
        r = model.pattern.n
        if model.pattern.num_edges != r * (r - 1) // 2:
            raise InfeasibleConstructionError("hub sizing needs a complete pattern")
        ell = delta * model.n * float(model.p) ** (r - 1) / r
        hub_size = _snap_floor(ell)
        if hub_size + 1 >= model.n:
            raise InfeasibleConstructionError(
                f"hub core of {hub_size} vertices leaves no outside vertices")
        centre_u = 0
        core = list(range(1, hub_size + 1))
        outside = list(range(hub_size + 1, model.n))
        frac = max(ell - hub_size, 0.0)
        star_edges = _snap_floor(frac ** (1 / (r - 1)) * len(outside)) if frac > 0 else 0
        edges = {(a, b) for a in core for b in outside}
        edges |= {(centre_u, b) for b in outside[:star_edges]}
        hub = Graph(model.n, frozenset(edges))
        return _graph_witness(model, hub, delta)

    if kind == "interval":
        if not isinstance(model, ApModel):
            raise TypeError("interval construction applies to AP models")
        p, k = model.p, model.k
        target = Fraction(delta) * p ** k * extremal_ap_count(model.N, k) / (1 - p ** k)
        size = next((m for m in range(model.N + 1) if extremal_ap_count(m, k) >= target),
                    None)
        if size is None:
            raise InfeasibleConstructionError("no initial interval inside [N] reaches the target")
        subset = IntegerSet.from_elements(range(1, size + 1))
        from .aps import conditional_expectation_ap
        mean = conditional_expectation_ap(model, subset)
        return Witness(kind="subset", payload=subset,
                       log_cost=size * math.log(1 / float(p)),
                       conditional_mean=mean,
                       feasible=_feasibility(model, mean, delta))

    raise ValueError(f"unknown construction kind {kind!r}")


# ---------------------------------------------------------------------------
# Brute-force solvers
# ---------------------------------------------------------------------------

def _masks_by_size(n_coords, size):
    """Same-popcount masks in increasing numeric order (Gosper's hack)."""
    if size == 0:
        yield 0
        return
    mask = (1 << size) - 1
    limit = 1 << n_coords
    while mask < limit:
        yield mask
        low = mask & -mask
        ripple = mask + low
        mask = ripple | ((mask ^ ripple) >> (low.bit_length() + 1))


def min_conditioning_witness(model, delta, budget=1 << 22):
    """Smallest set of forced-on coordinates pushing the conditional mean to
    (1+delta) times the mean; ties broken by smallest bitmask."""
    n = ground_size(model)
    if not is_monotone(model):
        raise TypeError("subset search applies to monotone models")
    threshold = (1 + Fraction(delta)) * model_mean(model)
    log_unit = math.log(1 / float(model.p))
    examined = 0
    for size in range(n + 1):
        for mask in _masks_by_size(n, size):
            examined += 1
            if examined > budget:
                raise BudgetExceededError(
                    f"examined {examined - 1} subsets without concluding", best_so_far=None)
            mean = conditional_mean_given_mask(model, mask)
            if mean >= threshold:
                return Witness(kind=_witness_kind(model),
                               payload=mask_to_conditioning(model, mask),
                               log_cost=size * log_unit,
                               conditional_mean=mean, feasible=True)
    return Witness(kind=_witness_kind(model), payload=None, log_cost=math.inf,
                   conditional_mean=None, feasible=False)


def min_subcube_witness(model, delta, budget=1 << 22):
    """Cheapest subcube (coordinates fixed to 0/1) with conditional mean at
    least (1+delta) times the mean; cost weighs ones by log(1/p) and zeros by
    log(1/(1-p))."""
    n = ground_size(model)
    p = float(model.p)
    cost_one, cost_zero = math.log(1 / p), math.log(1 / (1 - p))
    threshold = (1 + Fraction(delta)) * model_mean(model)
    best = None
    examined = 0
    for size in range(n + 1):
        for support in _masks_by_size(n, size):
            sub = support
            while True:
                ones = sub
                zeros = support & ~sub
                examined += 1
                if examined > budget:
                    raise BudgetExceededError(
                        f"examined {examined - 1} subcubes without concluding",
                        best_so_far=_subcube_witness_from(model, best))
                cost = bin(ones).count("1") * cost_one + bin(zeros).count("1") * cost_zero
                if best is None or cost < best[0] - 1e-15:
                    if conditional_mean_given_subcube(model, ones, zeros) >= threshold:
                        mean = conditional_mean_given_subcube(model, ones, zeros)
                        best = (cost, size, ones, zeros, mean)
                if sub == 0:
                    break
                sub = (sub - 1) & support
    return _subcube_witness_from(model, best)


def _subcube_witness_from(model, best):
    if best is None:
        return Witness(kind="subcube", payload=None, log_cost=math.inf,
                       conditional_mean=None, feasible=False)
    cost, _, ones, zeros, mean = best
    return Witness(kind="subcube",
                   payload=(IntegerSet(ones), IntegerSet(zeros)),
                   log_cost=cost, conditional_mean=mean, feasible=True)


def tail_log_upper_bound(model, delta, eps, phi_value):
    """Planting cost plus the boundedness correction: an upper bound on the
    negative log upper-tail probability (monotone models)."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    if math.isinf(phi_value):
        return math.inf
    ceiling = max_value(model)
    mean = float(model_mean(model))
    if eps * mean >= ceiling:
        warnings.warn("eps * mean reaches the maximum of the count; bound degenerates",
                      RuntimeWarning, stacklevel=2)
    return phi_value + math.log(ceiling / (eps * mean))
