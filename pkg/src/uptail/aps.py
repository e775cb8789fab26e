"""Exact arithmetic-progression counting over subsets of {1,...,N}.

Progressions are enumerated by (first element, common difference b > 0),
so degenerate b = 0 runs are excluded and each progression is counted once.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache


@dataclass(frozen=True)
class IntegerSet:
    """Subset of {1,...,N} stored as a bitmask (bit i-1 <-> element i)."""

    mask: int = 0

    @classmethod
    def from_elements(cls, elements):
        mask = 0
        for e in elements:
            if e < 1:
                raise ValueError("elements must be >= 1")
            mask |= 1 << (e - 1)
        return cls(mask)

    def elements(self):
        return [i + 1 for i in range(self.mask.bit_length()) if self.mask >> i & 1]

    def __len__(self):
        return bin(self.mask).count("1")

    def __contains__(self, element):
        return element >= 1 and self.mask >> (element - 1) & 1 == 1

    def union(self, other):
        return IntegerSet(self.mask | other.mask)

    def add(self, element):
        return IntegerSet(self.mask | 1 << (element - 1))

    def remove(self, element):
        return IntegerSet(self.mask & ~(1 << (element - 1)))

    def issubset(self, other):
        return self.mask & ~other.mask == 0

    def to_json(self):
        return json.dumps({"elements": self.elements(), "hex": hex(self.mask)})

    @classmethod
    def from_json(cls, text):
        data = json.loads(text)
        if "elements" in data:
            return cls.from_elements(data["elements"])
        return cls(int(data["hex"], 16))


def full_set(n):
    return IntegerSet((1 << n) - 1)


@dataclass(frozen=True)
class ApModel:
    """k-term progressions in the p-random subset of {1,...,N}."""

    N: int
    k: int
    p: Fraction

    def __post_init__(self):
        object.__setattr__(self, "p", Fraction(self.p))
        if self.k < 2:
            raise ValueError("k must be at least 2")
        if self.N < 0:
            raise ValueError("N must be nonnegative")
        if not 0 < self.p < 1:
            raise ValueError("p must lie strictly between 0 and 1")


@lru_cache(maxsize=128)
def progression_masks(n, k):
    """Bitmasks of every k-term progression inside {1,...,n}."""
    masks = []
    if k < 2:
        raise ValueError("k must be at least 2")
    for diff in range(1, n):
        span = (k - 1) * diff
        if span >= n:
            break
        for start in range(1, n - span + 1):
            mask = 0
            for j in range(k):
                mask |= 1 << (start + j * diff - 1)
            masks.append(mask)
    return tuple(masks)


def count_aps(subset, k, universe=None):
    """Number of k-term progressions fully inside ``subset``.

    ``universe`` defaults to the largest element present.
    """
    if k < 2:
        raise ValueError("k must be at least 2")
    n = universe if universe is not None else subset.mask.bit_length()
    mask = subset.mask
    return sum(1 for m in progression_masks(n, k) if m & mask == m)


def extremal_ap_count(m, k):
    """Progression count of the initial interval {1,...,m}: sum of floor((i-1)/(k-1))."""
    if m < 0:
        raise ValueError("m must be nonnegative")
    if k < 2:
        raise ValueError("k must be at least 2")
    # closed form of the floor sum: m = q(k-1)+r with 0 <= r < k-1
    q, r = divmod(m, k - 1)
    return (k - 1) * q * (q - 1) // 2 + r * q


@dataclass(frozen=True)
class ApProfile:
    by_overlap: tuple          # a_j = #progressions meeting the set in j points
    per_element: dict          # i -> #progressions through i inside set+{i}


def ap_profile(model, subset):
    """Overlap counts a_0..a_k and per-element progression counts."""
    masks = progression_masks(model.N, model.k)
    a = [0] * (model.k + 1)
    per_element = {i: 0 for i in range(1, model.N + 1)}
    smask = subset.mask
    for m in masks:
        overlap = bin(m & smask).count("1")
        a[overlap] += 1
        if overlap == model.k:
            rest = m
            while rest:
                low = rest & -rest
                per_element[low.bit_length()] += 1
                rest ^= low
        elif overlap == model.k - 1:
            outside = m & ~smask
            per_element[outside.bit_length()] += 1
    return ApProfile(by_overlap=tuple(a), per_element=per_element)


def conditional_expectation_ap(model, subset):
    """E[X | subset present] = sum_j a_j(I) p^{k-j}, exact."""
    if not 0 < model.p < 1:
        raise ValueError("p outside (0,1)")
    profile = ap_profile(model, subset)
    p = model.p
    return sum((a_j * p ** (model.k - j) for j, a_j in enumerate(profile.by_overlap)),
               Fraction(0))


def ap_mean(model):
    return extremal_ap_count(model.N, model.k) * model.p ** model.k
