"""Labeled simple graphs, graph6 I/O, embedding enumeration, and exact
conditional expectations for subgraph-count models.

All expectations are exact rationals; enumeration is plain backtracking,
which is plenty for host graphs of a dozen vertices or so.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations


class Graph6Error(ValueError):
    """Malformed graph6 input; carries the byte offset of the problem."""

    def __init__(self, message, offset):
        super().__init__(f"{message} (byte offset {offset})")
        self.offset = offset


def _normalize_edge(u, v):
    if u == v:
        raise ValueError(f"loop at vertex {u} not allowed")
    return (u, v) if u < v else (v, u)


@dataclass(frozen=True)
class Graph:
    """Simple graph on vertices 0..n-1 with an immutable edge set."""

    n: int
    edges: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        norm = frozenset(_normalize_edge(u, v) for u, v in self.edges)
        object.__setattr__(self, "edges", norm)
        for u, v in norm:
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise ValueError(f"edge ({u},{v}) outside vertex range [0,{self.n})")

    @property
    def num_edges(self):
        return len(self.edges)

    def degree(self, v):
        return sum(1 for e in self.edges if v in e)

    def degrees(self):
        deg = [0] * self.n
        for u, v in self.edges:
            deg[u] += 1
            deg[v] += 1
        return deg

    def adjacency_masks(self):
        """Neighbourhoods as bitmasks (Python ints, so any width works)."""
        adj = [0] * self.n
        for u, v in self.edges:
            adj[u] |= 1 << v
            adj[v] |= 1 << u
        return adj

    def has_edge(self, u, v):
        return _normalize_edge(u, v) in self.edges

    def neighbors(self, v):
        return sorted(e[0] if e[1] == v else e[1] for e in self.edges if v in e)

    def support(self):
        """Vertices of nonzero degree."""
        return sorted({v for e in self.edges for v in e})

    def with_edge(self, u, v):
        return Graph(self.n, self.edges | {_normalize_edge(u, v)})

    def without_edge(self, u, v):
        return Graph(self.n, self.edges - {_normalize_edge(u, v)})

    def induced(self, verts):
        """Induced subgraph, relabeled to 0..len(verts)-1 in sorted order."""
        verts = sorted(verts)
        index = {v: i for i, v in enumerate(verts)}
        kept = frozenset((index[u], index[v]) for u, v in self.edges
                         if u in index and v in index)
        return Graph(len(verts), kept)

    def is_connected(self):
        if self.n == 0:
            return True
        adj = self.adjacency_masks()
        seen = 1
        frontier = [0]
        while frontier:
            v = frontier.pop()
            for u in range(self.n):
                if adj[v] >> u & 1 and not seen >> u & 1:
                    seen |= 1 << u
                    frontier.append(u)
        return seen == (1 << self.n) - 1

    def bipartition(self):
        """Two-coloring (A, B) as sorted lists, or None if not bipartite."""
        color = [-1] * self.n
        adj = self.adjacency_masks()
        for start in range(self.n):
            if color[start] >= 0:
                continue
            color[start] = 0
            stack = [start]
            while stack:
                v = stack.pop()
                for u in range(self.n):
                    if adj[v] >> u & 1:
                        if color[u] < 0:
                            color[u] = 1 - color[v]
                            stack.append(u)
                        elif color[u] == color[v]:
                            return None
        side_a = sorted(v for v in range(self.n) if color[v] == 0)
        side_b = sorted(v for v in range(self.n) if color[v] == 1)
        return side_a, side_b

    def to_json(self):
        adj = {str(v): sorted(u for u in range(self.n) if self.has_edge(u, v) and u != v)
               for v in range(self.n)}
        return json.dumps({"n": self.n, "adjacency": adj}, sort_keys=True)

    @classmethod
    def from_json(cls, text):
        data = json.loads(text)
        n = data["n"]
        edges = set()
        for v_str, nbrs in data["adjacency"].items():
            v = int(v_str)
            for u in nbrs:
                edges.add(_normalize_edge(u, v))
        return cls(n, frozenset(edges))


def complete_graph(n):
    return Graph(n, frozenset(combinations(range(n), 2)))


def empty_graph(n):
    return Graph(n)


def cycle_graph(length):
    if length < 3:
        raise ValueError("cycle needs at least 3 vertices")
    return Graph(length, frozenset((i, (i + 1) % length) for i in range(length)))


def path_graph(n):
    return Graph(n, frozenset((i, i + 1) for i in range(n - 1)))


def star_graph(leaves):
    return Graph(leaves + 1, frozenset((0, i) for i in range(1, leaves + 1)))


def complete_bipartite(a, b):
    return Graph(a + b, frozenset((i, a + j) for i in range(a) for j in range(b)))


def disjoint_union(g, h):
    shifted = frozenset((u + g.n, v + g.n) for u, v in h.edges)
    return Graph(g.n + h.n, g.edges | shifted)


# ---------------------------------------------------------------------------
# graph6 codec (n <= 62; single size byte '?'+n, column-major upper triangle)
# ---------------------------------------------------------------------------

def parse_graph6(text):
    data = text.strip()
    if data.startswith(">>graph6<<"):
        data = data[len(">>graph6<<"):]
    if not data:
        raise Graph6Error("empty graph6 record", 0)
    raw = data.encode("ascii", errors="replace")
    first = raw[0]
    if first == 126:
        raise Graph6Error("multi-byte vertex counts (n > 62) unsupported", 0)
    if not 63 <= first <= 125:
        raise Graph6Error(f"invalid size byte {first}", 0)
    n = first - 63
    nbits = n * (n - 1) // 2
    expected = (nbits + 5) // 6
    body = raw[1:]
    if len(body) != expected:
        raise Graph6Error(
            f"expected {expected} body bytes for n={n}, got {len(body)}", 1 + min(len(body), expected))
    bits = []
    for offset, byte in enumerate(body):
        if not 63 <= byte <= 126:
            raise Graph6Error(f"invalid data byte {byte}", 1 + offset)
        value = byte - 63
        bits.extend((value >> shift) & 1 for shift in range(5, -1, -1))
    for pad_index in range(nbits, len(bits)):
        if bits[pad_index]:
            raise Graph6Error("nonzero padding bits", 1 + pad_index // 6)
    edges = set()
    k = 0
    for j in range(1, n):
        for i in range(j):
            if bits[k]:
                edges.add((i, j))
            k += 1
    return Graph(n, frozenset(edges))


def to_graph6(graph):
    n = graph.n
    if n > 62:
        raise ValueError("graph6 emitter supports n <= 62 only")
    bits = []
    for j in range(1, n):
        for i in range(j):
            bits.append(1 if graph.has_edge(i, j) else 0)
    while len(bits) % 6:
        bits.append(0)
    out = [chr(63 + n)]
    for k in range(0, len(bits), 6):
        value = 0
        for bit in bits[k:k + 6]:
            value = value << 1 | bit
        out.append(chr(63 + value))
    return "".join(out)


# ---------------------------------------------------------------------------
# Embedding and copy enumeration
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EmbeddingCount:
    total: int
    copies: int
    per_edge: dict | None = None


def _embeddings(pattern, host):
    """Yield injective maps V(pattern) -> V(host) preserving edges."""
    if pattern.num_edges == 0:
        raise ValueError("pattern must be nonempty")
    if any(d == 0 for d in pattern.degrees()):
        raise ValueError("pattern must have no isolated vertices")
    vp = pattern.n
    if vp > host.n:
        return
    padj = pattern.adjacency_masks()
    hadj = host.adjacency_masks()
    # order pattern vertices to keep partial maps connected where possible
    order = []
    remaining = set(range(vp))
    while remaining:
        anchored = [v for v in remaining if any(padj[v] >> u & 1 for u in order)]
        pick = max(anchored or remaining, key=lambda v: bin(padj[v]).count("1"))
        order.append(pick)
        remaining.discard(pick)
    assignment = [-1] * vp
    used = 0

    def extend(depth):
        nonlocal used
        if depth == vp:
            yield tuple(assignment)
            return
        v = order[depth]
        back = [u for u in order[:depth] if padj[v] >> u & 1]
        if back:
            cand = hadj[assignment[back[0]]]
            for u in back[1:]:
                cand &= hadj[assignment[u]]
        else:
            cand = (1 << host.n) - 1
        cand &= ~used
        w = cand
        while w:
            low = w & -w
            target = low.bit_length() - 1
            w ^= low
            assignment[v] = target
            used |= low
            yield from extend(depth + 1)
            used ^= low
            assignment[v] = -1

    yield from extend(0)


def enumerate_embeddings(pattern, host, restrict_edge=None, per_edge=False):
    """Exact embedding/copy counts of ``pattern`` inside ``host``.

    ``total`` is the number of injective edge-preserving maps, ``copies`` the
    number of distinct image subgraphs.  With ``restrict_edge`` the per_edge
    map holds the copy count through that one edge; with ``per_edge=True`` it
    covers every edge of the host.
    """
    images = set()
    total = 0
    want_edges = None
    if per_edge:
        want_edges = {e: set() for e in host.edges}
    elif restrict_edge is not None:
        want_edges = {_normalize_edge(*restrict_edge): set()}
    for phi in _embeddings(pattern, host):
        total += 1
        image = frozenset(_normalize_edge(phi[u], phi[v]) for u, v in pattern.edges)
        images.add(image)
        if want_edges is not None:
            for e in want_edges:
                if e in image:
                    want_edges[e].add(image)
    per = None
    if want_edges is not None:
        per = {e: len(found) for e, found in want_edges.items()}
    return EmbeddingCount(total=total, copies=len(images), per_edge=per)


def automorphism_count(graph):
    """|Aut| computed by embedding the graph into itself."""
    return enumerate_embeddings(graph, graph).total


def are_isomorphic(g, h):
    if g.n != h.n or g.num_edges != h.num_edges:
        return False
    if sorted(g.degrees()) != sorted(h.degrees()):
        return False
    if g.num_edges == 0:
        return True
    # strip isolated vertices symmetrically, then any embedding is a bijection
    gs, hs = g.induced(g.support()), h.induced(h.support())
    if gs.n != hs.n:
        return False
    if gs.n == 0:
        return True
    for _ in _embeddings(gs, hs):
        return True
    return False


# ---------------------------------------------------------------------------
# Subgraph-count model on the p-biased hypercube of edges of K_n
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SubgraphModel:
    """Count copies of ``pattern`` in G(n, p); p is an exact rational."""

    pattern: Graph
    n: int
    p: Fraction

    def __post_init__(self):
        object.__setattr__(self, "p", Fraction(self.p))
        if not 0 < self.p < 1:
            raise ValueError("p must lie strictly between 0 and 1")
        if self.pattern.num_edges == 0:
            raise ValueError("pattern must be nonempty")
        if any(d == 0 for d in self.pattern.degrees()):
            raise ValueError("pattern must have no isolated vertices")


@lru_cache(maxsize=256)
def _copies_in_complete(pattern_key, n):
    """All copies of the pattern inside K_n, as frozensets of edges."""
    pattern = parse_graph6(pattern_key)
    return tuple(sorted(
        {frozenset(_normalize_edge(phi[u], phi[v]) for u, v in pattern.edges)
         for phi in _embeddings(pattern, complete_graph(n))},
        key=sorted))


def model_copies(model):
    return _copies_in_complete(to_graph6(model.pattern), model.n)


def conditional_expectation_subgraph(model, conditioned_on):
    """E[X | G0 present]: sum over copies of p^{#edges missing from G0}."""
    if not 0 < model.p < 1:
        raise ValueError("p outside (0,1)")
    g0_edges = conditioned_on.edges
    p = model.p
    powers = {}
    result = Fraction(0)
    for copy in model_copies(model):
        missing = len(copy - g0_edges)
        if missing not in powers:
            powers[missing] = p ** missing
        result += powers[missing]
    return result


def subgraph_mean(model):
    """E[X] = N(H, K_n) * p^{e_H}."""
    return len(model_copies(model)) * model.p ** model.pattern.num_edges
