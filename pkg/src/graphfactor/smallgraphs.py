"""Canonical unlabeled graphs on at most 7 vertices.

Everything downstream is indexed by these: isomorphism codes are minimum
adjacency bit strings over all vertex permutations (5040 at worst, with a
vectorized batch path for 6 and 7 vertices), automorphism counts fall out of
the same sweep, and the deletion/merge partial order is a memoized closure
over canonical codes.  Instances are interned by code, so identity, hashing
and equality are all O(1).
"""

from __future__ import annotations

import itertools
from functools import cache, lru_cache

__all__ = [
    "SmallGraph",
    "GraphFamily",
    "small_graph",
    "canonical_form",
    "sort_key",
    "alias_of",
    "token_of",
    "graph_token",
    "family",
    "all_graphs",
    "connected_family",
    "niv_upto",
    "graph6_encode",
    "graph6_decode",
    "ALIASES",
    "components",
    "disjoint_union",
    "strip_isolated",
    "complement",
    "precedes",
    "down_codes",
    "down_closure_niv",
    "quotient",
    "by_code",
    "EMPTY",
    "K1",
    "K2",
    "P2",
    "K3",
]

MAX_VERTICES = 7


@cache
def _pairs(v: int) -> tuple[tuple[int, int], ...]:
    return tuple((i, j) for i in range(v) for j in range(i + 1, v))


@cache
def _pair_index(v: int) -> dict[tuple[int, int], int]:
    return {pq: k for k, pq in enumerate(_pairs(v))}


@cache
def _perm_maps(v: int) -> tuple[tuple[int, ...], ...]:
    """For each permutation of [v], the induced map on pair-bit indices."""
    pairs = _pairs(v)
    idx = _pair_index(v)
    maps = []
    for perm in itertools.permutations(range(v)):
        maps.append(tuple(idx[tuple(sorted((perm[i], perm[j])))] for (i, j) in pairs))
    return tuple(maps)


def _apply_map(mask: int, pmap: tuple[int, ...]) -> int:
    out = 0
    while mask:
        low = mask & -mask
        out |= 1 << pmap[low.bit_length() - 1]
        mask ^= low
    return out


@cache
def _np_perm_gather(v: int):
    import numpy as np

    maps = _perm_maps(v)
    gather = np.array(maps, dtype=np.int64)
    weights = (np.int64(1) << np.arange(len(_pairs(v)), dtype=np.int64))
    return gather, weights


_canon_cache: dict[tuple[int, int], tuple[int, int]] = {}


def _canonical_mask(v: int, mask: int) -> tuple[int, int]:
    """(canonical mask, automorphism count) for a labeled edge mask on v vertices."""
    if v > MAX_VERTICES:
        raise ValueError(f"graphs are limited to {MAX_VERTICES} vertices, got {v}")
    key = (v, mask)
    hit = _canon_cache.get(key)
    if hit is not None:
        return hit
    if v <= 1:
        res = (0, 1)
    elif v <= 5:
        best = mask
        aut = 0
        for pmap in _perm_maps(v):
            img = _apply_map(mask, pmap)
            if img == mask:
                aut += 1
            if img < best:
                best = img
        res = (best, aut)
    else:
        # 720 or 5040 permutations: do the whole sweep as one gather + matvec.
        import numpy as np

        gather, weights = _np_perm_gather(v)
        bits = np.fromiter(((mask >> i) & 1 for i in range(len(weights))),
                           dtype=np.int64, count=len(weights))
        codes = bits[gather] @ weights
        res = (int(codes.min()), int((codes == mask).sum()))
    _canon_cache[key] = res
    return res


class SmallGraph:
    """Immutable canonical graph; constructed only through small_graph()."""

    __slots__ = ("vertex_count", "edge_mask", "aut_count", "canonical_code",
                 "edges", "edge_count", "is_connected", "is_niv", "degrees")

    def __init__(self, v: int, canon_mask: int, aut: int):
        object.__setattr__(self, "vertex_count", v)
        object.__setattr__(self, "edge_mask", canon_mask)
        object.__setattr__(self, "aut_count", aut)
        object.__setattr__(self, "canonical_code",
                           bytes((v,)) + canon_mask.to_bytes(3, "big"))
        pairs = _pairs(v)
        edges = tuple(pairs[i] for i in range(len(pairs)) if (canon_mask >> i) & 1)
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "edge_count", len(edges))
        deg = [0] * v
        for a, b in edges:
            deg[a] += 1
            deg[b] += 1
        object.__setattr__(self, "degrees", tuple(deg))
        object.__setattr__(self, "is_connected", _connected(v, edges))
        object.__setattr__(self, "is_niv", v == 0 or all(d > 0 for d in deg))

    def __setattr__(self, *_):
        raise AttributeError("SmallGraph is immutable")

    def __repr__(self):
        return f"SmallGraph({alias_of(self) or self.canonical_code.hex()})"

    def __hash__(self):
        return hash(self.canonical_code)

    def __eq__(self, other):
        return self is other or (isinstance(other, SmallGraph)
                                 and self.canonical_code == other.canonical_code)


def _connected(v: int, edges) -> bool:
    if v == 0:
        return False
    if v == 1:
        return True
    adj = [0] * v
    for a, b in edges:
        adj[a] |= 1 << b
        adj[b] |= 1 << a
    seen = 1
    frontier = 1
    while frontier:
        nxt = 0
        m = frontier
        while m:
            low = m & -m
            nxt |= adj[low.bit_length() - 1]
            m ^= low
        frontier = nxt & ~seen
        seen |= frontier
    return seen == (1 << v) - 1


_registry: dict[bytes, SmallGraph] = {}


def _intern(v: int, canon_mask: int, aut: int) -> SmallGraph:
    code = bytes((v,)) + canon_mask.to_bytes(3, "big")
    g = _registry.get(code)
    if g is None:
        g = SmallGraph(v, canon_mask, aut)
        _registry[code] = g
    return g


def small_graph(v: int, edges=()) -> SmallGraph:
    """Canonicalize a labeled graph given as (vertex count, edge pairs)."""
    idx = _pair_index(v)
    mask = 0
    for a, b in edges:
        if a == b or not (0 <= a < v and 0 <= b < v):
            raise ValueError(f"bad edge ({a},{b}) on {v} vertices")
        mask |= 1 << idx[(a, b) if a < b else (b, a)]
    canon, aut = _canonical_mask(v, mask)
    return _intern(v, canon, aut)


def canonical_form(v: int, edges=()) -> SmallGraph:
    return small_graph(v, edges)


def by_code(code: bytes) -> SmallGraph:
    g = _registry.get(code)
    if g is None:
        v = code[0]
        mask = int.from_bytes(code[1:4], "big")
        canon, aut = _canonical_mask(v, mask)
        if canon != mask:
            raise ValueError("not a canonical code")
        g = _intern(v, canon, aut)
    return g


def sort_key(g: SmallGraph):
    """The fixed linear extension of the partial order: (v, e, code)."""
    return (g.vertex_count, g.edge_count, g.canonical_code)


# ---------------------------------------------------------------------------
# Named graphs and tokens

EMPTY = small_graph(0)
K1 = small_graph(1)
K2 = small_graph(2, [(0, 1)])
P2 = small_graph(3, [(0, 1), (1, 2)])
K3 = small_graph(3, [(0, 1), (1, 2), (0, 2)])


def _complete(k):
    return small_graph(k, itertools.combinations(range(k), 2))


def _path_edges(k_edges):
    return small_graph(k_edges + 1, [(i, i + 1) for i in range(k_edges)])


def _cycle(k):
    return small_graph(k, [(i, (i + 1) % k) for i in range(k)])


ALIASES: dict[str, SmallGraph] = {
    "K1": K1, "K2": K2, "K3": K3, "K4": _complete(4), "K5": _complete(5),
    "K6": _complete(6), "K7": _complete(7),
    "P2": P2, "P3": _path_edges(3),
    "C4": _cycle(4), "C5": _cycle(5),
    "K13": small_graph(4, [(0, 1), (0, 2), (0, 3)]),
    "2K2": small_graph(4, [(0, 1), (2, 3)]),
}

_ALIAS_OF: dict[bytes, str] = {g.canonical_code: name for name, g in ALIASES.items()}


def alias_of(g: SmallGraph) -> str | None:
    return _ALIAS_OF.get(g.canonical_code)


def token_of(g: SmallGraph) -> str:
    """Stable printable name: a friendly alias when one exists, else g6:<code>."""
    name = _ALIAS_OF.get(g.canonical_code)
    if name is not None:
        return name
    if g.vertex_count == 0:
        return "g6:?"
    edge_set = set(g.edges)
    return "g6:" + graph6_encode(g.vertex_count,
                                 lambda i, j: (i, j) in edge_set or (j, i) in edge_set)


def graph_token(token: str) -> SmallGraph:
    """Resolve a single graph token: an alias like K3/P2/2K2, or g6:<graph6>."""
    tok = token.strip()
    if tok in ALIASES:
        return ALIASES[tok]
    if tok.startswith("g6:"):
        n, bits = graph6_decode(tok[3:])
        if n > MAX_VERTICES:
            raise ValueError(f"graph token {token!r} has {n} > {MAX_VERTICES} vertices")
        edges = [pq for pq, b in zip(_g6_pair_order(n), bits) if b]
        return small_graph(n, edges)
    raise ValueError(f"unknown graph token {token!r}")


# ---------------------------------------------------------------------------
# graph6 bit packing (shared with hostgraphs; mask-level, no size limit here)

def _g6_pair_order(n):
    return [(i, j) for j in range(1, n) for i in range(j)]


def graph6_encode(n: int, bit_at) -> str:
    """graph6 string for an n-vertex graph; bit_at(i, j) gives the i<j edge bit."""
    if n < 0:
        raise ValueError("negative vertex count")
    if n <= 62:
        head = chr(n + 63)
    elif n <= 258047:
        head = "~" + "".join(chr(((n >> s) & 63) + 63) for s in (12, 6, 0))
    elif n <= 68719476735:
        head = "~~" + "".join(chr(((n >> s) & 63) + 63) for s in (30, 24, 18, 12, 6, 0))
    else:
        raise ValueError("vertex count too large for graph6")
    chunk = 0
    filled = 0
    body = []
    for (i, j) in _g6_pair_order(n):
        chunk = (chunk << 1) | (1 if bit_at(i, j) else 0)
        filled += 1
        if filled == 6:
            body.append(chr(chunk + 63))
            chunk, filled = 0, 0
    if filled:
        body.append(chr((chunk << (6 - filled)) + 63))
    return head + "".join(body)


def graph6_decode(text: str) -> tuple[int, list[int]]:
    """Parse a graph6 string into (n, column-major upper-triangle bits)."""
    s = text.strip()
    if not s:
        raise ValueError("empty graph6 string")
    pos = 0
    if s.startswith("~~"):
        vals = [ord(c) - 63 for c in s[2:8]]
        pos = 8
        if len(vals) < 6 or any(not (0 <= x < 64) for x in vals):
            raise ValueError("malformed graph6 extended header")
        n = 0
        for x in vals:
            n = (n << 6) | x
    elif s.startswith("~"):
        vals = [ord(c) - 63 for c in s[1:4]]
        pos = 4
        if len(vals) < 3 or any(not (0 <= x < 64) for x in vals):
            raise ValueError("malformed graph6 long header")
        n = (vals[0] << 12) | (vals[1] << 6) | vals[2]
    else:
        n = ord(s[0]) - 63
        pos = 1
        if not (0 <= n <= 62):
            raise ValueError("malformed graph6 header")
    m = n * (n - 1) // 2
    need = (m + 5) // 6
    body = s[pos:]
    if len(body) != need:
        raise ValueError(f"graph6 body for n={n} needs {need} chars, got {len(body)}")
    bits = []
    for c in body:
        x = ord(c) - 63
        if not (0 <= x < 64):
            raise ValueError(f"bad graph6 body character {c!r}")
        bits.extend((x >> s6) & 1 for s6 in (5, 4, 3, 2, 1, 0))
    if any(bits[m:]):
        raise ValueError("nonzero padding bits in graph6 body")
    return n, bits[:m]


# ---------------------------------------------------------------------------
# Catalog generation

@cache
def all_graphs(v: int) -> tuple[SmallGraph, ...]:
    """All isomorphism classes on exactly v vertices, sorted by (v, e, code)."""
    if v == 0:
        return (EMPTY,)
    out: dict[bytes, SmallGraph] = {}
    for g in all_graphs(v - 1):
        base = g.edges
        new = v - 1
        for nb in range(1 << new):
            edges = list(base)
            m = nb
            while m:
                low = m & -m
                edges.append((low.bit_length() - 1, new))
                m ^= low
            h = small_graph(v, edges)
            out[h.canonical_code] = h
    return tuple(sorted(out.values(), key=sort_key))


@cache
def connected_family(k: int) -> tuple[SmallGraph, ...]:
    """C_k: connected graphs on exactly k vertices (k >= 2 in practice)."""
    return tuple(g for g in all_graphs(k) if g.is_connected)


@cache
def connected_upto(v: int) -> tuple[SmallGraph, ...]:
    """Connected isomorphism classes with 2 <= vertices <= v, sorted."""
    out = []
    for k in range(2, v + 1):
        out.extend(connected_family(k))
    return tuple(sorted(out, key=sort_key))


@cache
def niv_upto(v: int) -> tuple[SmallGraph, ...]:
    """All NIV isomorphism classes with at most v vertices, including ∅."""
    out = []
    for k in range(v + 1):
        out.extend(g for g in all_graphs(k) if g.is_niv)
    return tuple(sorted(out, key=sort_key))


# ---------------------------------------------------------------------------
# Structure helpers

def _induced(g: SmallGraph, keep: list[int]) -> SmallGraph:
    pos = {u: i for i, u in enumerate(keep)}
    edges = [(pos[a], pos[b]) for (a, b) in g.edges if a in pos and b in pos]
    return small_graph(len(keep), edges)


@cache
def components(g: SmallGraph) -> tuple[SmallGraph, ...]:
    """Connected components (isolated vertices come out as K1), sorted."""
    v = g.vertex_count
    if v == 0:
        return ()
    adj = [0] * v
    for a, b in g.edges:
        adj[a] |= 1 << b
        adj[b] |= 1 << a
    seen = 0
    comps = []
    for start in range(v):
        if (seen >> start) & 1:
            continue
        comp = 1 << start
        frontier = comp
        while frontier:
            nxt = 0
            m = frontier
            while m:
                low = m & -m
                nxt |= adj[low.bit_length() - 1]
                m ^= low
            frontier = nxt & ~comp
            comp |= frontier
        seen |= comp
        keep = [u for u in range(v) if (comp >> u) & 1]
        comps.append(_induced(g, keep))
    return tuple(sorted(comps, key=sort_key))


def disjoint_union(g1: SmallGraph, g2: SmallGraph) -> SmallGraph:
    v1 = g1.vertex_count
    edges = list(g1.edges) + [(a + v1, b + v1) for (a, b) in g2.edges]
    return small_graph(v1 + g2.vertex_count, edges)


def strip_isolated(g: SmallGraph) -> tuple[SmallGraph, int]:
    """(NIV core, number of isolated vertices removed)."""
    keep = [u for u in range(g.vertex_count) if g.degrees[u] > 0]
    return _induced(g, keep), g.vertex_count - len(keep)


def complement(g: SmallGraph) -> SmallGraph:
    v = g.vertex_count
    present = set(g.edges)
    edges = [pq for pq in _pairs(v) if pq not in present]
    return small_graph(v, edges)


# ---------------------------------------------------------------------------
# The partial order: edge deletion, vertex deletion, merging non-adjacent pairs

@cache
def _one_step_down(g: SmallGraph) -> tuple[SmallGraph, ...]:
    v = g.vertex_count
    out = set()
    edges = g.edges
    edge_set = set(edges)
    for e in edges:
        out.add(small_graph(v, [f for f in edges if f != e]))
    for u in range(v):
        keep = [w for w in range(v) if w != u]
        out.add(_induced(g, keep))
    for (i, j) in _pairs(v):
        if (i, j) in edge_set:
            continue
        # merge j into i
        def m(x):
            if x == j:
                return i
            return x if x < j else x - 1
        merged = {(min(m(a), m(b)), max(m(a), m(b))) for (a, b) in edges}
        out.add(small_graph(v - 1, merged))
    return tuple(out)


@cache
def down_codes(g: SmallGraph) -> frozenset[bytes]:
    """Canonical codes of every graph reachable downward from g (g included)."""
    out = {g.canonical_code}
    for h in _one_step_down(g):
        out |= down_codes(h)
    return frozenset(out)


def precedes(h1: SmallGraph, h2: SmallGraph) -> bool:
    """h1 ⪯ h2 under the deletion/merge moves (reflexive)."""
    return h1.canonical_code in down_codes(h2)


@cache
def down_closure_niv(g: SmallGraph) -> tuple[SmallGraph, ...]:
    """All NIV graphs (∅ included) below g, sorted by (v, e, code)."""
    graphs = [by_code(c) for c in down_codes(g)]
    return tuple(sorted((h for h in graphs if h.is_niv), key=sort_key))


def quotient(g: SmallGraph, partition) -> SmallGraph:
    """Merge each part of a vertex partition to a single vertex.

    Parts must be independent sets; parts become adjacent when any cross edge
    exists.
    """
    parts = [tuple(sorted(p)) for p in partition]
    flat = [u for p in parts for u in p]
    if sorted(flat) != list(range(g.vertex_count)):
        raise ValueError("partition must cover every vertex exactly once")
    owner = {}
    for k, p in enumerate(parts):
        for u in p:
            owner[u] = k
    edge_set = set(g.edges)
    for p in parts:
        for a, b in itertools.combinations(p, 2):
            if (a, b) in edge_set:
                raise ValueError(f"invalid partition: adjacent vertices {a},{b} share a part")
    edges = {(min(owner[a], owner[b]), max(owner[a], owner[b])) for (a, b) in g.edges
             if owner[a] != owner[b]}
    return small_graph(len(parts), edges)


# ---------------------------------------------------------------------------
# Families

class GraphFamily:
    """Ordered, duplicate-free set of small graphs; order is the fixed linear
    extension (v, e, code) of ⪯."""

    __slots__ = ("members", "selector", "downwards_closed", "_index")

    def __init__(self, members, selector: str | None = None):
        uniq: dict[bytes, SmallGraph] = {}
        for g in members:
            uniq[g.canonical_code] = g
        ordered = tuple(sorted(uniq.values(), key=sort_key))
        object.__setattr__(self, "members", ordered)
        object.__setattr__(self, "selector", selector)
        object.__setattr__(self, "_index", {g.canonical_code: i for i, g in enumerate(ordered)})
        object.__setattr__(self, "downwards_closed", self._check_closed())

    def _check_closed(self) -> bool:
        codes = {g.canonical_code for g in self.members}
        for h in self.members:
            for k in range(2, h.vertex_count + 1):
                for cand in connected_family(k):
                    if cand.canonical_code not in codes and precedes(cand, h):
                        return False
        return True

    def __setattr__(self, *_):
        raise AttributeError("GraphFamily is immutable")

    def __iter__(self):
        return iter(self.members)

    def __len__(self):
        return len(self.members)

    def __contains__(self, g):
        return g.canonical_code in self._index

    def index(self, g: SmallGraph) -> int:
        return self._index[g.canonical_code]

    def __repr__(self):
        names = ",".join(alias_of(g) or g.canonical_code.hex() for g in self.members)
        return f"GraphFamily[{names}]"


def family(selector: str) -> GraphFamily:
    """Build a family from a comma-separated selector.

    Inside a selector a Ck token always means the set of connected k-vertex
    graphs (the C3,C4,C5 of the hyperproportional family), never the k-cycle;
    cycles can still be named via g6 tokens.  Everything else goes through
    graph_token.
    """
    members: list[SmallGraph] = []
    for token in selector.split(","):
        tok = token.strip()
        if not tok:
            continue
        if len(tok) == 2 and tok[0] == "C" and tok[1].isdigit():
            k = int(tok[1])
            if not (2 <= k <= MAX_VERTICES):
                raise ValueError(f"family token {tok!r} out of range")
            members.extend(connected_family(k))
        else:
            members.append(graph_token(tok))
    if not members:
        raise ValueError(f"empty family selector {selector!r}")
    return GraphFamily(members, selector=selector)
