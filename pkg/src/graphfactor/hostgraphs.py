"""Labeled host graphs: adjacency bit masks, graph6 I/O, exact subgraph
counting, closed-form motif counts for the ≤4-vertex graphs, and seeded
G(n,p) sampling.

The sampler consumes one splitmix64 word per potential edge (edge order
(0,1),(0,2),...,(n-2,n-1)) and resolves p = a/b exactly, ties refined to
further words; the compiled kernels replay the identical stream.
"""

from __future__ import annotations

import itertools
from functools import cache
from math import comb

from .numtheory import splitmix64
from .smallgraphs import (SmallGraph, all_graphs, graph6_decode, graph6_encode,
                          small_graph)

__all__ = [
    "HostGraph",
    "host_from_edges",
    "host_from_mask",
    "host_from_small",
    "complete_host",
    "graph6_parse",
    "graph6_emit",
    "sample_host",
    "sample_edge_mask",
    "count_subgraph_copies",
    "count_in_complete",
    "copies_in_complete",
    "count_upto4",
    "UPTO4_NAMES",
    "all_labeled_hosts",
    "host_pairs",
]

MAX_HOST = 4096


class HostGraph:
    __slots__ = ("n", "rows", "edge_count", "degrees")

    def __init__(self, n: int, rows: tuple[int, ...]):
        if not (0 <= n <= MAX_HOST):
            raise ValueError(f"host size {n} out of range 0..{MAX_HOST}")
        if len(rows) != n:
            raise ValueError("adjacency row count must equal n")
        for i, r in enumerate(rows):
            if (r >> i) & 1:
                raise ValueError(f"self-loop at vertex {i}")
            if r >> n:
                raise ValueError(f"row {i} has bits beyond vertex {n - 1}")
        total = sum(r.bit_count() for r in rows)
        if total % 2:
            raise ValueError("adjacency is not symmetric")
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "rows", tuple(rows))
        object.__setattr__(self, "edge_count", total // 2)
        object.__setattr__(self, "degrees", tuple(r.bit_count() for r in rows))

    def __setattr__(self, *_):
        raise AttributeError("HostGraph is immutable")

    def has_edge(self, i: int, j: int) -> bool:
        return bool((self.rows[i] >> j) & 1)

    def __eq__(self, other):
        return isinstance(other, HostGraph) and self.n == other.n and self.rows == other.rows

    def __hash__(self):
        return hash((self.n, self.rows))

    def __repr__(self):
        return f"HostGraph(n={self.n}, e={self.edge_count})"


def host_from_edges(n: int, edges) -> HostGraph:
    rows = [0] * n
    for a, b in edges:
        if a == b:
            raise ValueError("self-loop")
        rows[a] |= 1 << b
        rows[b] |= 1 << a
    return HostGraph(n, tuple(rows))


def host_pairs(n: int) -> list[tuple[int, int]]:
    """The sampling edge order: (i, j) lexicographic with i < j."""
    return [(i, j) for i in range(n) for j in range(i + 1, n)]


def host_from_mask(n: int, mask: int, pairs=None) -> HostGraph:
    """Host from an edge bitmask in host_pairs order."""
    if pairs is None:
        pairs = host_pairs(n)
    rows = [0] * n
    m = mask
    while m:
        low = m & -m
        i, j = pairs[low.bit_length() - 1]
        rows[i] |= 1 << j
        rows[j] |= 1 << i
        m ^= low
    return HostGraph(n, tuple(rows))


def host_from_small(g: SmallGraph) -> HostGraph:
    return host_from_edges(g.vertex_count, g.edges)


def complete_host(n: int) -> HostGraph:
    full = (1 << n) - 1
    return HostGraph(n, tuple(full ^ (1 << i) for i in range(n)))


def graph6_parse(text: str) -> HostGraph:
    n, bits = graph6_decode(text)
    if n > MAX_HOST:
        raise ValueError(f"graph6 host with {n} vertices exceeds the {MAX_HOST} cap")
    rows = [0] * n
    k = 0
    for j in range(1, n):
        for i in range(j):
            if bits[k]:
                rows[i] |= 1 << j
                rows[j] |= 1 << i
            k += 1
    return HostGraph(n, tuple(rows))


def graph6_emit(g: HostGraph) -> str:
    return graph6_encode(g.n, g.has_edge)


# ---------------------------------------------------------------------------
# Seeded sampling

def sample_edge_mask(n: int, a: int, b: int, seed: int) -> int:
    """Edge bitmask of one G(n, a/b) draw from the splitmix64 stream at seed."""
    q0 = (a << 64) // b
    r0 = (a << 64) % b
    state = seed & ((1 << 64) - 1)
    mask = 0
    bit = 1
    for _ in range(n * (n - 1) // 2):
        state, u = splitmix64(state)
        if u < q0:
            mask |= bit
        elif u == q0:
            num = r0
            while True:
                state, u2 = splitmix64(state)
                q, r = divmod(num << 64, b)
                if u2 < q:
                    mask |= bit
                    break
                if u2 > q:
                    break
                num = r
        bit <<= 1
    return mask


def sample_host(n: int, a: int, b: int, seed: int) -> HostGraph:
    return host_from_mask(n, sample_edge_mask(n, a, b, seed))


def all_labeled_hosts(n: int):
    """Iterate every labeled host on n vertices (2^C(n,2) of them)."""
    pairs = host_pairs(n)
    for mask in range(1 << len(pairs)):
        yield host_from_mask(n, mask, pairs)


# ---------------------------------------------------------------------------
# Subgraph counting

@cache
def _embed_plan(h: SmallGraph):
    """DFS vertex order plus, per position, the earlier positions adjacent to it.

    Order is greedy: prefer vertices with the most already-placed neighbors,
    then higher degree, so candidate sets shrink as fast as possible.
    """
    v = h.vertex_count
    adj = [set() for _ in range(v)]
    for x, y in h.edges:
        adj[x].add(y)
        adj[y].add(x)
    order: list[int] = []
    chosen: set[int] = set()
    while len(order) < v:
        best = None
        best_key = None
        for u in range(v):
            if u in chosen:
                continue
            key = (len(adj[u] & chosen), h.degrees[u], -u)
            if best_key is None or key > best_key:
                best, best_key = u, key
        order.append(best)
        chosen.add(best)
    pos_of = {u: i for i, u in enumerate(order)}
    back = tuple(tuple(sorted(pos_of[w] for w in adj[u] if pos_of[w] < i))
                 for i, u in enumerate(order))
    mindeg = tuple(h.degrees[u] for u in order)
    return back, mindeg


def count_subgraph_copies(h: SmallGraph, g: HostGraph) -> int:
    """X_h(g): subgraphs of g isomorphic to h (the whole graph when h is
    disconnected), exactly."""
    v = h.vertex_count
    if v == 0:
        return 1
    if v > g.n:
        return 0
    if g.n > 64 and v > 5:
        raise ValueError("hosts beyond 64 vertices support patterns up to 5 vertices")
    back, mindeg = _embed_plan(h)
    rows = g.rows
    gdeg = g.degrees
    full = (1 << g.n) - 1
    assign = [0] * v

    def rec(pos: int, used: int) -> int:
        if pos == v:
            return 1
        anchors = back[pos]
        if anchors:
            cand = rows[assign[anchors[0]]]
            for q in anchors[1:]:
                cand &= rows[assign[q]]
            cand &= ~used
        else:
            cand = full & ~used
        need = mindeg[pos]
        total = 0
        while cand:
            low = cand & -cand
            cand ^= low
            w = low.bit_length() - 1
            if gdeg[w] < need:
                continue
            assign[pos] = w
            total += rec(pos + 1, used | low)
        return total

    injections = rec(0, 0)
    assert injections % h.aut_count == 0
    return injections // h.aut_count


def count_in_complete(h: SmallGraph, n: int) -> int:
    """X_h(K_n) by the falling-factorial formula."""
    from .numtheory import falling

    return falling(n, h.vertex_count) // h.aut_count


@cache
def copies_in_complete(h: SmallGraph, n: int) -> tuple[tuple[tuple[int, int], ...], ...]:
    """Every copy of h inside K_n, as a tuple of edge lists (vertex pairs).

    Cached; meant for modest n (the direct factor-evaluation path).
    """
    v = h.vertex_count
    if v > n:
        return ()
    seen = set()
    out = []
    for combo in itertools.combinations(range(n), v):
        for perm in itertools.permutations(combo):
            copy = frozenset((min(perm[x], perm[y]), max(perm[x], perm[y]))
                             for x, y in h.edges)
            if copy not in seen:
                seen.add(copy)
                out.append(tuple(sorted(copy)))
    return tuple(out)


# ---------------------------------------------------------------------------
# Closed-form motif counts (connected graphs up to 4 vertices)

_PAW = small_graph(4, [(0, 1), (1, 2), (0, 2), (0, 3)])
_DIAMOND = small_graph(4, [(0, 1), (1, 2), (0, 2), (0, 3), (1, 3)])

UPTO4_NAMES: tuple[tuple[str, SmallGraph], ...] = tuple()  # filled below


def _upto4_graphs():
    from .smallgraphs import ALIASES

    return (
        ("K2", ALIASES["K2"]), ("P2", ALIASES["P2"]), ("K3", ALIASES["K3"]),
        ("P3", ALIASES["P3"]), ("K13", ALIASES["K13"]), ("C4", ALIASES["C4"]),
        ("paw", _PAW), ("diamond", _DIAMOND), ("K4", ALIASES["K4"]),
    )


UPTO4_NAMES = _upto4_graphs()


def count_upto4(g: HostGraph) -> dict[bytes, int]:
    """Exact counts of every connected pattern on <= 4 vertices.

    Per-edge and per-triangle accumulation; matches count_subgraph_copies on
    everything (tested), at a fraction of the cost.
    """
    n, rows, deg = g.n, g.rows, g.degrees
    e = g.edge_count
    ch = sum(comb(d, 2) for d in deg)
    k13 = sum(comb(d, 3) for d in deg)
    tr3 = 0      # 3 * triangles
    p3_edges = 0
    dia_acc = 0  # diamond copies, one per hinge edge and codegree pair
    c4_acc = 0   # sum over ordered pairs u<v (all pairs) of C(codeg, 2) = 2 * C4
    paw = 0
    k4_acc = 0   # one count per K4 via its least triangle
    for u in range(n):
        ru = rows[u]
        above_u = ru >> (u + 1) << (u + 1)
        # all pairs u < v for the C4 accumulator
        for v_ in range(u + 1, n):
            cod = (ru & rows[v_]).bit_count()
            if cod >= 2:
                c4_acc += cod * (cod - 1) // 2
        m = above_u
        while m:
            low = m & -m
            m ^= low
            v_ = low.bit_length() - 1
            rv = rows[v_]
            common = ru & rv
            cod = common.bit_count()
            tr3 += cod
            p3_edges += (deg[u] - 1) * (deg[v_] - 1)
            dia_acc += cod * (cod - 1) // 2
            t = common & ~((1 << (v_ + 1)) - 1)  # w > v_: each triangle once
            while t:
                tl = t & -t
                t ^= tl
                w = tl.bit_length() - 1
                paw += deg[u] + deg[v_] + deg[w] - 6
                k4_acc += (common & rows[w] & ~((1 << (w + 1)) - 1)).bit_count()
    assert tr3 % 3 == 0 and c4_acc % 2 == 0
    k3 = tr3 // 3
    k4 = k4_acc
    out = {
        "K2": e,
        "P2": ch,
        "K3": k3,
        "P3": p3_edges - 3 * k3,
        "K13": k13,
        "C4": c4_acc // 2,
        "paw": paw,
        "diamond": dia_acc,
        "K4": k4,
    }
    return {gr.canonical_code: out[name] for name, gr in UPTO4_NAMES}
