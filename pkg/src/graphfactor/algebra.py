"""Exact factor algebra at fixed (n, p): scaled factor evaluation, the
X-to-g change of basis, products of factors by overlay gluing, and identity
verification by exhaustive evaluation.

Normalization: all gamma work happens in the rational scaling
g_H = (p(1-p))^{e(H)/2} gamma_H, so that a present edge contributes (1-p)
and an absent one (-p).  Starred quantities multiply over connected
components; g*_∅ is the empty product, 1.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cache

from .hostgraphs import (HostGraph, copies_in_complete, count_subgraph_copies,
                         count_upto4, graph6_emit, host_from_small)
from .numtheory import binom, falling, format_rational, parse_rational
from .smallgraphs import (EMPTY, SmallGraph, all_graphs, by_code, components,
                          disjoint_union, graph_token, small_graph, sort_key,
                          strip_isolated, token_of)

__all__ = [
    "ProblemContext",
    "StatVector",
    "scaled_factor_value",
    "expand_x_in_g",
    "product_expand",
    "star_expand_plain",
    "plain_to_star",
    "star_to_plain",
    "xstar_to_gstar",
    "HostEvaluator",
    "verify_identity",
    "IdentityReport",
    "run_identity_suite",
]


@dataclass(frozen=True)
class ProblemContext:
    n: int
    a: int
    b: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be positive")
        if not (0 < self.a < self.b):
            raise ValueError("p = a/b must satisfy 0 < a < b")
        if math.gcd(self.a, self.b) != 1:
            raise ValueError("a/b must be in lowest terms")

    @classmethod
    def make(cls, n: int, p) -> "ProblemContext":
        frac = parse_rational(p) if isinstance(p, str) else Fraction(p)
        return cls(n, frac.numerator, frac.denominator)

    @property
    def p(self) -> Fraction:
        return Fraction(self.a, self.b)

    @property
    def pq(self) -> Fraction:
        return Fraction(self.a * (self.b - self.a), self.b * self.b)

    def p_token(self) -> str:
        return f"{self.a}/{self.b}"


_BASES = ("X", "Xstar", "g", "gstar")


class StatVector:
    """Exact linear combination of per-graph statistics in one basis.

    Keys are NIV SmallGraphs (∅ allowed); coefficients are Fractions.  Value
    semantics: arithmetic returns new vectors, nothing mutates.
    """

    __slots__ = ("basis", "ctx", "coeffs")

    def __init__(self, basis: str, ctx: ProblemContext, coeffs: dict):
        if basis not in _BASES:
            raise ValueError(f"unknown basis {basis!r}")
        clean: dict[SmallGraph, Fraction] = {}
        for g, c in coeffs.items():
            if not g.is_niv:
                raise ValueError(f"non-NIV key {g!r} in StatVector")
            c = Fraction(c)
            if c:
                clean[g] = c
        object.__setattr__(self, "basis", basis)
        object.__setattr__(self, "ctx", ctx)
        object.__setattr__(self, "coeffs", clean)

    def __setattr__(self, *_):
        raise AttributeError("StatVector is immutable")

    @classmethod
    def unit(cls, basis: str, g: SmallGraph, ctx: ProblemContext) -> "StatVector":
        return cls(basis, ctx, {g: Fraction(1)})

    def items(self):
        return sorted(self.coeffs.items(), key=lambda kv: sort_key(kv[0]))

    def __eq__(self, other):
        return (isinstance(other, StatVector) and self.basis == other.basis
                and self.ctx == other.ctx and self.coeffs == other.coeffs)

    def __add__(self, other):
        self._compat(other)
        out = dict(self.coeffs)
        for g, c in other.coeffs.items():
            out[g] = out.get(g, Fraction(0)) + c
        return StatVector(self.basis, self.ctx, out)

    def __sub__(self, other):
        return self + other.scale(-1)

    def scale(self, k) -> "StatVector":
        k = Fraction(k)
        return StatVector(self.basis, self.ctx, {g: c * k for g, c in self.coeffs.items()})

    def _compat(self, other):
        if not isinstance(other, StatVector) or other.basis != self.basis or other.ctx != self.ctx:
            raise ValueError("StatVector mismatch (basis or context)")

    def get(self, g: SmallGraph) -> Fraction:
        return self.coeffs.get(g, Fraction(0))

    def evaluate(self, host: HostGraph, evaluator: "HostEvaluator | None" = None) -> Fraction:
        ev = evaluator if evaluator is not None else HostEvaluator(host, self.ctx)
        total = Fraction(0)
        for g, c in self.coeffs.items():
            if self.basis == "X":
                val = Fraction(ev.x(g))
            elif self.basis == "Xstar":
                val = Fraction(math.prod(ev.x(cp) for cp in components(g)))
            elif self.basis == "g":
                val = ev.g(g)
            else:
                val = math.prod((ev.g(cp) for cp in components(g)), start=Fraction(1))
            total += c * val
        return total

    def to_json(self) -> dict:
        return {
            "basis": self.basis,
            "n": self.ctx.n,
            "p": self.ctx.p_token(),
            "terms": [{"graph": token_of(g), "coeff": format_rational(c)}
                      for g, c in self.items()],
        }

    @classmethod
    def from_json(cls, data: dict) -> "StatVector":
        ctx = ProblemContext.make(int(data["n"]), data["p"])
        coeffs = {graph_token(t["graph"]): parse_rational(t["coeff"])
                  for t in data["terms"]}
        return cls(data["basis"], ctx, coeffs)

    def __repr__(self):
        terms = ", ".join(f"{token_of(g)}: {c}" for g, c in self.items())
        return f"StatVector<{self.basis}>({terms})"


# ---------------------------------------------------------------------------
# Direct evaluation

def _direct_g_value(h: SmallGraph, host: HostGraph, ctx: ProblemContext) -> Fraction:
    """Sum over copies of h in K_n of the product of (x_e - p), by literal
    placement enumeration.  Exact; meant for hosts of modest size."""
    if not h.is_niv:
        # copies are keyed by their edge set, so isolated vertices only
        # contribute the free choice of slots for them
        core, m = strip_isolated(h)
        return binom(ctx.n - core.vertex_count, m) * _direct_g_value(core, host, ctx)
    a, b = ctx.a, ctx.b
    rows = host.rows
    present = b - a
    absent = -a
    total = 0
    for copy in copies_in_complete(h, ctx.n):
        prod = 1
        for (i, j) in copy:
            prod *= present if (rows[i] >> j) & 1 else absent
        total += prod
    return Fraction(total, b ** h.edge_count)


class HostEvaluator:
    """Per-host cache of X and g values; the g path picks a direct placement
    sum on small hosts and the triangular X-inversion on large ones."""

    DIRECT_LIMIT = 12

    def __init__(self, host: HostGraph, ctx: ProblemContext):
        if host.n != ctx.n:
            raise ValueError(f"host has {host.n} vertices, context wants {ctx.n}")
        self.host = host
        self.ctx = ctx
        self._x: dict[bytes, int] = {}
        self._g: dict[bytes, Fraction] = {}
        self._motifs: dict[bytes, int] | None = None

    def x(self, h: SmallGraph) -> int:
        val = self._x.get(h.canonical_code)
        if val is None:
            if 2 <= h.vertex_count <= 4 and h.is_connected:
                if self._motifs is None:
                    self._motifs = count_upto4(self.host)
                val = self._motifs[h.canonical_code]
            else:
                val = count_subgraph_copies(h, self.host)
            self._x[h.canonical_code] = val
        return val

    def g(self, h: SmallGraph) -> Fraction:
        val = self._g.get(h.canonical_code)
        if val is not None:
            return val
        if self.ctx.n <= self.DIRECT_LIMIT:
            val = _direct_g_value(h, self.host, self.ctx)
        elif h is EMPTY:
            val = Fraction(1)
        elif h.is_connected:
            # g_h = X_h - (lower expansion terms), triangular in the order
            vec = expand_x_in_g(h, self.ctx)
            val = Fraction(self.x(h))
            for k, c in vec.coeffs.items():
                if k is not h:
                    val -= c * self.g(k)
        else:
            if not h.is_niv:
                core, m = strip_isolated(h)
                return binom(self.ctx.n - core.vertex_count, m) * self.g(core)
            # disconnected NIV: peel via the star expansion of its components
            vec = star_expand_plain(h, self.ctx)
            val = Fraction(math.prod((self.g(cp) for cp in components(h)),
                                     start=Fraction(1)))
            for k, c in vec.coeffs.items():
                if k is not h:
                    val -= c * self.g(k)
            val /= vec.coeffs[h]
        self._g[h.canonical_code] = val
        return val


def scaled_factor_value(h: SmallGraph, host: HostGraph, ctx: ProblemContext) -> Fraction:
    """g_h(host) exactly.  h may have isolated vertices; they contribute the
    usual binomial slot-choice factor."""
    if host.n != ctx.n:
        raise ValueError(f"host has {host.n} vertices, context wants {ctx.n}")
    if ctx.n <= HostEvaluator.DIRECT_LIMIT:
        return _direct_g_value(h, host, ctx)
    if h.vertex_count > 5:
        raise ValueError("patterns beyond 5 vertices unsupported on large hosts")
    return HostEvaluator(host, ctx).g(h)


# ---------------------------------------------------------------------------
# X in terms of g: spanning edge subsets, isolated vertices stripped

@cache
def _expand_x_symbolic(h: SmallGraph) -> tuple:
    """Per spanning edge-subset: (core, aut-ratio Fraction, dropped edge count,
    isolated count).  Context-free part of the expansion, cached per graph."""
    if not h.is_connected:
        raise ValueError("expand_x_in_g needs a connected pattern")
    v = h.vertex_count
    edges = h.edges
    out = []
    for keep_mask in range(1 << len(edges)):
        sub = [edges[i] for i in range(len(edges)) if (keep_mask >> i) & 1]
        spanning = small_graph(v, sub)
        core, m = strip_isolated(spanning)
        ratio = Fraction(core.aut_count * math.factorial(m), h.aut_count)
        out.append((core, ratio, len(edges) - len(sub), m))
    return tuple(out)


def expand_x_in_g(h: SmallGraph, ctx: ProblemContext) -> StatVector:
    """X_h as a g-basis vector at fixed (n, p): over spanning edge subsets,
    coefficient (aut ratio) * p^dropped * C(n - v(core), isolated)."""
    p = ctx.p
    coeffs: dict[SmallGraph, Fraction] = {}
    for core, ratio, dropped, m in _expand_x_symbolic(h):
        c = ratio * p ** dropped * binom(ctx.n - core.vertex_count, m)
        if c:
            coeffs[core] = coeffs.get(core, Fraction(0)) + c
    return StatVector("g", ctx, coeffs)


# ---------------------------------------------------------------------------
# Products by overlay gluing

@cache
def _glue_table(c1: bytes, c2: bytes) -> tuple:
    """Symbolic expansion of g_{H1} * g_{H2}.

    Enumerates partial identifications of the vertex sets; every shared edge
    is resolved by (x-p)^2 = (1-2p)(x-p) + p(1-p), one branch keeping the
    edge, one dropping it.  Entries: (core, kept_shared, dropped_shared,
    isolated, Fraction weight) with the term value
        weight * (1-2p)^kept * (pq)^dropped * falling(n - v(core), isolated).
    """
    h1, h2 = by_code(c1), by_code(c2)
    v1, v2 = h1.vertex_count, h2.vertex_count
    if v1 + v2 > 7:
        raise ValueError("product would exceed the 7-vertex key limit")
    denom = h1.aut_count * h2.aut_count
    acc: dict[tuple, Fraction] = {}
    verts2 = range(v2)
    for k in range(0, min(v1, v2) + 1):
        for s1 in itertools.combinations(range(v1), k):
            for img in itertools.permutations(verts2, k):
                ident = dict(zip(s1, img))
                # vertices: all of h1, then unmatched h2 vertices appended
                label2 = {}
                nxt = v1
                for u in verts2:
                    hit = None
                    for x, y in ident.items():
                        if y == u:
                            hit = x
                            break
                    if hit is None:
                        label2[u] = nxt
                        nxt += 1
                    else:
                        label2[u] = hit
                vtotal = nxt
                e1 = {tuple(sorted(e)) for e in h1.edges}
                e2 = {tuple(sorted((label2[x], label2[y]))) for (x, y) in h2.edges}
                shared = sorted(e1 & e2)
                union_edges = sorted(e1 | e2)
                s = len(shared)
                for t_mask in range(1 << s):
                    dropped = [shared[i] for i in range(s) if (t_mask >> i) & 1]
                    kept_edges = [e for e in union_edges if e not in dropped]
                    glued = small_graph(vtotal, kept_edges)
                    core, m = strip_isolated(glued)
                    key = (core, s - len(dropped), len(dropped), m)
                    acc[key] = acc.get(key, Fraction(0)) + Fraction(core.aut_count, denom)
    return tuple((core, alpha, beta, m, w) for (core, alpha, beta, m), w in acc.items())


def _product_single(h1: SmallGraph, h2: SmallGraph, ctx: ProblemContext) -> dict:
    one_minus_2p = 1 - 2 * ctx.p
    pq = ctx.pq
    out: dict[SmallGraph, Fraction] = {}
    for core, alpha, beta, m, w in _glue_table(h1.canonical_code, h2.canonical_code):
        slots = falling(ctx.n - core.vertex_count, m)
        if not slots:
            continue
        c = w * one_minus_2p ** alpha * pq ** beta * slots
        if c:
            out[core] = out.get(core, Fraction(0)) + c
    return out


def product_expand(u: StatVector, w: StatVector, ctx: ProblemContext | None = None) -> StatVector:
    """Product of two g-basis vectors, expanded back into the g basis."""
    if ctx is None:
        ctx = u.ctx
    if u.basis != "g" or w.basis != "g" or u.ctx != ctx or w.ctx != ctx:
        raise ValueError("product_expand wants two g-basis vectors in one context")
    coeffs: dict[SmallGraph, Fraction] = {}
    for g1, c1 in u.coeffs.items():
        for g2, c2 in w.coeffs.items():
            if g1 is EMPTY:
                coeffs[g2] = coeffs.get(g2, Fraction(0)) + c1 * c2
                continue
            if g2 is EMPTY:
                coeffs[g1] = coeffs.get(g1, Fraction(0)) + c1 * c2
                continue
            for core, c in _product_single(g1, g2, ctx).items():
                coeffs[core] = coeffs.get(core, Fraction(0)) + c1 * c2 * c
    return StatVector("g", ctx, coeffs)


# ---------------------------------------------------------------------------
# Star basis: products over connected components

def _g_unit(h: SmallGraph, ctx: ProblemContext) -> StatVector:
    return StatVector("g", ctx, {h: Fraction(1)})


_star_plain_cache: dict[tuple, StatVector] = {}


def star_expand_plain(h: SmallGraph, ctx: ProblemContext) -> StatVector:
    """g*_h (the product of its components' g) as a plain-g vector."""
    key = (h.canonical_code, ctx)
    hit = _star_plain_cache.get(key)
    if hit is None:
        vec = StatVector("g", ctx, {EMPTY: Fraction(1)})
        for comp in components(h):
            vec = product_expand(vec, _g_unit(comp, ctx), ctx)
        _star_plain_cache[key] = hit = vec
    return hit


def star_to_plain(vec: StatVector) -> StatVector:
    """Rewrite a gstar vector in the plain g basis."""
    if vec.basis != "gstar":
        raise ValueError("star_to_plain wants a gstar vector")
    out = StatVector("g", vec.ctx, {})
    for g, c in vec.coeffs.items():
        out = out + star_expand_plain(g, vec.ctx).scale(c)
    return out


def plain_to_star(vec: StatVector) -> StatVector:
    """Rewrite a plain-g vector in the gstar basis (triangular elimination
    from the largest key down)."""
    if vec.basis != "g":
        raise ValueError("plain_to_star wants a g vector")
    ctx = vec.ctx
    remaining = dict(vec.coeffs)
    out: dict[SmallGraph, Fraction] = {}
    while remaining:
        h = max(remaining, key=sort_key)
        c = remaining.pop(h)
        if not c:
            continue
        if h.is_connected or h is EMPTY:
            out[h] = out.get(h, Fraction(0)) + c
            continue
        expansion = star_expand_plain(h, ctx)
        lead = expansion.coeffs[h]
        k = c / lead
        out[h] = out.get(h, Fraction(0)) + k
        for g, cc in expansion.coeffs.items():
            if g is not h:
                remaining[g] = remaining.get(g, Fraction(0)) - k * cc
    return StatVector("gstar", ctx, out)


@cache
def _xstar_gstar_cached(code: bytes, ctx: ProblemContext) -> StatVector:
    h = by_code(code)
    plain = StatVector("g", ctx, {EMPTY: Fraction(1)})
    for comp in components(h):
        plain = product_expand(plain, expand_x_in_g(comp, ctx), ctx)
    return plain_to_star(plain)


def xstar_to_gstar(h: SmallGraph, ctx: ProblemContext) -> StatVector:
    """X*_h = prod over components of X, expanded as a gstar vector."""
    return _xstar_gstar_cached(h.canonical_code, ctx)


# ---------------------------------------------------------------------------
# Identity verification by exhaustive evaluation

@dataclass
class IdentityReport:
    passed: bool
    hosts_checked: int
    witness: str | None = None
    lhs_value: Fraction | None = None
    rhs_value: Fraction | None = None

    def __bool__(self):
        return self.passed


def verify_identity(lhs: StatVector, rhs: StatVector,
                    max_host_vertices: int = 6) -> IdentityReport:
    """Exact equality of two vectors on every host: all labeled hosts when
    n <= 5, isomorphism-class representatives when n = 6."""
    if lhs.ctx != rhs.ctx:
        raise ValueError("identity sides live in different contexts")
    n = lhs.ctx.n
    if n > max_host_vertices or n > 6:
        raise ValueError(f"verification hosts capped at {min(max_host_vertices, 6)} vertices")
    if n <= 5:
        from .hostgraphs import all_labeled_hosts

        hosts = all_labeled_hosts(n)
    else:
        hosts = (host_from_small(g) for g in all_graphs(6))
    checked = 0
    for host in hosts:
        ev = HostEvaluator(host, lhs.ctx)
        lv = lhs.evaluate(host, ev)
        rv = rhs.evaluate(host, ev)
        checked += 1
        if lv != rv:
            return IdentityReport(False, checked, graph6_emit(host), lv, rv)
    return IdentityReport(True, checked)


# ---------------------------------------------------------------------------
# Bundled identity suite

def _component_ids(h: SmallGraph) -> tuple[int, ...]:
    """Component index of each vertex under the graph's own labeling."""
    parent = list(range(h.vertex_count))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for (i, j) in h.edges:
        parent[find(i)] = find(j)
    roots: dict[int, int] = {}
    out = []
    for i in range(h.vertex_count):
        r = find(i)
        out.append(roots.setdefault(r, len(roots)))
    return tuple(out)


def _injective_g_sum(h: SmallGraph, host: HostGraph, ctx: ProblemContext) -> Fraction:
    """Scaled factor of h by summing over all injective vertex placements and
    dividing by aut; slower than the edge-set route but answers for patterns
    with isolated vertices from first principles."""
    a, b = ctx.a, ctx.b
    rows = host.rows
    total = 0
    for perm in itertools.permutations(range(ctx.n), h.vertex_count):
        prod = 1
        for (x, y) in h.edges:
            i, j = perm[x], perm[y]
            prod *= (b - a) if (rows[i] >> j) & 1 else -a
        total += prod
    return Fraction(total, h.aut_count) / b ** h.edge_count


def _separating_partitions(comp_of: tuple[int, ...]):
    """Set partitions of the vertices in which no part holds two vertices of
    the same component.  Parts are therefore always independent sets."""
    v = len(comp_of)
    parts: list[list[int]] = []
    out: list[list[list[int]]] = []

    def place(i):
        if i == v:
            out.append([list(pt) for pt in parts])
            return
        for pt in parts:
            if all(comp_of[j] != comp_of[i] for j in pt):
                pt.append(i)
                place(i + 1)
                pt.pop()
        parts.append([i])
        place(i + 1)
        parts.pop()

    place(0)
    return out


def run_identity_suite(max_vertices: int = 6,
                       densities=("1/2", "1/3", "2/5")) -> dict:
    """Exhaustively check the algebraic identities the rest of the package
    leans on, by exact evaluation against literal subgraph counting.

    Per density and per host size n = 2..max_vertices, on every labeled host
    (isomorphism-class representatives once n reaches 6):

      * the X-to-g expansion of every connected pattern on <= 4 vertices,
        plus C5 and K5, matches the directly counted X value;
      * the injective-count product rule: for disconnected H, the product of
        aut(C) * X_C over components equals the sum of aut(H/P) * X_{H/P}
        over partitions P of V(H) that keep each component's vertices in
        distinct parts;
      * padding a pattern with m isolated vertices multiplies its scaled
        factor by C(n - v, m);
      * the closed form for g_K2 squared, both as an exact coefficient
        identity and pointwise;
      * product_expand agrees with the pointwise product of factor values.

    Returns a dict with hosts_checked, identities_checked, failures (list of
    human-readable strings) and the overall pass flag.
    """
    from .hostgraphs import all_labeled_hosts
    from .smallgraphs import ALIASES, connected_upto, quotient

    if not 2 <= max_vertices <= 6:
        raise ValueError("max_vertices must be between 2 and 6")
    k2 = ALIASES["K2"]
    p2 = ALIASES["P2"]
    k3 = ALIASES["K3"]
    two_k2 = ALIASES["2K2"]
    k1 = ALIASES["K1"]

    expansion_targets = ([h for h in connected_upto(4)]
                         + [ALIASES["C5"], ALIASES["K5"]])
    partition_targets = [two_k2, disjoint_union(k2, p2), disjoint_union(k2, k3)]
    partition_data = []
    for h in partition_targets:
        comp_of = _component_ids(h)
        quots = [quotient(h, part) for part in _separating_partitions(comp_of)]
        partition_data.append((h, [(q, q.aut_count) for q in quots]))
    padding_targets = [(h, m) for h in (k2, p2, k3, two_k2) for m in (1, 2)]
    product_pairs = [(k2, k2), (k2, p2), (k2, k3), (p2, p2), (p2, k3),
                     (k3, k3), (k2, two_k2)]

    hosts_checked = 0
    identities_checked = 0
    failures: list[str] = []

    def fail(tag, ctx, host, lhs, rhs):
        failures.append(f"{tag} at n={ctx.n} p={ctx.p_token()} "
                        f"host={graph6_emit(host)}: {lhs} != {rhs}")

    for ptext in densities:
        for n in range(2, max_vertices + 1):
            ctx = ProblemContext.make(n, ptext)
            expansions = [(h, expand_x_in_g(h, ctx)) for h in expansion_targets]
            g_k2 = StatVector.unit("g", k2, ctx)
            sq_lhs = product_expand(g_k2, g_k2, ctx)
            # keys too large to embed evaluate to zero and are normalized away
            sq_rhs = StatVector("g", ctx, {
                g: c for g, c in ((two_k2, Fraction(2)),
                                  (p2, Fraction(2)),
                                  (k2, -(2 * ctx.p - 1)),
                                  (EMPTY, ctx.pq * binom(n, 2)))
                if g.vertex_count <= n})
            identities_checked += 1
            if sq_lhs != sq_rhs:
                failures.append(f"g_K2^2 coefficients differ at n={n} p={ptext}")
            products = [(h1, h2,
                         product_expand(StatVector.unit("g", h1, ctx),
                                        StatVector.unit("g", h2, ctx), ctx))
                        for h1, h2 in product_pairs]

            if n <= 5:
                hosts = all_labeled_hosts(n)
            else:
                hosts = (host_from_small(g) for g in all_graphs(6))
            first_host = True
            for host in hosts:
                hosts_checked += 1
                ev = HostEvaluator(host, ctx)
                for h, vec in expansions:
                    if first_host:
                        identities_checked += 1
                    if vec.evaluate(host, ev) != ev.x(h):
                        fail(f"X({token_of(h)}) expansion", ctx, host,
                             vec.evaluate(host, ev), ev.x(h))
                for h, quots in partition_data:
                    if first_host:
                        identities_checked += 1
                    lhs = math.prod(c.aut_count * ev.x(c) for c in components(h))
                    rhs = sum(aut * ev.x(q) for q, aut in quots)
                    if lhs != rhs:
                        fail(f"partition rule for {token_of(h)}", ctx, host,
                             lhs, rhs)
                for h, m in padding_targets:
                    if first_host:
                        identities_checked += 1
                    padded = h
                    for _ in range(m):
                        padded = disjoint_union(padded, k1)
                    lhs = _injective_g_sum(padded, host, ctx)
                    rhs = binom(n - h.vertex_count, m) * ev.g(h)
                    if lhs != rhs:
                        fail(f"isolated-vertex padding of {token_of(h)}",
                             ctx, host, lhs, rhs)
                if first_host:
                    identities_checked += 1
                if sq_rhs.evaluate(host, ev) != ev.g(k2) ** 2:
                    fail("g_K2^2 pointwise", ctx, host,
                         sq_rhs.evaluate(host, ev), ev.g(k2) ** 2)
                for h1, h2, vec in products:
                    if first_host:
                        identities_checked += 1
                    if vec.evaluate(host, ev) != ev.g(h1) * ev.g(h2):
                        fail(f"product {token_of(h1)}*{token_of(h2)}",
                             ctx, host, vec.evaluate(host, ev),
                             ev.g(h1) * ev.g(h2))
                first_host = False

    return {
        "hosts_checked": hosts_checked,
        "identities_checked": identities_checked,
        "failures": failures,
        "passed": not failures,
    }
