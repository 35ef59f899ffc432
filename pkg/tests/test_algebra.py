"""Factor algebra at fixed (n, p): scaled factor values, the X-to-g change
of basis, overlay products, star bases, and the bundled identity suite.

The product identities asserted here were derived by hand from the overlay
classification (which pairs of copies produce which union pattern, with the
squared-edge reduction (x-p)^2 = (1-2p)(x-p) + p(1-p)) and are therefore
independent of the implementation being tested.
"""

import itertools
import random
from fractions import Fraction

import pytest

from graphfactor.algebra import (HostEvaluator, ProblemContext, StatVector,
                                 expand_x_in_g, plain_to_star, product_expand,
                                 run_identity_suite, scaled_factor_value,
                                 star_to_plain, verify_identity,
                                 xstar_to_gstar)
from graphfactor.hostgraphs import (all_labeled_hosts, complete_host,
                                    count_in_complete, host_from_edges)
from graphfactor.numtheory import binom
from graphfactor.smallgraphs import (ALIASES, EMPTY, K2, K3, P2, all_graphs,
                                     connected_upto, disjoint_union,
                                     niv_upto, small_graph, token_of)

PAW = small_graph(4, [(0, 1), (0, 2), (1, 2), (2, 3)])


def _brute_g(h, host, ctx):
    """Literal sum over injective placements divided by aut; independent of
    every counting shortcut in the package."""
    total = Fraction(0)
    p = ctx.p
    for perm in itertools.permutations(range(host.n), h.vertex_count):
        prod = Fraction(1)
        for (a, b) in h.edges:
            x = 1 if host.has_edge(perm[a], perm[b]) else 0
            prod *= x - p
        total += prod
    return total / h.aut_count


# ---------------------------------------------------------------------------
# Context

def test_context_validation():
    ctx = ProblemContext.make(10, "2/5")
    assert (ctx.a, ctx.b) == (2, 5)
    assert ctx.p == Fraction(2, 5) and ctx.pq == Fraction(6, 25)
    assert ctx.p_token() == "2/5"
    with pytest.raises(ValueError):
        ProblemContext(10, 2, 4)    # not lowest terms
    with pytest.raises(ValueError):
        ProblemContext(10, 3, 2)    # p > 1
    with pytest.raises(ValueError):
        ProblemContext(0, 1, 2)
    with pytest.raises(ValueError):
        ProblemContext.make(5, "0.5")


# ---------------------------------------------------------------------------
# Scaled factor values

def test_factor_value_closed_forms():
    rng = random.Random(4)
    for _ in range(20):
        n = rng.randrange(3, 8)
        edges = [e for e in itertools.combinations(range(n), 2)
                 if rng.random() < 0.5]
        host = host_from_edges(n, edges)
        for ptext in ("1/2", "2/5"):
            ctx = ProblemContext.make(n, ptext)
            assert scaled_factor_value(EMPTY, host, ctx) == 1
            assert scaled_factor_value(K2, host, ctx) == \
                host.edge_count - ctx.p * binom(n, 2)


def test_factor_value_matches_brute_force():
    rng = random.Random(11)
    patterns = list(connected_upto(4)) + [ALIASES["2K2"],
                                          disjoint_union(K2, K3)]
    for _ in range(10):
        n = rng.randrange(4, 7)
        edges = [e for e in itertools.combinations(range(n), 2)
                 if rng.random() < 0.5]
        host = host_from_edges(n, edges)
        ctx = ProblemContext.make(n, "1/3")
        for h in patterns:
            assert scaled_factor_value(h, host, ctx) == _brute_g(h, host, ctx)


def test_factor_value_on_complete_host_k2():
    # on K_n every edge indicator is 1, so g_K2 = (1-p) * C(n,2)
    for n in (5, 9):
        ctx = ProblemContext.make(n, "1/3")
        host = complete_host(n)
        assert scaled_factor_value(K2, host, ctx) == \
            (1 - ctx.p) * binom(n, 2)


def test_evaluator_direct_and_triangular_paths_agree():
    rng = random.Random(5)
    old = HostEvaluator.DIRECT_LIMIT
    try:
        for _ in range(6):
            n = 8
            edges = [e for e in itertools.combinations(range(n), 2)
                     if rng.random() < 0.5]
            host = host_from_edges(n, edges)
            ctx = ProblemContext.make(n, "2/5")
            HostEvaluator.DIRECT_LIMIT = 12
            direct = HostEvaluator(host, ctx)
            HostEvaluator.DIRECT_LIMIT = 0
            inverted = HostEvaluator(host, ctx)
            for h in niv_upto(4):
                assert direct.g(h) == inverted.g(h), token_of(h)
    finally:
        HostEvaluator.DIRECT_LIMIT = old


# ---------------------------------------------------------------------------
# StatVector

def test_statvector_arithmetic_and_guards():
    ctx = ProblemContext.make(6, "1/2")
    u = StatVector.unit("g", K2, ctx)
    w = StatVector("g", ctx, {K2: Fraction(2), K3: Fraction(1, 3)})
    s = u + w
    assert s.coeffs[K2] == 3 and s.coeffs[K3] == Fraction(1, 3)
    assert (s - w) == u
    with pytest.raises(ValueError):
        StatVector("nope", ctx, {})
    with pytest.raises(ValueError):
        StatVector("g", ctx, {disjoint_union(K2, ALIASES["K1"]): Fraction(1)})
    with pytest.raises(AttributeError):
        u.basis = "X"


def test_statvector_drops_zero_coefficients():
    ctx = ProblemContext.make(6, "1/2")
    v = StatVector("g", ctx, {K2: Fraction(0), K3: Fraction(1)})
    assert K2 not in v.coeffs and K3 in v.coeffs


def test_statvector_json_round_trip():
    ctx = ProblemContext.make(6, "2/5")
    v = StatVector("X", ctx, {K2: Fraction(3, 7), ALIASES["C4"]: Fraction(-2)})
    again = StatVector.from_json(v.to_json())
    assert again == v


# ---------------------------------------------------------------------------
# X in the g basis: coefficients derived by dropping edge subsets

def test_expand_k2():
    ctx = ProblemContext.make(9, "1/3")
    vec = expand_x_in_g(K2, ctx)
    assert vec.coeffs == {K2: Fraction(1), EMPTY: ctx.p * binom(9, 2)}


def test_expand_p2():
    n = 9
    ctx = ProblemContext.make(n, "1/3")
    p = ctx.p
    vec = expand_x_in_g(P2, ctx)
    assert vec.coeffs == {P2: Fraction(1),
                          K2: 2 * (n - 2) * p,
                          EMPTY: 3 * binom(n, 3) * p ** 2}


def test_expand_k3():
    n = 9
    ctx = ProblemContext.make(n, "1/3")
    p = ctx.p
    vec = expand_x_in_g(K3, ctx)
    assert vec.coeffs == {K3: Fraction(1),
                          P2: p,
                          K2: (n - 2) * p ** 2,
                          EMPTY: binom(n, 3) * p ** 3}


def test_expand_leading_coefficient_is_one():
    ctx = ProblemContext.make(12, "2/5")
    for h in connected_upto(5):
        assert expand_x_in_g(h, ctx).coeffs[h] == 1


def test_expand_evaluates_to_subgraph_count():
    rng = random.Random(19)
    ctx = ProblemContext.make(7, "2/5")
    for _ in range(15):
        edges = [e for e in itertools.combinations(range(7), 2)
                 if rng.random() < 0.5]
        host = host_from_edges(7, edges)
        ev = HostEvaluator(host, ctx)
        for h in (K2, P2, K3, ALIASES["C4"], ALIASES["K4"], ALIASES["C5"]):
            assert expand_x_in_g(h, ctx).evaluate(host, ev) == ev.x(h)


# ---------------------------------------------------------------------------
# Products

def test_product_k2_k2():
    n = 9
    ctx = ProblemContext.make(n, "2/5")
    p, pq = ctx.p, ctx.pq
    u = StatVector.unit("g", K2, ctx)
    got = product_expand(u, u, ctx)
    assert got.coeffs == {ALIASES["2K2"]: Fraction(2),
                          P2: Fraction(2),
                          K2: 1 - 2 * p,
                          EMPTY: pq * binom(n, 2)}


def test_product_k2_p2():
    n = 9
    ctx = ProblemContext.make(n, "2/5")
    p, pq = ctx.p, ctx.pq
    got = product_expand(StatVector.unit("g", K2, ctx),
                         StatVector.unit("g", P2, ctx), ctx)
    assert got.coeffs == {disjoint_union(K2, P2): Fraction(1),
                          ALIASES["P3"]: Fraction(2),
                          ALIASES["K13"]: Fraction(3),
                          K3: Fraction(3),
                          P2: 2 * (1 - 2 * p),
                          K2: 2 * (n - 2) * pq}


def test_product_k2_k3():
    n = 9
    ctx = ProblemContext.make(n, "2/5")
    p, pq = ctx.p, ctx.pq
    got = product_expand(StatVector.unit("g", K2, ctx),
                         StatVector.unit("g", K3, ctx), ctx)
    assert got.coeffs == {disjoint_union(K2, K3): Fraction(1),
                          PAW: Fraction(1),
                          K3: 3 * (1 - 2 * p),
                          P2: pq}


def test_product_is_commutative_and_pointwise_correct():
    ctx = ProblemContext.make(6, "1/2")
    pairs = [(K2, P2), (P2, P2), (K2, ALIASES["2K2"]), (K3, K3)]
    rng = random.Random(8)
    for h1, h2 in pairs:
        u = StatVector.unit("g", h1, ctx)
        w = StatVector.unit("g", h2, ctx)
        assert product_expand(u, w, ctx) == product_expand(w, u, ctx)
        vec = product_expand(u, w, ctx)
        for _ in range(5):
            edges = [e for e in itertools.combinations(range(6), 2)
                     if rng.random() < 0.5]
            host = host_from_edges(6, edges)
            ev = HostEvaluator(host, ctx)
            assert vec.evaluate(host, ev) == ev.g(h1) * ev.g(h2)


def test_product_empty_is_identity():
    ctx = ProblemContext.make(7, "1/3")
    one = StatVector.unit("g", EMPTY, ctx)
    v = StatVector("g", ctx, {K2: Fraction(5), K3: Fraction(-1, 2)})
    assert product_expand(one, v, ctx) == v


def test_product_rejects_wrong_basis():
    ctx = ProblemContext.make(6, "1/2")
    with pytest.raises(ValueError):
        product_expand(StatVector.unit("X", K2, ctx),
                       StatVector.unit("g", K2, ctx), ctx)


# ---------------------------------------------------------------------------
# Star bases

def test_star_plain_round_trip():
    ctx = ProblemContext.make(8, "2/5")
    for h in (ALIASES["2K2"], disjoint_union(K2, K3), disjoint_union(K2, P2)):
        v = StatVector.unit("g", h, ctx)
        assert star_to_plain(plain_to_star(v)) == v
    mixed = StatVector("g", ctx, {K2: Fraction(1), ALIASES["2K2"]: Fraction(-3)})
    assert star_to_plain(plain_to_star(mixed)) == mixed


def test_star_vector_evaluates_as_component_product():
    ctx = ProblemContext.make(6, "1/2")
    h = ALIASES["2K2"]
    star = StatVector.unit("gstar", h, ctx)
    rng = random.Random(12)
    for _ in range(6):
        edges = [e for e in itertools.combinations(range(6), 2)
                 if rng.random() < 0.5]
        host = host_from_edges(6, edges)
        ev = HostEvaluator(host, ctx)
        assert star.evaluate(host, ev) == ev.g(K2) ** 2


def test_xstar_to_gstar_leading_term():
    ctx = ProblemContext.make(9, "1/3")
    for h in (K2, P2, K3, ALIASES["2K2"]):
        vec = xstar_to_gstar(h, ctx)
        assert vec.basis == "gstar"
        assert vec.coeffs[h] == 1


# ---------------------------------------------------------------------------
# Identity verification

def test_verify_identity_passes_and_counts_hosts():
    ctx = ProblemContext.make(4, "1/2")
    lhs = expand_x_in_g(K3, ctx)
    rhs = StatVector.unit("X", K3, ctx)
    # same statistic in two bases; evaluating must agree on all 64 hosts
    report = verify_identity(lhs, rhs)
    assert report.passed and report.hosts_checked == 64


def test_verify_identity_reports_witness():
    ctx = ProblemContext.make(3, "1/2")
    lhs = StatVector.unit("X", K2, ctx)
    rhs = StatVector.unit("X", P2, ctx)
    report = verify_identity(lhs, rhs)
    assert not report.passed
    assert report.witness is not None
    assert report.lhs_value != report.rhs_value


def test_verify_identity_rejects_context_mismatch():
    v1 = StatVector.unit("g", K2, ProblemContext.make(4, "1/2"))
    v2 = StatVector.unit("g", K2, ProblemContext.make(4, "1/3"))
    with pytest.raises(ValueError):
        verify_identity(v1, v2)


def test_partition_rule_for_two_disjoint_edges_at_n5():
    # product of the two components' injective counts vs the quotient sum:
    # (2 X_K2)^2 = 8 X_2K2 + 8 X_P2 + 4 X_K2 on every labeled 5-vertex host
    for host in all_labeled_hosts(5):
        ctx = ProblemContext.make(5, "1/2")
        ev = HostEvaluator(host, ctx)
        lhs = (2 * ev.x(K2)) ** 2
        rhs = 8 * ev.x(ALIASES["2K2"]) + 8 * ev.x(P2) + 4 * ev.x(K2)
        assert lhs == rhs


def test_identity_suite_small_run():
    out = run_identity_suite(max_vertices=4, densities=("1/2",))
    assert out["passed"] and not out["failures"]
    assert out["hosts_checked"] == 2 + 8 + 64
    assert out["identities_checked"] > 0


def test_identity_suite_rejects_bad_sizes():
    with pytest.raises(ValueError):
        run_identity_suite(max_vertices=1)
    with pytest.raises(ValueError):
        run_identity_suite(max_vertices=7)


# ---------------------------------------------------------------------------
# Orthogonality of distinct factors (exhaustive expectation at small n)

def test_factor_orthogonality_n4():
    # E[g_H g_H'] under G(4, 1/3): zero for distinct patterns, and
    # (pq)^e(H) times the copy count in K_4 on the diagonal
    n = 4
    ctx = ProblemContext.make(n, "1/3")
    m = binom(n, 2)
    patterns = [g for g in niv_upto(3) if g.vertex_count]
    sums = {}
    for host in all_labeled_hosts(n):
        weight = ctx.p ** host.edge_count * (1 - ctx.p) ** (m - host.edge_count)
        vals = {h: scaled_factor_value(h, host, ctx) for h in patterns}
        for h1 in patterns:
            for h2 in patterns:
                sums[(h1, h2)] = sums.get((h1, h2), Fraction(0)) + \
                    weight * vals[h1] * vals[h2]
    for h1 in patterns:
        for h2 in patterns:
            got = sums[(h1, h2)]
            if h1 is h2:
                expected = ctx.pq ** h1.edge_count * count_in_complete(h1, n)
                assert got == expected, token_of(h1)
            else:
                assert got == 0, (token_of(h1), token_of(h2))
