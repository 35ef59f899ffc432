"""Bitset hosts, graph6 round trips, and exact subgraph counting, checked
against literal injective-placement enumeration."""

import itertools
import random

import pytest

from graphfactor.smallgraphs import (ALIASES, K2, K3, P2, all_graphs,
                                     by_code, connected_upto, disjoint_union,
                                     small_graph)
from graphfactor.hostgraphs import (HostGraph, all_labeled_hosts,
                                    complete_host, copies_in_complete,
                                    count_in_complete, count_subgraph_copies,
                                    count_upto4, graph6_emit, graph6_parse,
                                    host_from_edges, host_from_mask,
                                    host_from_small, host_pairs, sample_host)


def _brute_copies(h, host):
    """Copies of h in host by raw injective maps divided by automorphisms."""
    total = 0
    for perm in itertools.permutations(range(host.n), h.vertex_count):
        if all(host.has_edge(perm[a], perm[b]) for a, b in h.edges):
            total += 1
    assert total % h.aut_count == 0
    return total // h.aut_count


def _random_host(rng, n, density=0.5):
    edges = [e for e in itertools.combinations(range(n), 2)
             if rng.random() < density]
    return host_from_edges(n, edges)


# ---------------------------------------------------------------------------
# Construction and graph6

def test_host_basics():
    g = host_from_edges(4, [(0, 1), (1, 2)])
    assert g.n == 4 and g.edge_count == 2
    assert g.degrees == (1, 2, 1, 0)
    assert g.has_edge(0, 1) and g.has_edge(1, 0)
    assert not g.has_edge(0, 2)


def test_host_from_mask_matches_pairs():
    n = 5
    pairs = host_pairs(n)
    rng = random.Random(1)
    for _ in range(40):
        mask = rng.randrange(1 << len(pairs))
        g = host_from_mask(n, mask)
        for k, (i, j) in enumerate(pairs):
            assert g.has_edge(i, j) == bool((mask >> k) & 1)


def test_graph6_known_strings():
    assert graph6_emit(complete_host(5)) == "D~{"
    empty5 = host_from_edges(5, [])
    assert graph6_emit(empty5) == "D??"
    parsed = graph6_parse("D~{")
    assert parsed.n == 5 and parsed.edge_count == 10


def test_graph6_round_trip_random():
    rng = random.Random(9)
    for _ in range(150):
        n = rng.randrange(1, 40)
        g = _random_host(rng, n)
        assert graph6_parse(graph6_emit(g)).rows == g.rows


def test_graph6_rejects_garbage():
    with pytest.raises(ValueError):
        graph6_parse("D~")      # truncated edge bits
    with pytest.raises(ValueError):
        graph6_parse("")


def test_all_labeled_hosts_counts():
    for n in range(1, 5):
        hosts = list(all_labeled_hosts(n))
        assert len(hosts) == 2 ** (n * (n - 1) // 2)
        assert len({g.rows for g in hosts}) == len(hosts)


# ---------------------------------------------------------------------------
# Subgraph counting

def test_count_pins_in_complete_hosts():
    k5 = complete_host(5)
    assert count_subgraph_copies(K2, k5) == 10
    assert count_subgraph_copies(K3, k5) == 10
    assert count_subgraph_copies(P2, k5) == 30
    assert count_subgraph_copies(ALIASES["C5"], k5) == 12
    assert count_subgraph_copies(ALIASES["K5"], k5) == 1
    assert count_subgraph_copies(ALIASES["2K2"], k5) == 15


def test_k2_p2_pair_pattern_pins():
    # copies of K2 ⊔ P2 inside three 5-vertex hosts
    pat = disjoint_union(K2, P2)
    k5 = ALIASES["K5"]
    k5_minus_e = small_graph(5, [e for e in itertools.combinations(range(5), 2)
                                 if e != (3, 4)])
    k5_minus_path = small_graph(5, [e for e in itertools.combinations(range(5), 2)
                                    if e not in ((2, 3), (3, 4))])
    assert count_subgraph_copies(pat, host_from_small(k5)) == 30
    assert count_subgraph_copies(pat, host_from_small(k5_minus_e)) == 21
    assert count_subgraph_copies(pat, host_from_small(k5_minus_path)) == 13


def test_count_matches_brute_force_on_random_hosts():
    rng = random.Random(17)
    patterns = list(connected_upto(4)) + [ALIASES["2K2"], ALIASES["C5"],
                                          disjoint_union(K2, P2)]
    for _ in range(25):
        host = _random_host(rng, rng.randrange(4, 8))
        for h in patterns:
            assert count_subgraph_copies(h, host) == _brute_copies(h, host)


def test_count_degenerate_cases():
    host = _random_host(random.Random(2), 6)
    big = ALIASES["K7"]
    assert count_subgraph_copies(big, host) == 0
    empty_host = host_from_edges(3, [])
    assert count_subgraph_copies(K2, empty_host) == 0


def test_count_in_complete_closed_form():
    import math
    for n in (5, 7, 12, 40):
        for h in connected_upto(4):
            v, aut = h.vertex_count, h.aut_count
            expected = (math.comb(n, v) * math.factorial(v)) // aut
            assert count_in_complete(h, n) == expected


def test_copies_in_complete_consistency():
    for h in (K2, P2, K3, ALIASES["2K2"], ALIASES["C4"]):
        copies = copies_in_complete(h, 5)
        assert len(copies) == count_in_complete(h, 5)
        assert len(set(copies)) == len(copies)
        for copy in copies:
            assert len(copy) == h.edge_count


# ---------------------------------------------------------------------------
# The 4-vertex closed-form counter

def test_count_upto4_vs_dfs_everywhere_small():
    checked = 0
    for n in range(1, 6):
        for host in all_labeled_hosts(n):
            table = count_upto4(host)
            for code, val in table.items():
                assert val == count_subgraph_copies(by_code(code), host)
                checked += 1
    assert checked == 9 * sum(2 ** (n * (n - 1) // 2) for n in range(1, 6))


def test_count_upto4_vs_dfs_six_vertex_classes():
    for g in all_graphs(6):
        host = host_from_small(g)
        for code, val in count_upto4(host).items():
            assert val == count_subgraph_copies(by_code(code), host)


def test_count_upto4_vs_dfs_random_larger():
    rng = random.Random(23)
    for _ in range(12):
        host = _random_host(rng, rng.randrange(8, 16), density=0.4)
        for code, val in count_upto4(host).items():
            assert val == count_subgraph_copies(by_code(code), host)


def test_diamond_counts_subgraph_copies_not_induced():
    # K4 plus isolated vertices: every edge of the K4 is the hinge of one
    # diamond, none of them induced
    host = host_from_edges(6, list(itertools.combinations(range(4), 2)))
    diamond = small_graph(4, [(0, 1), (0, 2), (1, 2), (0, 3), (1, 3)])
    assert count_upto4(host)[diamond.canonical_code] == 6
    assert count_subgraph_copies(diamond, host) == 6


# ---------------------------------------------------------------------------
# Sampling

def test_sample_host_is_deterministic():
    g1 = sample_host(20, 1, 2, seed=42)
    g2 = sample_host(20, 1, 2, seed=42)
    assert g1.rows == g2.rows
    assert sample_host(20, 1, 2, seed=43).rows != g1.rows


def test_sample_host_density_is_sane():
    m = 30 * 29 // 2
    total = sum(sample_host(30, 1, 2, seed=s).edge_count for s in range(40))
    mean = total / 40
    assert abs(mean - m / 2) < 5 * (m * 0.25 / 40) ** 0.5 + 10


def test_sample_host_rational_density():
    m = 40 * 39 // 2
    total = sum(sample_host(40, 1, 5, seed=s).edge_count for s in range(40))
    mean = total / 40
    assert abs(mean - m / 5) < 6 * (m * 0.16 / 40) ** 0.5 + 10
