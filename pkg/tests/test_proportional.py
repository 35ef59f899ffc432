"""Compatibility predicates, Pell machinery, and proportional-graph search.

Classical references pinned here: fundamental Pell solutions for small d
(including the d = 61 pair 1766319049 / 226153980), and the square pair
counts C(n(a), 2) = (s_a / 2)^2 along the half-density candidate walk.
"""

import json
import random
from fractions import Fraction

import pytest

from graphfactor import proportional as pr
from graphfactor.algebra import HostEvaluator, ProblemContext
from graphfactor.hostgraphs import (complete_host, graph6_parse,
                                    host_from_small, sample_host)
from graphfactor.kernels import backend
from graphfactor.numtheory import binom, isqrt_exact
from graphfactor.smallgraphs import ALIASES, K2, K3, P2, family, small_graph

C23 = family("C2,C3")
K5_MINUS_E = small_graph(5, [(0, 1), (0, 2), (0, 3), (0, 4), (1, 2),
                             (1, 3), (1, 4), (2, 3), (2, 4)])


# ---------------------------------------------------------------------------
# Catalogs

def test_hpc_catalog_shape_and_pinned_rows():
    rows = {r.graph: r for r in pr.hpc_catalog()}
    assert len(rows) == 30
    k5 = rows[ALIASES["K5"]]
    assert (k5.count_coeff, k5.edge_coeff, k5.pair_coeff) == (1, 1, 2)
    k5e = rows[K5_MINUS_E]
    assert (k5e.aut, k5e.e) == (12, 9)
    assert (k5e.count_coeff, k5e.edge_coeff, k5e.pair_coeff) == (10, 9, 14)
    k2 = rows[K2]
    assert (k2.count_coeff, k2.edge_coeff, k2.pair_coeff) == (1, 1, 0)
    k4 = rows[ALIASES["K4"]]
    assert (k4.count_coeff, k4.edge_coeff, k4.pair_coeff) == (1, 1, 0)
    c5 = rows[ALIASES["C5"]]
    assert (c5.count_coeff, c5.edge_coeff, c5.pair_coeff) == (12, 6, 4)


def test_pair_coeff_zero_below_five_vertices():
    for row in pr.hpc_catalog():
        if row.v < 5:
            assert row.pair_coeff == 0


def test_spc_catalog_shape():
    rows = {r.graph: r for r in pr.spc_catalog()}
    assert len(rows) == 9
    assert rows[K2].matching_coeff == 0
    # K4 holds three two-edge perfect matchings; 4 * 3 / 24 = 1/2
    assert rows[ALIASES["K4"]].matching_coeff == Fraction(1, 2)
    assert rows[ALIASES["C4"]].matching_coeff == 1


# ---------------------------------------------------------------------------
# Plain and super compatibility

def test_pc_denominator_two():
    hits = [n for n in range(3, 200) if pr.is_pc(n, 1, 2)]
    assert hits == [n for n in range(3, 200) if n % 8 == 0 or n % 16 == 1]


def test_pc_denominator_three_and_five():
    assert pr.is_pc(81, 1, 3) and pr.is_pc(82, 2, 3) and pr.is_pc(162, 1, 3)
    assert not pr.is_pc(27, 1, 3) and not pr.is_pc(80, 1, 3)
    assert pr.is_pc(125, 2, 5) and pr.is_pc(126, 1, 5)
    assert not pr.is_pc(25, 1, 5)


def test_pc_verdict_is_binomial_integrality():
    # the evaluation route in the verdict is literally divisibility of the
    # three count formulas; spot check the record fields
    v = pr.is_pc(48, 1, 4)
    assert v.by_valuation == v.by_evaluation == v.verdict
    assert (v.kind, v.n, v.a, v.b) == ("pc", 48, 1, 4)


def test_pc_rejects_bad_input():
    with pytest.raises(ValueError):
        pr.is_pc(2, 1, 2)
    with pytest.raises(ValueError):
        pr.is_pc(10, 2, 4)
    with pytest.raises(ValueError):
        pr.is_pc(10, 3, 2)


def test_spc_denominator_two():
    hits = [n for n in range(4, 2100) if pr.is_spc(n, 1, 2)]
    assert hits == [n for n in range(4, 2100)
                    if n % 64 == 0 or n % 128 == 1]


def test_spc_implies_pc_on_a_slice():
    for n in range(4, 1500):
        for b in (2, 3, 4):
            if pr.is_spc(n, 1, b):
                assert pr.is_pc(n, 1, b)


def test_spc_power_adjacent_denominator_four():
    assert pr.is_spc(2 ** 13, 1, 4)
    assert pr.is_spc(2 ** 11 + 1, 3, 4)
    assert not pr.is_spc(2 ** 12, 1, 4)
    assert not pr.is_spc(2 ** 10 + 1, 1, 4)


def test_dual_verdict_guards_route_disagreement():
    with pytest.raises(ArithmeticError):
        pr.DualVerdict("pc", 8, 1, 2, True, True, False)


# ---------------------------------------------------------------------------
# Hyper compatibility

def test_hpc_non_square_discriminant_fails_fast():
    w = pr.is_hpc(5, 1, 2, "+")
    assert not w and w.sqrt_disc is None and w.h is None and w.failing_h is None
    assert w.disc == 40


def test_hpc_candidate_with_failing_catalog_row():
    # n = 9 has square discriminant 144 at density 1/2 but is not compatible
    w = pr.is_hpc(9, 1, 2, "+")
    assert w.sqrt_disc == 12 and w.h == 6
    assert not w.verdict and w.failing_h is not None
    blob = w.to_json()
    assert blob["D_square"] and not blob["verdict"]
    assert blob["failing_H"] == pr.token_of(w.failing_h)
    json.dumps(blob)


def test_hpc_denominator_three_rule_matches_direct_check():
    # the rule says the first + branch hit at p = 1/3 is 3^9 and the first
    # - branch hits are 3^10 + 1 and 3^10 + 2
    direct_plus = [w.n for w in pr.hpc_scan(1, 3, "+", n_max=60000)]
    assert direct_plus == [19683, 39366, 59049, 59051]
    direct_minus = [w.n for w in pr.hpc_scan(1, 3, "-", n_max=60000)]
    assert direct_minus == [59050, 59051]
    for sign in ("+", "-"):
        want = [n for n in range(5, 60001)
                if pr.hpc_mod_three_rule(n, 1, sign)]
        got = direct_plus if sign == "+" else direct_minus
        assert want == got


def test_hpc_mod_three_rule_validation():
    with pytest.raises(ValueError):
        pr.hpc_mod_three_rule(100, 3, "+")
    with pytest.raises(ValueError):
        pr.hpc_mod_three_rule(4, 1, "+")
    with pytest.raises(ValueError):
        pr.is_hpc(10, 1, 2, "±")


def test_phi_values_integral_exactly_on_compatible_n():
    w = pr.is_hpc(19683, 1, 3, "+")
    assert w.verdict
    for row in pr.hpc_catalog():
        val = pr.phi_x_value(row.graph, 19683, 1, 3, w.h)
        assert val.denominator == 1
    bad = pr.is_hpc(9, 1, 2, "+")
    leak = pr.phi_x_value(bad.failing_h, 9, 1, 2, bad.h)
    assert leak.denominator > 1


def test_hpc_necessary_filter_agrees_with_verdicts():
    w = pr.is_hpc(19683, 1, 3, "+")
    assert pr.hpc_necessary_filter(19683, 1, 3, w.h)


# ---------------------------------------------------------------------------
# Pell machinery

def test_pell_fundamental_classical_table():
    table = {2: (3, 2), 3: (2, 1), 5: (9, 4), 6: (5, 2), 7: (8, 3),
             8: (3, 1), 10: (19, 6), 13: (649, 180),
             61: (1766319049, 226153980)}
    for d, (r, s) in table.items():
        sol = pr.pell_fundamental(d)
        assert (sol.r, sol.s, sol.index) == (r, s, 1)


def test_pell_rejects_squares_and_small_d():
    for d in (1, 0, -3):
        with pytest.raises(ValueError):
            pr.pell_fundamental(d)
    for d in (4, 9, 49):
        with pytest.raises(ValueError):
            pr.pell_fundamental(d)


def test_pell_iterate_powers():
    fund = pr.pell_fundamental(2)
    nxt = pr.pell_iterate(fund, 3)
    assert [(s.r, s.s) for s in nxt] == [(17, 12), (99, 70), (577, 408)]
    assert [s.index for s in nxt] == [2, 3, 4]


def test_pell_solution_invariant_is_checked():
    with pytest.raises(AssertionError):
        pr.PellSolution(2, 3, 3, 1)


def test_half_candidates_walk():
    assert pr.hpc_half_candidates(4) == [(2, 9), (3, 50), (4, 289)]
    for a, n in pr.hpc_half_candidates(100):
        root, square = isqrt_exact(binom(n, 2))
        assert square, a
        disc = pr.branch_discriminant(n, 1, 2)
        _, dsq = isqrt_exact(disc)
        assert dsq, a


def test_half_exponent_rule_first_window():
    hits = [a for a in range(2, 1300) if pr.half_exponent_rule(a)]
    assert hits == [511, 513, 1023, 1024, 1025]


def test_smallest_half_constant():
    n = pr.smallest_hpc_half()
    assert n == pr.KNOWN_SMALLEST_HALF_HPC
    assert len(str(n)) == 391
    assert str(n).startswith("393269643")
    assert pr.constant_digest() == ("d5401b7e4f98412279ff03f15430b46c"
                                    "5a562c2f1bda890da07e904f284bf530")


def test_generator_mode_emits_verified_witnesses():
    out = pr.hpc_scan(1, 2, "+", mode="generator", limit=1)
    assert len(out) == 1
    w = out[0]
    assert w.verdict and (w.n - 2) % (2 * 2 ** 12) == 0
    assert len(str(w.n)) == 1567


def test_generator_mode_honest_failure_paths():
    with pytest.raises(ValueError):
        pr.hpc_scan(1, 3, "+", mode="generator")        # degenerate Pell
    with pytest.raises(ValueError):
        pr.hpc_scan(8, 9, "+", mode="generator")        # 2a(b-a) = 16 square
    with pytest.raises(RuntimeError):
        pr.hpc_scan(1, 5, "+", mode="generator", unit_power_cap=10 ** 5)
    with pytest.raises(ValueError):
        pr.hpc_scan(1, 2, "+", mode="sideways")
    with pytest.raises(ValueError):
        pr.hpc_scan(1, 2, "+", mode="brute")            # n_max missing


# ---------------------------------------------------------------------------
# Concrete proportional graphs

def test_complete_graph_is_not_hat_proportional():
    host = complete_host(8)
    assert not pr.is_hat_proportional(host, "1/2", C23)


def test_hat_proportional_matches_direct_factor_values():
    rng = random.Random(2)
    ctx = ProblemContext.make(8, "1/2")
    for _ in range(20):
        host = sample_host(8, 1, 2, rng.randrange(10 ** 6))
        ev = HostEvaluator(host, ctx)
        want = all(ev.g(h) == 0 for h in C23)
        assert pr.is_hat_proportional(host, "1/2", C23) == want


def test_hat_proportional_validation():
    host = complete_host(6)
    with pytest.raises(ValueError):
        pr.is_hat_proportional(host, ProblemContext.make(7, "1/2"), C23)
    with pytest.raises(ValueError):
        pr.is_hat_proportional(complete_host(2), "1/2", C23)


def test_predicted_count_pins():
    ctx = ProblemContext.make(8, "1/2")
    pred = pr.predicted_count_proportional(C23, ctx)
    assert 1.2e6 < pred.count < 1.4e6
    assert 0 < pred.probability < 1
    blob = pred.to_json()
    assert blob["n"] == 8 and blob["family"] == ["K2", "P2", "K3"]


def test_predicted_count_refuses_off_lattice_sizes():
    with pytest.raises(ValueError):
        pr.predicted_count_proportional(C23, ProblemContext.make(7, "1/2"))
    with pytest.raises(ValueError):
        pr.predicted_count_proportional(family("C3"),
                                        ProblemContext.make(8, "1/2"))


def test_anneal_search_finds_proportional_graphs():
    ctx = ProblemContext.make(16, "1/2")
    result = pr.search_proportional(ctx, C23, mode="anneal", seed=3,
                                    limit=2, steps=400_000)
    assert result.mode == "anneal" and result.count == len(result.graphs)
    assert result.count >= 1
    for g6 in result.graphs:
        host = graph6_parse(g6)
        assert pr.is_hat_proportional(host, "1/2", C23)
    blob = result.to_json()
    assert blob["count"] == result.count
    assert blob["steps_used"] == result.steps_used > 0


def test_exhaustive_search_off_lattice_size_is_empty():
    # n = 4 at p = 1/2 forces x_K3 = 1/2, so no graph can qualify
    ctx = ProblemContext.make(4, "1/2")
    result = pr.search_proportional(ctx, C23, mode="exhaustive")
    assert result.count == 0 and result.graphs == ()


def test_search_rejects_unknown_mode():
    ctx = ProblemContext.make(8, "1/2")
    with pytest.raises(ValueError):
        pr.search_proportional(ctx, C23, mode="qualitative")
