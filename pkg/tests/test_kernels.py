"""Backend parity and determinism for the counting kernels.

Every test that touches both implementations asserts bit-identical output,
not approximate agreement: the compiled path is an optimization, never a
different algorithm.
"""

import os
import subprocess
import sys
from math import comb

import pytest

from graphfactor import kernels
from graphfactor.hostgraphs import (count_upto4, host_from_mask, sample_host,
                                    UPTO4_NAMES)
from graphfactor.kernels import (backend, default_workers, exhaustive_c23,
                                 exhaustive_upto4, mc_c23, upto4_counts,
                                 UPTO4_KEY_ORDER)

HAVE_CYTHON = backend() == "cython"
needs_cython = pytest.mark.skipif(not HAVE_CYTHON,
                                  reason="compiled backend not built")


def test_backend_reports_known_name():
    assert backend() in ("pure", "cython")


def test_resolve_rejects_unknown_impl():
    with pytest.raises(ValueError):
        exhaustive_c23(4, impl="fast")


def test_default_workers_env(monkeypatch):
    monkeypatch.setenv("GRAPHFACTOR_WORKERS", "3")
    assert default_workers() == 3
    monkeypatch.setenv("GRAPHFACTOR_WORKERS", "0")
    assert default_workers() == 1
    monkeypatch.delenv("GRAPHFACTOR_WORKERS")
    assert default_workers() >= 1


# ---------------------------------------------------------------------------
# Exhaustive (edges, cherries, triangles) census

def test_c23_total_mass_and_extremes():
    for n in (3, 4, 5):
        counts, masks = exhaustive_c23(n)
        assert masks is None
        assert sum(counts.values()) == 1 << comb(n, 2)
        assert counts[(0, 0, 0)] == 1                       # empty host
        full = (comb(n, 2), 3 * comb(n, 3), comb(n, 3))     # complete host
        assert counts[full] == 1


def test_c23_pure_equals_cython():
    if not HAVE_CYTHON:
        pytest.skip("compiled backend not built")
    for n in (4, 5, 6):
        assert exhaustive_c23(n, impl="pure") == exhaustive_c23(n, impl="cython")


def test_c23_range_partition_composes():
    n = 5
    hi = 1 << comb(n, 2)
    cut = hi // 3
    whole, _ = exhaustive_c23(n)
    left, _ = exhaustive_c23(n, start=0, end=cut)
    right, _ = exhaustive_c23(n, start=cut, end=hi)
    merged = dict(left)
    for k, v in right.items():
        merged[k] = merged.get(k, 0) + v
    assert merged == whole


def test_c23_target_masks():
    # hosts of K4 with exactly (3, 3, 1): the four labeled triangles
    counts, masks = exhaustive_c23(4, target=(3, 3, 1))
    assert counts[(3, 3, 1)] == 4
    assert len(masks) == 4
    by_name = {name: g for name, g in UPTO4_NAMES}
    for mask in masks:
        host = host_from_mask(4, mask)
        c = count_upto4(host)
        got = tuple(c[by_name[k].canonical_code] for k in ("K2", "P2", "K3"))
        assert got == (3, 3, 1)


def test_c23_worker_count_does_not_change_output():
    a = exhaustive_c23(6, workers=1)
    b = exhaustive_c23(6, workers=4)
    assert a == b


def test_c23_rejects_bad_ranges():
    with pytest.raises(ValueError):
        exhaustive_c23(4, start=5, end=3)
    with pytest.raises(ValueError):
        exhaustive_c23(0)
    with pytest.raises(ValueError):
        exhaustive_c23(11)


# ---------------------------------------------------------------------------
# Exhaustive 9-motif census

def test_upto4_census_matches_per_host_recount():
    n = 5
    counts = exhaustive_upto4(n)
    assert sum(counts.values()) == 1 << comb(n, 2)
    order = [g for _, g in UPTO4_NAMES]
    recount: dict[tuple, int] = {}
    for mask in range(1 << comb(n, 2)):
        c = count_upto4(host_from_mask(n, mask))
        key = tuple(c[g.canonical_code] if g.canonical_code in c else 0
                    for g in order)
        recount[key] = recount.get(key, 0) + 1
    assert counts == recount


def test_upto4_pure_equals_cython():
    if not HAVE_CYTHON:
        pytest.skip("compiled backend not built")
    for n in (4, 5):
        assert exhaustive_upto4(n, impl="pure") == \
            exhaustive_upto4(n, impl="cython")


def test_upto4_counts_single_host_matches_table():
    for n, seed in ((9, 5), (20, 6), (40, 7)):
        host = sample_host(n, 1, 2, seed)
        vec = upto4_counts(host)
        table = count_upto4(host)
        by_name = dict(zip(UPTO4_KEY_ORDER, vec))
        named = {name: table[g.canonical_code] for name, g in UPTO4_NAMES}
        assert by_name == named
        if HAVE_CYTHON:
            assert upto4_counts(host, impl="pure") == \
                upto4_counts(host, impl="cython")


# ---------------------------------------------------------------------------
# Monte Carlo sampler

def test_mc_c23_deterministic_and_worker_independent():
    ref = mc_c23(12, 1, 3, 5000, 99)
    assert sum(ref.values()) == 5000
    assert mc_c23(12, 1, 3, 5000, 99) == ref
    assert mc_c23(12, 1, 3, 5000, 99, workers=4) == ref
    assert mc_c23(12, 1, 3, 5000, 99, workers=7) == ref


def test_mc_c23_pure_equals_cython():
    if not HAVE_CYTHON:
        pytest.skip("compiled backend not built")
    for n, a, b in ((8, 1, 2), (13, 2, 5), (20, 1, 3)):
        assert mc_c23(n, a, b, 3000, 7, impl="pure") == \
            mc_c23(n, a, b, 3000, 7, impl="cython")


def test_mc_c23_edge_marginal_near_binomial_mean():
    n, a, b, seed = 10, 2, 5, 31
    counts = mc_c23(n, a, b, 20000, seed)
    m = comb(n, 2)
    total = sum(counts.values())
    mean_edges = sum(k[0] * v for k, v in counts.items()) / total
    # sd of the sample mean is sqrt(m p q / N) ~ 0.023; allow 6 sigma
    assert abs(mean_edges - m * a / b) < 0.15


def test_mc_c23_agrees_with_exhaustive_distribution():
    # small n: the MC law must sit near the exactly known c23 law
    n, samples = 5, 20000
    exact, _ = exhaustive_c23(n)
    hi = 1 << comb(n, 2)
    mc = mc_c23(n, 1, 2, samples, 17)
    for key in [(0, 0, 0), (comb(n, 2), 3 * comb(n, 3), comb(n, 3))]:
        want = exact[key] / hi
        got = mc.get(key, 0) / samples
        assert abs(got - want) < 5 * (want / samples) ** 0.5 + 2 / samples


def test_mc_c23_huge_denominator_uses_pure_path():
    big_b = (1 << 40) + 1
    counts = mc_c23(6, 1, big_b, 2000, 3)
    # nearly always empty at density ~ 2^-40
    assert counts.get((0, 0, 0), 0) >= 1999
    if HAVE_CYTHON:
        with pytest.raises(RuntimeError):
            mc_c23(6, 1, big_b, 100, 3, impl="cython")


def test_mc_c23_rejects_bad_arguments():
    with pytest.raises(ValueError):
        mc_c23(1, 1, 2, 10, 0)
    with pytest.raises(ValueError):
        mc_c23(65, 1, 2, 10, 0)
    with pytest.raises(ValueError):
        mc_c23(8, 1, 2, 0, 0)


# ---------------------------------------------------------------------------
# Environment override

def test_pure_env_forces_pure_backend():
    code = ("import graphfactor.kernels as k; "
            "print(k.backend())")
    env = dict(os.environ, GRAPHFACTOR_PURE="1")
    out = subprocess.run([sys.executable, "-c", code], env=env,
                         capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "pure"
