"""Timing comparison of the pure-Python and compiled counting kernels.

Run from the repository root:

    python3 benchmarks/bench_kernels.py

Both implementations compute identical output (asserted here and in the
test suite); the table reports wall time and the speedup of the compiled
path.  Sizes are chosen so the pure rows stay under a few seconds each.
"""

import time

from graphfactor import kernels
from graphfactor.hostgraphs import sample_host


def _time(fn, repeat=1):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def main():
    if kernels.backend() != "cython":
        print("compiled backend unavailable; nothing to compare")
        return

    rows = []

    for n in (5, 6):
        tp, rp = _time(lambda: kernels.exhaustive_c23(n, impl="pure"))
        tc, rc = _time(lambda: kernels.exhaustive_c23(n, impl="cython"),
                       repeat=3)
        assert rp == rc
        rows.append((f"exhaustive_c23 n={n}", tp, tc))

    for n in (5,):
        tp, rp = _time(lambda: kernels.exhaustive_upto4(n, impl="pure"))
        tc, rc = _time(lambda: kernels.exhaustive_upto4(n, impl="cython"),
                       repeat=3)
        assert rp == rc
        rows.append((f"exhaustive_upto4 n={n}", tp, tc))

    for n, samples in ((16, 20000), (30, 20000)):
        tp, rp = _time(lambda: kernels.mc_c23(n, 1, 2, samples, 7,
                                              impl="pure"))
        tc, rc = _time(lambda: kernels.mc_c23(n, 1, 2, samples, 7,
                                              impl="cython"), repeat=3)
        assert rp == rc
        rows.append((f"mc_c23 n={n} x{samples}", tp, tc))

    host = sample_host(120, 1, 2, 3)
    tp, rp = _time(lambda: kernels.upto4_counts(host, impl="pure"))
    tc, rc = _time(lambda: kernels.upto4_counts(host, impl="cython"),
                   repeat=3)
    assert rp == rc
    rows.append(("upto4_counts n=120", tp, tc))

    width = max(len(r[0]) for r in rows)
    print(f"{'kernel':<{width}}  {'pure':>9}  {'cython':>9}  {'speedup':>8}")
    for name, tp, tc in rows:
        print(f"{name:<{width}}  {tp:>8.3f}s  {tc:>8.3f}s  {tp / tc:>7.1f}x")


if __name__ == "__main__":
    main()
