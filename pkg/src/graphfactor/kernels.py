"""Hot counting kernels: exhaustive Gray-code enumeration of G(n,p) statistics
and blocked Monte Carlo sampling.

A compiled Cython core (graphfactor._ckernels) is used when importable; the
pure-Python implementations here are the reference and the fallback, and are
bit-for-bit interchangeable with the compiled ones (same Gray order, same
splitmix64 stream, same tie refinement for p = a/b).  Set GRAPHFACTOR_PURE=1
to force the fallback.

Sharding rules that make results independent of the worker count: exhaustive
runs split the Gray index range and merge exact sums (mask collections are
sorted at the end); Monte Carlo runs are blocked, block i always starts at
block_seed(seed, i) no matter which worker owns it.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from math import comb

from .numtheory import block_seed, splitmix64

try:  # pragma: no cover - exercised only when the extension is absent
    from . import _ckernels as _C
except ImportError:
    _C = None

if os.environ.get("GRAPHFACTOR_PURE"):
    _C = None

MC_BLOCK = 1 << 16
UPTO4_KEY_ORDER = ("K2", "P2", "K3", "P3", "K13", "C4", "paw", "diamond", "K4")


def backend() -> str:
    return "pure" if _C is None else "cython"


def _resolve(impl: str | None) -> str:
    if impl is None:
        return backend()
    if impl not in ("pure", "cython"):
        raise ValueError(f"unknown impl {impl!r}")
    if impl == "cython" and _C is None:
        raise RuntimeError("compiled kernels are not available")
    return impl


def default_workers() -> int:
    env = os.environ.get("GRAPHFACTOR_WORKERS")
    if env:
        return max(1, int(env))
    return min(os.cpu_count() or 1, 8)


# ---------------------------------------------------------------------------
# Pure reference implementations

def _host_pairs(n):
    return [(i, j) for i in range(n) for j in range(i + 1, n)]


def _tri_from_rows(n, rows) -> int:
    t = 0
    for u in range(n):
        m = rows[u] >> (u + 1) << (u + 1)
        while m:
            low = m & -m
            m ^= low
            v = low.bit_length() - 1
            t += ((rows[u] & rows[v]) >> (v + 1)).bit_count()
    return t


def _exhaustive_c23_pure(n, start, end, target):
    pairs = _host_pairs(n)
    rows = [0] * n
    deg = [0] * n
    gmask = start ^ (start >> 1)
    m = gmask
    e = 0
    while m:
        low = m & -m
        m ^= low
        u, v = pairs[low.bit_length() - 1]
        rows[u] |= 1 << v
        rows[v] |= 1 << u
        deg[u] += 1
        deg[v] += 1
        e += 1
    ch = sum(d * (d - 1) // 2 for d in deg)
    tr = _tri_from_rows(n, rows)
    counts: dict[tuple, int] = {}
    masks = [] if target is not None else None
    j = start
    while True:
        key = (e, ch, tr)
        counts[key] = counts.get(key, 0) + 1
        if masks is not None and key == target:
            masks.append(gmask)
        nxt = j + 1
        if nxt >= end:
            break
        bit = (nxt & -nxt).bit_length() - 1
        u, v = pairs[bit]
        gmask ^= 1 << bit
        if (rows[u] >> v) & 1:
            rows[u] ^= 1 << v
            rows[v] ^= 1 << u
            deg[u] -= 1
            deg[v] -= 1
            e -= 1
            ch -= deg[u] + deg[v]
            tr -= (rows[u] & rows[v]).bit_count()
        else:
            tr += (rows[u] & rows[v]).bit_count()
            ch += deg[u] + deg[v]
            rows[u] |= 1 << v
            rows[v] |= 1 << u
            deg[u] += 1
            deg[v] += 1
            e += 1
        j = nxt
    return counts, masks


def _exhaustive_upto4_pure(n, start, end):
    from .hostgraphs import UPTO4_NAMES, count_upto4, host_from_mask

    pairs = _host_pairs(n)
    order = [g.canonical_code for _, g in UPTO4_NAMES]
    counts: dict[tuple, int] = {}
    for j in range(start, end):
        mask = j ^ (j >> 1)
        table = count_upto4(host_from_mask(n, mask, pairs))
        key = tuple(table[c] for c in order)
        counts[key] = counts.get(key, 0) + 1
    return counts


def _mc_block_c23_pure(n, a, b, count, state0):
    q0 = (a << 64) // b
    r0 = (a << 64) % b
    state = state0
    out: dict[tuple, int] = {}
    for _ in range(count):
        rows = [0] * n
        e = 0
        for i in range(n):
            for j in range(i + 1, n):
                state, u = splitmix64(state)
                if u < q0:
                    bit = 1
                elif u > q0:
                    bit = 0
                else:
                    num = r0
                    while True:
                        state, u2 = splitmix64(state)
                        q, r = divmod(num << 64, b)
                        if u2 < q:
                            bit = 1
                            break
                        if u2 > q:
                            bit = 0
                            break
                        num = r
                if bit:
                    rows[i] |= 1 << j
                    rows[j] |= 1 << i
                    e += 1
        ch = sum(r.bit_count() * (r.bit_count() - 1) // 2 for r in rows)
        tr = _tri_from_rows(n, rows)
        key = (e, ch, tr)
        out[key] = out.get(key, 0) + 1
    return out


def _upto4_host_pure(host):
    from .hostgraphs import UPTO4_NAMES, count_upto4

    table = count_upto4(host)
    return tuple(table[g.canonical_code] for _, g in UPTO4_NAMES)


# ---------------------------------------------------------------------------
# Public entry points

def exhaustive_c23(n: int, *, start: int = 0, end: int | None = None,
                   target: tuple | None = None, workers: int | None = None,
                   impl: str | None = None):
    """Counts of (edges, cherries, triangles) over a Gray-index range of all
    labeled n-vertex hosts; optionally collects the edge masks hitting a
    target triple.  Returns (counts dict, sorted mask list or None)."""
    if not (1 <= n <= 10):
        raise ValueError("exhaustive enumeration supports 1 <= n <= 10")
    m = comb(n, 2)
    hi = 1 << m
    if end is None:
        end = hi
    if not (0 <= start < end <= hi):
        raise ValueError("bad Gray index range")
    which = _resolve(impl)
    workers = workers or default_workers()
    fn = (_C.exhaustive_c23 if which == "cython" else _exhaustive_c23_pure)
    spans = _split_range(start, end, workers if which == "cython" else 1)
    if len(spans) == 1:
        results = [fn(n, spans[0][0], spans[0][1], target)]
    else:
        with ThreadPoolExecutor(max_workers=len(spans)) as pool:
            results = list(pool.map(lambda sp: fn(n, sp[0], sp[1], target), spans))
    counts: dict[tuple, int] = {}
    masks = [] if target is not None else None
    for cnt, mk in results:
        for key, c in cnt.items():
            counts[key] = counts.get(key, 0) + c
        if masks is not None:
            masks.extend(mk)
    if masks is not None:
        masks.sort()
    return counts, masks


def exhaustive_upto4(n: int, *, start: int = 0, end: int | None = None,
                     workers: int | None = None, impl: str | None = None):
    """Counts of the full 9-motif vector (patterns up to 4 vertices, ordered
    as UPTO4_KEY_ORDER) over a Gray-index range of labeled hosts."""
    if not (1 <= n <= 7):
        raise ValueError("exhaustive 4-vertex enumeration supports 1 <= n <= 7")
    m = comb(n, 2)
    hi = 1 << m
    if end is None:
        end = hi
    if not (0 <= start < end <= hi):
        raise ValueError("bad mask range")
    which = _resolve(impl)
    workers = workers or default_workers()
    fn = (_C.exhaustive_upto4 if which == "cython" else _exhaustive_upto4_pure)
    spans = _split_range(start, end, workers if which == "cython" else 1)
    if len(spans) == 1:
        results = [fn(n, spans[0][0], spans[0][1])]
    else:
        with ThreadPoolExecutor(max_workers=len(spans)) as pool:
            results = list(pool.map(lambda sp: fn(n, sp[0], sp[1]), spans))
    counts: dict[tuple, int] = {}
    for cnt in results:
        for key, c in cnt.items():
            counts[key] = counts.get(key, 0) + c
    return counts


def mc_c23(n: int, a: int, b: int, samples: int, seed: int, *,
           workers: int | None = None, impl: str | None = None):
    """Monte Carlo joint (edges, cherries, triangles) counts over `samples`
    draws of G(n, a/b).  Blocked; identical output for any worker count."""
    if not (2 <= n <= 64):
        raise ValueError("the mask sampler supports 2 <= n <= 64")
    if samples <= 0:
        raise ValueError("samples must be positive")
    which = _resolve(impl)
    workers = workers or default_workers()
    nblocks = (samples + MC_BLOCK - 1) // MC_BLOCK
    jobs = []
    for i in range(nblocks):
        cnt = min(MC_BLOCK, samples - i * MC_BLOCK)
        jobs.append((i, cnt, block_seed(seed, i)))
    if which == "cython":
        if b >= 1 << 32:
            # tie refinement in the compiled path does 128-bit divides with a
            # 64-bit denominator; huge denominators stay on the pure path
            if impl == "cython":
                raise RuntimeError("compiled MC kernel requires b < 2**32")
            which = "pure"
    if which == "cython":
        q0 = (a << 64) // b
        r0 = (a << 64) % b

        def run(job):
            i, cnt, st = job
            return _C.mc_block_c23(n, b, q0, r0, cnt, st)

        if workers > 1 and len(jobs) > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                results = list(pool.map(run, jobs))
        else:
            results = [run(j) for j in jobs]
    else:
        results = [_mc_block_c23_pure(n, a, b, cnt, st) for _, cnt, st in jobs]
    counts: dict[tuple, int] = {}
    for r in results:
        for key, c in r.items():
            counts[key] = counts.get(key, 0) + c
    return counts


def upto4_counts(host, impl: str | None = None) -> tuple:
    """The 9-motif count vector of one host, in UPTO4_KEY_ORDER."""
    which = _resolve(impl)
    if which == "cython" and 8 <= host.n <= 256:
        return _C.upto4_counts_rows(host.n, list(host.rows))
    return _upto4_host_pure(host)


def _split_range(start, end, parts):
    total = end - start
    parts = max(1, min(parts, total))
    step = total // parts
    spans = []
    at = start
    for i in range(parts):
        nxt = end if i == parts - 1 else at + step
        if nxt > at:
            spans.append((at, nxt))
        at = nxt
    return spans
