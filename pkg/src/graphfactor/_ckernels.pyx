# cython: boundscheck=False, wraparound=False, cdivision=True
# cython: language_level=3
"""Compiled counting kernels.

Each function mirrors a pure-Python reference in graphfactor.kernels bit for
bit: same Gray-code visit order, same splitmix64 stream, same exact-threshold
Bernoulli tie refinement.  The heavy loops run without the GIL so range
sharding across threads gives real parallelism.
"""

from libc.stdlib cimport free, malloc, realloc
from libc.string cimport memset
from libc.stdint cimport int64_t, uint64_t

cdef extern from *:
    """
    #include <stdint.h>
    static inline int gf_pop64(uint64_t x) { return __builtin_popcountll(x); }
    static inline int gf_ctz64(uint64_t x) { return __builtin_ctzll(x); }
    typedef unsigned __int128 gf_u128;
    """
    int gf_pop64(uint64_t x) nogil
    int gf_ctz64(uint64_t x) nogil
    ctypedef unsigned long long gf_u128


cdef inline uint64_t sm64(uint64_t *state) nogil:
    cdef uint64_t z
    state[0] = state[0] + <uint64_t>0x9E3779B97F4A7C15
    z = state[0]
    z = (z ^ (z >> 30)) * <uint64_t>0xBF58476D1CE4E5B9
    z = (z ^ (z >> 27)) * <uint64_t>0x94D049BB133111EB
    return z ^ (z >> 31)


def exhaustive_c23(int n, object start_obj, object end_obj, object target):
    """(edges, cherries, triangles) histogram over Gray indices [start, end);
    optionally collects edge masks matching a target triple."""
    if n < 1 or n > 10:
        raise ValueError("compiled exhaustive kernel supports 1 <= n <= 10")
    cdef uint64_t start = start_obj
    cdef uint64_t end = end_obj
    cdef int M = n * (n - 1) // 2
    cdef int pu[45]
    cdef int pv[45]
    cdef int k = 0, i, jj
    cdef int chmax = n * (n - 1) * (n - 2) // 2
    cdef int trmax = n * (n - 1) * (n - 2) // 6
    cdef int64_t dim = <int64_t>(M + 1) * (chmax + 1) * (trmax + 1)
    cdef int64_t *counts
    cdef bint want = target is not None
    cdef int te = -1, tch = -1, ttr = -1
    cdef uint64_t cap = 1024, nm = 0
    cdef uint64_t *mbuf = NULL
    cdef uint64_t *grow
    cdef uint64_t rows[10]
    cdef int deg[10]
    cdef uint64_t gmask, mm, j, nxt
    cdef int e = 0, ch = 0, tr = 0, b, u, v
    cdef bint oom = 0
    cdef int ee, cc, tt
    cdef int64_t c, idx

    for i in range(n):
        for jj in range(i + 1, n):
            pu[k] = i
            pv[k] = jj
            k += 1
    counts = <int64_t*>malloc(dim * sizeof(int64_t))
    if counts == NULL:
        raise MemoryError()
    memset(counts, 0, dim * sizeof(int64_t))
    if want:
        te = target[0]
        tch = target[1]
        ttr = target[2]
        mbuf = <uint64_t*>malloc(cap * sizeof(uint64_t))
        if mbuf == NULL:
            free(counts)
            raise MemoryError()

    for i in range(n):
        rows[i] = 0
        deg[i] = 0
    gmask = start ^ (start >> 1)
    mm = gmask
    while mm:
        b = gf_ctz64(mm)
        mm &= mm - 1
        u = pu[b]
        v = pv[b]
        rows[u] |= <uint64_t>1 << v
        rows[v] |= <uint64_t>1 << u
        deg[u] += 1
        deg[v] += 1
        e += 1
    for i in range(n):
        ch += deg[i] * (deg[i] - 1) // 2
    for i in range(n):
        mm = rows[i] >> (i + 1) << (i + 1)
        while mm:
            v = gf_ctz64(mm)
            mm &= mm - 1
            tr += gf_pop64((rows[i] & rows[v]) >> (v + 1))

    with nogil:
        j = start
        while True:
            idx = (<int64_t>e * (chmax + 1) + ch) * (trmax + 1) + tr
            counts[idx] += 1
            if want and e == te and ch == tch and tr == ttr:
                if nm == cap:
                    cap *= 2
                    grow = <uint64_t*>realloc(mbuf, cap * sizeof(uint64_t))
                    if grow == NULL:
                        oom = 1
                        break
                    mbuf = grow
                mbuf[nm] = gmask
                nm += 1
            nxt = j + 1
            if nxt >= end:
                break
            b = gf_ctz64(nxt)
            u = pu[b]
            v = pv[b]
            gmask ^= <uint64_t>1 << b
            if (rows[u] >> v) & 1:
                rows[u] ^= <uint64_t>1 << v
                rows[v] ^= <uint64_t>1 << u
                deg[u] -= 1
                deg[v] -= 1
                e -= 1
                ch -= deg[u] + deg[v]
                tr -= gf_pop64(rows[u] & rows[v])
            else:
                tr += gf_pop64(rows[u] & rows[v])
                ch += deg[u] + deg[v]
                rows[u] |= <uint64_t>1 << v
                rows[v] |= <uint64_t>1 << u
                deg[u] += 1
                deg[v] += 1
                e += 1
            j = nxt

    try:
        if oom:
            raise MemoryError()
        out = {}
        for ee in range(M + 1):
            for cc in range(chmax + 1):
                for tt in range(trmax + 1):
                    c = counts[(<int64_t>ee * (chmax + 1) + cc) * (trmax + 1) + tt]
                    if c:
                        out[(ee, cc, tt)] = c
        masks = None
        if want:
            masks = [mbuf[i2] for i2 in range(<int64_t>nm)]
        return out, masks
    finally:
        free(counts)
        if mbuf != NULL:
            free(mbuf)


# mixed-radix packing bounds for motif vectors on up to 7 vertices
cdef int R_CH = 106
cdef int R_K3 = 36
cdef int R_P3 = 421
cdef int R_K13 = 141
cdef int R_C4 = 106
cdef int R_PAW = 421
cdef int R_DIA = 211
cdef int R_K4 = 36


def exhaustive_upto4(int n, object start_obj, object end_obj):
    """9-motif histogram (edge count through K4) over Gray indices
    [start, end) of all labeled n-vertex hosts, n <= 7."""
    if n < 1 or n > 7:
        raise ValueError("compiled 4-vertex exhaustive kernel supports n <= 7")
    cdef uint64_t start = start_obj
    cdef uint64_t end = end_obj
    cdef int pu[21]
    cdef int pv[21]
    cdef int k = 0, i, jj
    cdef uint64_t rows[7]
    cdef int deg[7]
    cdef uint64_t gmask, mm, cm, j, nxt, key
    cdef int e = 0, b, u, v, w
    cdef int64_t ch, k3, tr3, p3e, k13, c4acc, diaacc, paw, k4, codeg
    cdef object kobj, val

    for i in range(n):
        for jj in range(i + 1, n):
            pu[k] = i
            pv[k] = jj
            k += 1
    for i in range(n):
        rows[i] = 0
        deg[i] = 0
    gmask = start ^ (start >> 1)
    mm = gmask
    while mm:
        b = gf_ctz64(mm)
        mm &= mm - 1
        u = pu[b]
        v = pv[b]
        rows[u] |= <uint64_t>1 << v
        rows[v] |= <uint64_t>1 << u
        deg[u] += 1
        deg[v] += 1
        e += 1

    packed = {}
    j = start
    while True:
        ch = 0
        k13 = 0
        for i in range(n):
            ch += deg[i] * (deg[i] - 1) // 2
            k13 += deg[i] * (deg[i] - 1) * (deg[i] - 2) // 6
        tr3 = 0
        p3e = 0
        c4acc = 0
        diaacc = 0
        paw = 0
        k4 = 0
        for u in range(n):
            for v in range(u + 1, n):
                codeg = gf_pop64(rows[u] & rows[v])
                c4acc += codeg * (codeg - 1) // 2
                if (rows[u] >> v) & 1:
                    tr3 += codeg
                    p3e += (deg[u] - 1) * (deg[v] - 1)
                    diaacc += codeg * (codeg - 1) // 2
                    cm = (rows[u] & rows[v]) >> (v + 1) << (v + 1)
                    while cm:
                        w = gf_ctz64(cm)
                        cm &= cm - 1
                        paw += deg[u] + deg[v] + deg[w] - 6
                        k4 += gf_pop64((rows[u] & rows[v] & rows[w]) >> (w + 1))
        k3 = tr3 // 3
        key = <uint64_t>e
        key = key * R_CH + ch
        key = key * R_K3 + k3
        key = key * R_P3 + (p3e - 3 * k3)
        key = key * R_K13 + k13
        key = key * R_C4 + c4acc // 2
        key = key * R_PAW + paw
        key = key * R_DIA + diaacc
        key = key * R_K4 + k4
        kobj = key
        val = packed.get(kobj)
        packed[kobj] = 1 if val is None else val + 1

        nxt = j + 1
        if nxt >= end:
            break
        b = gf_ctz64(nxt)
        u = pu[b]
        v = pv[b]
        gmask ^= <uint64_t>1 << b
        if (rows[u] >> v) & 1:
            rows[u] ^= <uint64_t>1 << v
            rows[v] ^= <uint64_t>1 << u
            deg[u] -= 1
            deg[v] -= 1
            e -= 1
        else:
            rows[u] |= <uint64_t>1 << v
            rows[v] |= <uint64_t>1 << u
            deg[u] += 1
            deg[v] += 1
            e += 1
        j = nxt

    out = {}
    for kobj, val in packed.items():
        key = kobj
        k4 = key % R_K4
        key //= R_K4
        diaacc = key % R_DIA
        key //= R_DIA
        paw = key % R_PAW
        key //= R_PAW
        c4acc = key % R_C4
        key //= R_C4
        k13 = key % R_K13
        key //= R_K13
        p3e = key % R_P3
        key //= R_P3
        k3 = key % R_K3
        key //= R_K3
        ch = key % R_CH
        key //= R_CH
        out[(<int>key, ch, k3, p3e, k13, c4acc, paw, diaacc, k4)] = val
    return out


def mc_block_c23(int n, object den_obj, object q0_obj, object r0_obj,
                 int count, object state0_obj):
    """One Monte Carlo block: `count` samples of G(n, a/b) starting from a
    fixed splitmix64 state, histogrammed by (edges, cherries, triangles).
    q0 and r0 are divmod(a << 64, b); ties refine with further stream words."""
    if n < 2 or n > 64:
        raise ValueError("compiled MC kernel supports 2 <= n <= 64")
    if count <= 0:
        raise ValueError("count must be positive")
    cdef uint64_t den = den_obj
    cdef uint64_t q0 = q0_obj
    cdef uint64_t r0 = r0_obj
    cdef uint64_t state = state0_obj
    cdef uint64_t *keys = <uint64_t*>malloc(count * sizeof(uint64_t))
    if keys == NULL:
        raise MemoryError()
    cdef uint64_t rows[64]
    cdef uint64_t u64, num, q, r, mm
    cdef gf_u128 wide
    cdef int s, i, jj, v, bit, e, d
    cdef int64_t ch, tr
    cdef uint64_t key

    with nogil:
        for s in range(count):
            for i in range(n):
                rows[i] = 0
            e = 0
            for i in range(n):
                for jj in range(i + 1, n):
                    u64 = sm64(&state)
                    if u64 < q0:
                        bit = 1
                    elif u64 > q0:
                        bit = 0
                    else:
                        num = r0
                        while True:
                            u64 = sm64(&state)
                            wide = (<gf_u128>num) << 64
                            q = <uint64_t>(wide // den)
                            r = <uint64_t>(wide % den)
                            if u64 < q:
                                bit = 1
                                break
                            if u64 > q:
                                bit = 0
                                break
                            num = r
                    if bit:
                        rows[i] |= <uint64_t>1 << jj
                        rows[jj] |= <uint64_t>1 << i
                        e += 1
            ch = 0
            for i in range(n):
                d = gf_pop64(rows[i])
                ch += <int64_t>d * (d - 1) // 2
            tr = 0
            for i in range(n):
                mm = rows[i] >> (i + 1) << (i + 1)
                while mm:
                    v = gf_ctz64(mm)
                    mm &= mm - 1
                    tr += gf_pop64((rows[i] & rows[v]) >> (v + 1))
            keys[s] = ((<uint64_t>e) << 40) | ((<uint64_t>ch) << 20) | <uint64_t>tr

    out = {}
    try:
        for s in range(count):
            key = keys[s]
            kobj = (<int>(key >> 40), <int>((key >> 20) & 0xFFFFF),
                    <int>(key & 0xFFFFF))
            val = out.get(kobj)
            out[kobj] = 1 if val is None else val + 1
        return out
    finally:
        free(keys)


def upto4_counts_rows(int n, rows_list):
    """9-motif count vector of a single host on up to 256 vertices, given its
    adjacency rows as Python ints."""
    if n < 1 or n > 256:
        raise ValueError("row kernel supports 1 <= n <= 256")
    cdef int W = (n + 63) // 64
    cdef uint64_t r[1024]
    cdef int64_t deg[256]
    cdef int i, wi, wj, u, v, w, b
    cdef object row
    cdef int64_t e, ch, k13, tr3, p3e, c4acc, diaacc, paw, k4acc, codeg, d
    cdef uint64_t cm, aw
    cdef uint64_t mask64 = <uint64_t>0xFFFFFFFFFFFFFFFF

    if len(rows_list) != n:
        raise ValueError("rows_list length must equal n")
    for i in range(n):
        row = rows_list[i]
        for wi in range(4):
            if wi < W:
                r[i * 4 + wi] = <uint64_t>((row >> (64 * wi)) &
                                           <object>0xFFFFFFFFFFFFFFFF)
            else:
                r[i * 4 + wi] = 0

    with nogil:
        e = 0
        ch = 0
        k13 = 0
        for i in range(n):
            d = 0
            for wi in range(W):
                d += gf_pop64(r[i * 4 + wi])
            deg[i] = d
            e += d
            ch += d * (d - 1) // 2
            k13 += d * (d - 1) * (d - 2) // 6
        e //= 2
        tr3 = 0
        p3e = 0
        c4acc = 0
        diaacc = 0
        paw = 0
        k4acc = 0
        for u in range(n):
            for v in range(u + 1, n):
                codeg = 0
                for wi in range(W):
                    codeg += gf_pop64(r[u * 4 + wi] & r[v * 4 + wi])
                c4acc += codeg * (codeg - 1) // 2
                if (r[u * 4 + (v >> 6)] >> (v & 63)) & 1:
                    tr3 += codeg
                    p3e += (deg[u] - 1) * (deg[v] - 1)
                    diaacc += codeg * (codeg - 1) // 2
                    # triangles u < v < w from the common neighborhood
                    for wi in range(v >> 6, W):
                        cm = r[u * 4 + wi] & r[v * 4 + wi]
                        if wi == (v >> 6):
                            if (v & 63) == 63:
                                cm = 0
                            else:
                                cm &= mask64 << ((v & 63) + 1)
                        while cm:
                            b = gf_ctz64(cm)
                            cm &= cm - 1
                            w = (wi << 6) + b
                            paw += deg[u] + deg[v] + deg[w] - 6
                            # fourth vertex beyond w completes a K4
                            aw = r[u * 4 + wi] & r[v * 4 + wi] & r[w * 4 + wi]
                            if b == 63:
                                aw = 0
                            else:
                                aw &= mask64 << (b + 1)
                            k4acc += gf_pop64(aw)
                            for wj in range(wi + 1, W):
                                k4acc += gf_pop64(r[u * 4 + wj] &
                                                  r[v * 4 + wj] &
                                                  r[w * 4 + wj])

    cdef int64_t k3 = tr3 // 3
    return (e, ch, k3, p3e - 3 * k3, k13, c4acc // 2, paw,
            diaacc, k4acc)
