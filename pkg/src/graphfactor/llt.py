"""Empirical verification of the joint local limit theorem at desk scale.

Exact joint distributions of subgraph-count tuples by exhaustive enumeration
(n <= 8 for edge/cherry/triangle families, n <= 7 with 4-vertex patterns),
Monte Carlo estimates at moderate n, the product-of-normals point prediction,
scaled-error reports, and characteristic-function comparisons between G(n,p)
and the Gaussian surrogate.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .algebra import ProblemContext
from .hostgraphs import UPTO4_NAMES, complete_host, count_in_complete, \
    count_subgraph_copies, sample_host
from .ifs import IfsSystem, is_permissible, nearest_permissible, y_from_x
from .kernels import MC_BLOCK, default_workers, exhaustive_c23, \
    exhaustive_upto4, mc_c23, upto4_counts
from .numtheory import binom, block_seed
from .smallgraphs import ALIASES, EMPTY, GraphFamily, SmallGraph, components, \
    sort_key, token_of

__all__ = [
    "CharPoint",
    "JointDistribution",
    "LltErrorReport",
    "McJointEstimate",
    "SigmaTable",
    "char_fn_compare",
    "exact_joint_distribution",
    "llt_error_report",
    "llt_prediction",
    "mc_joint_estimate",
    "sigma_table",
]

_C23_CODES = (ALIASES["K2"].canonical_code, ALIASES["P2"].canonical_code,
              ALIASES["K3"].canonical_code)
_UPTO4_INDEX = {g.canonical_code: i for i, (_, g) in enumerate(UPTO4_NAMES)}


def _npdf(z: float) -> float:
    return math.exp(-0.5 * z * z) / math.sqrt(2.0 * math.pi)


# ---------------------------------------------------------------------------
# Sigma table

@dataclass(frozen=True)
class SigmaTable:
    family: GraphFamily
    n: int
    sigma2: dict
    sigma: dict

    def scale(self, ctx: ProblemContext) -> float:
        """prod over the family of (p(1-p))^{e/2} sigma_H, the normalization
        the theorem multiplies point probabilities by."""
        out = 1.0
        for h in self.family:
            out *= math.sqrt(float(ctx.pq) ** h.edge_count) * self.sigma[h]
        return out


def sigma_table(family: GraphFamily, n: int) -> SigmaTable:
    """sigma_H^2 = number of copies of H in K_n, exactly."""
    vmax = max(h.vertex_count for h in family)
    if n < vmax:
        raise ValueError(f"n must be at least {vmax} for this family")
    sigma2 = {}
    for h in family:
        val = Fraction(count_in_complete(h, n))
        if n <= 9:
            assert val == count_subgraph_copies(h, complete_host(n))
        sigma2[h] = val
    sigma = {h: math.sqrt(float(v)) for h, v in sigma2.items()}
    return SigmaTable(family, n, sigma2, sigma)


# ---------------------------------------------------------------------------
# Joint distributions

def _family_projection(family: GraphFamily):
    """(kind, indices): how family members map onto kernel count tuples."""
    members = list(family)
    codes = [h.canonical_code for h in members]
    if all(c in _C23_CODES for c in codes):
        return "c23", [_C23_CODES.index(c) for c in codes]
    if all(c in _UPTO4_INDEX for c in codes):
        return "upto4", [_UPTO4_INDEX[c] for c in codes]
    raise ValueError("family members must be connected graphs on at most 4 vertices")


@dataclass(frozen=True)
class JointDistribution:
    family: GraphFamily
    ctx: ProblemContext
    entries: dict  # x-tuple -> exact Fraction probability

    def probability(self, x: tuple) -> Fraction:
        return self.entries.get(tuple(x), Fraction(0))

    def support_size(self) -> int:
        return len(self.entries)


def exact_joint_distribution(family: GraphFamily, ctx: ProblemContext, *,
                             workers: int | None = None) -> JointDistribution:
    """Exact distribution of (X_H)_{H in family} under G(n, p) by weighted
    exhaustive enumeration of all labeled hosts."""
    kind, idx = _family_projection(family)
    n = ctx.n
    if kind == "c23":
        if n > 8:
            raise ValueError("exhaustive edge/cherry/triangle families need n <= 8")
        counts, _ = exhaustive_c23(n, workers=workers)
    else:
        if n > 7:
            raise ValueError("exhaustive 4-vertex families need n <= 7")
        counts = exhaustive_upto4(n, workers=workers)
    m = binom(n, 2)
    p, q = ctx.p, 1 - ctx.p
    weight = [p ** e * q ** (m - e) for e in range(m + 1)]
    entries: dict = {}
    for key, c in counts.items():
        x = tuple(key[i] for i in idx)
        entries[x] = entries.get(x, Fraction(0)) + c * weight[key[0]]
    assert sum(entries.values()) == 1
    return JointDistribution(family, ctx, entries)


@dataclass(frozen=True)
class McJointEstimate:
    family: GraphFamily
    ctx: ProblemContext
    samples: int
    seed: int
    counts: dict  # x-tuple -> hit count

    def estimate(self, x: tuple) -> float:
        return self.counts.get(tuple(x), 0) / self.samples

    def stderr(self, x: tuple) -> float:
        f = self.estimate(x)
        return math.sqrt(f * (1.0 - f) / self.samples)

    def support_size(self) -> int:
        return len(self.counts)


def _c23_of_host(host) -> tuple:
    rows = host.rows
    n = host.n
    e = host.edge_count
    ch = sum(d * (d - 1) // 2 for d in host.degrees)
    tr = 0
    for u in range(n):
        m = rows[u] >> (u + 1) << (u + 1)
        while m:
            low = m & -m
            m ^= low
            v = low.bit_length() - 1
            tr += ((rows[u] & rows[v]) >> (v + 1)).bit_count()
    return e, ch, tr


def _mc_full_counts(family: GraphFamily, ctx: ProblemContext, samples: int,
                    seed: int, workers: int | None):
    """Histogram of full kernel count tuples under G(n,p) sampling.

    Returns (kind, counts) where keys are (e, ch, tr) for edge/cherry/triangle
    families or the full 9-motif tuple otherwise.  Deterministic for a given
    seed, independent of the worker count.
    """
    kind, _ = _family_projection(family)
    n = ctx.n
    if kind == "c23" and 2 <= n <= 64:
        return "c23", mc_c23(n, ctx.a, ctx.b, samples, seed, workers=workers)
    if kind == "upto4" and n > 256:
        raise ValueError("4-vertex Monte Carlo counting supports n <= 256")
    if kind == "c23" and n > 2000:
        raise ValueError("edge/cherry/triangle Monte Carlo supports n <= 2000")

    def run_block(args):
        lo, hi = args
        local: dict = {}
        for i in range(lo, hi):
            host = sample_host(n, ctx.a, ctx.b, block_seed(seed, i))
            key = _c23_of_host(host) if kind == "c23" else upto4_counts(host)
            local[key] = local.get(key, 0) + 1
        return local

    spans = [(i, min(i + MC_BLOCK, samples)) for i in range(0, samples, MC_BLOCK)]
    workers = workers or default_workers()
    if workers > 1 and len(spans) > 1:
        from concurrent.futures import ThreadPoolExecutor
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run_block, spans))
    else:
        results = [run_block(sp) for sp in spans]
    counts: dict = {}
    for r in results:
        for k, c in r.items():
            counts[k] = counts.get(k, 0) + c
    return kind, counts


def mc_joint_estimate(family: GraphFamily, ctx: ProblemContext, samples: int,
                      seed: int, *, workers: int | None = None) -> McJointEstimate:
    """Monte Carlo joint distribution estimate; reproducible given the seed."""
    if samples <= 0:
        raise ValueError("samples must be positive")
    kind, idx = _family_projection(family)
    kind2, full = _mc_full_counts(family, ctx, samples, seed, workers)
    assert kind2 == kind
    counts: dict = {}
    for key, c in full.items():
        x = tuple(key[i] for i in idx)
        counts[x] = counts.get(x, 0) + c
    assert sum(counts.values()) == samples
    return McJointEstimate(family, ctx, samples, seed, counts)


# ---------------------------------------------------------------------------
# Predictions and error reports

def llt_prediction(family: GraphFamily, ctx: ProblemContext, y, *,
                   sigmas: SigmaTable | None = None,
                   check_permissible: bool = False) -> float:
    """Theorem point prediction prod N(y_H/sigma_H) / ((p(1-p))^{e/2} sigma_H)."""
    st = sigmas if sigmas is not None else sigma_table(family, ctx.n)
    members = list(family)
    if isinstance(y, dict):
        yvals = [float(y[h]) for h in members]
    else:
        yvals = [float(v) for v in y]
        if len(yvals) != len(members):
            raise ValueError("y length does not match the family")
    if check_permissible:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            ok = is_permissible(family, ctx, yvals)
        if not ok:
            warnings.warn("prediction requested at a non-permissible point",
                          stacklevel=2)
    out = 1.0
    for h, yv in zip(members, yvals):
        s = st.sigma[h]
        out *= _npdf(yv / s) / (math.sqrt(float(ctx.pq) ** h.edge_count) * s)
    return out


def _float_g_from_x(family: GraphFamily, ctx: ProblemContext, xvals: dict) -> dict:
    """Float mirror of the exact triangular inversion, for report columns."""
    from .algebra import expand_x_in_g, star_expand_plain

    gconn: dict = {}
    memo: dict = {}

    def keyval(k) -> float:
        if k.edge_count == 0:
            return 1.0
        if k.is_connected:
            return gconn[k]
        hit = memo.get(k)
        if hit is not None:
            return hit
        prod = 1.0
        for comp in components(k):
            prod *= gconn[comp]
        expansion = star_expand_plain(k, ctx)
        acc = prod
        lead = 1.0
        for kk, coeff in expansion.coeffs.items():
            if kk == k:
                lead = float(coeff)
            else:
                acc -= float(coeff) * keyval(kk)
        val = acc / lead
        memo[k] = val
        return val

    for h in family:
        acc = float(xvals[h])
        for k, coeff in expand_x_in_g(h, ctx).coeffs.items():
            if k == h:
                continue
            acc -= float(coeff) * keyval(k)
        gconn[h] = acc
    return gconn


@dataclass(frozen=True)
class LltErrorReport:
    family_tokens: tuple
    n: int
    p: str
    sigma: tuple
    mode_x: tuple
    mode_y: tuple
    mode_probability: float
    mode_scaled_error: float
    mode_scaled_stderr: float | None
    argmax_x: tuple
    max_scaled_error: float
    entries: tuple  # row dicts

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "p": self.p,
            "family": list(self.family_tokens),
            "sigma": list(self.sigma),
            "mode_x": list(self.mode_x),
            "mode_y": list(self.mode_y),
            "mode_probability": self.mode_probability,
            "mode_scaled_error": self.mode_scaled_error,
            "mode_scaled_stderr": self.mode_scaled_stderr,
            "argmax_x": list(self.argmax_x),
            "max_scaled_error": self.max_scaled_error,
            "entries": [dict(row, x=list(row["x"]), y=list(row["y"]))
                        for row in self.entries],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=True)

    def to_csv(self) -> str:
        cols = ["exact", "estimate", "stderr", "predicted", "scaled_error"]
        head = [f"x_{t}" for t in self.family_tokens] + \
            [f"y_{t}" for t in self.family_tokens] + cols
        lines = [",".join(head)]
        for row in self.entries:
            vals = [str(v) for v in row["x"]]
            vals += [repr(v) for v in row["y"]]
            for c in cols:
                v = row[c]
                vals.append("" if v is None else (v if isinstance(v, str) else repr(v)))
            lines.append(",".join(vals))
        return "\n".join(lines) + "\n"


def llt_error_report(dist: "JointDistribution | McJointEstimate", *,
                     max_entries: int | None = None) -> LltErrorReport:
    """Per-point scaled errors |P * prod((pq)^{e/2} sigma) - prod N(y/sigma)|
    plus the mode summary the acceptance checks read."""
    family = dist.family
    ctx = dist.ctx
    members = list(family)
    st = sigma_table(family, ctx.n)
    scale = st.scale(ctx)
    exact = isinstance(dist, JointDistribution)

    if exact:
        support = {x: (float(pr), pr) for x, pr in dist.entries.items()}
        samples = None
    else:
        support = {x: (c / dist.samples, None) for x, c in dist.counts.items()}
        samples = dist.samples

    rows = []
    max_err = 0.0
    argmax_x = None
    argmax_p = -1.0
    for x in sorted(support):
        prob, frac = support[x]
        gf = _float_g_from_x(family, ctx, dict(zip(members, x)))
        yv = tuple(gf[h] / math.sqrt(float(ctx.pq) ** h.edge_count)
                   for h in members)
        predicted = 1.0
        for h, y in zip(members, yv):
            predicted *= _npdf(y / st.sigma[h])
        err = abs(prob * scale - predicted)
        stderr = None
        if samples is not None:
            stderr = math.sqrt(prob * (1.0 - prob) / samples) * scale
        rows.append({
            "x": x, "y": yv,
            "exact": f"{frac.numerator}/{frac.denominator}" if frac is not None else None,
            "estimate": None if frac is not None else prob,
            "stderr": stderr,
            "predicted": predicted,
            "scaled_error": err,
        })
        if err > max_err:
            max_err = err
        if prob > argmax_p or (prob == argmax_p and (argmax_x is None or x < argmax_x)):
            argmax_p, argmax_x = prob, x

    mode_ev = nearest_permissible(family, ctx)
    mode_x = tuple(int(v) for v in mode_ev.x_tuple())
    mode_prob = 0.0
    mode_stderr = None
    if mode_x in support:
        mode_prob = support[mode_x][0]
    if samples is not None:
        mode_stderr = math.sqrt(mode_prob * (1.0 - mode_prob) / samples) * scale
    mode_pred = 1.0
    for h, y in zip(members, mode_ev.y_tuple()):
        mode_pred *= _npdf(y / st.sigma[h])
    mode_err = abs(mode_prob * scale - mode_pred)

    if max_entries is not None and len(rows) > max_entries:
        rows.sort(key=lambda r: -r["scaled_error"])
        rows = rows[:max_entries]
        rows.sort(key=lambda r: r["x"])

    return LltErrorReport(
        family_tokens=tuple(token_of(h) for h in members),
        n=ctx.n, p=ctx.p_token(),
        sigma=tuple(st.sigma[h] for h in members),
        mode_x=mode_x,
        mode_y=tuple(mode_ev.y_tuple()),
        mode_probability=mode_prob,
        mode_scaled_error=mode_err,
        mode_scaled_stderr=mode_stderr,
        argmax_x=tuple(argmax_x) if argmax_x is not None else (),
        max_scaled_error=max_err,
        entries=tuple(rows),
    )


# ---------------------------------------------------------------------------
# Characteristic functions

@dataclass(frozen=True)
class CharPoint:
    t: dict  # token -> frequency
    phi_x: complex
    phi_x_stderr: float
    phi_z: complex
    phi_z_stderr: float

    @property
    def difference(self) -> float:
        return abs(self.phi_x - self.phi_z)

    @property
    def combined_stderr(self) -> float:
        return math.hypot(self.phi_x_stderr, self.phi_z_stderr)

    def to_json(self) -> dict:
        return {
            "t": dict(self.t),
            "phi_x": [self.phi_x.real, self.phi_x.imag],
            "phi_x_stderr": self.phi_x_stderr,
            "phi_z": [self.phi_z.real, self.phi_z.imag],
            "phi_z_stderr": self.phi_z_stderr,
            "difference": self.difference,
            "combined_stderr": self.combined_stderr,
        }


def _f_tables_from_key(system: IfsSystem, kind: str, key: tuple) -> dict:
    """X_H' lookup for the a-coefficient keys, from one histogram key."""
    if kind == "c23":
        e, ch, tr = key
        table = {EMPTY: 1, ALIASES["K2"]: e, ALIASES["P2"]: ch, ALIASES["K3"]: tr}
    else:
        table = {EMPTY: 1}
        for (_, g), val in zip(UPTO4_NAMES, key):
            table[g] = val
        e, ch = key[0], key[1]
    table[ALIASES["2K2"]] = e * (e - 1) // 2 - ch
    return table


def char_fn_compare(family: GraphFamily, system: IfsSystem, t, samples: int,
                    seed: int, *, workers: int | None = None) -> CharPoint:
    """Monte Carlo comparison of the characteristic function of (F_H) under
    G(n,p) against the Gaussian surrogate where each factor is an independent
    normal scaled by sigma."""
    ctx = system.ctx
    members = list(family)
    if isinstance(t, dict):
        tvals = {h: float(t[h]) for h in members}
    else:
        seq = [float(v) for v in t]
        if len(seq) != len(members):
            raise ValueError("t length does not match the family")
        tvals = dict(zip(members, seq))

    kind, counts = _mc_full_counts(family, ctx, samples, seed, workers)
    sum_re = sum_im = sum_re2 = sum_im2 = 0.0
    for key, c in counts.items():
        x_table = _f_tables_from_key(system, kind, key)
        phase = 0.0
        for h in members:
            f_val = 0
            for k, coeff in system.a_coeffs[h].items():
                prod = 1
                for comp in components(k):
                    prod *= x_table[comp]
                f_val += coeff * prod
            phase += tvals[h] * f_val
        re, im = math.cos(phase), math.sin(phase)
        sum_re += c * re
        sum_im += c * im
        sum_re2 += c * re * re
        sum_im2 += c * im * im
    n = samples
    phi_x = complex(sum_re / n, sum_im / n)
    var_re = max(sum_re2 / n - (sum_re / n) ** 2, 0.0)
    var_im = max(sum_im2 / n - (sum_im / n) ** 2, 0.0)
    phi_x_se = math.sqrt((var_re + var_im) / n)

    # Gaussian surrogate: gamma_{H'} -> sigma_{H'} Z_{H'}, independent normals
    keys = sorted({k for h in members for k in system.c_coeffs[h]
                   if k.edge_count > 0}, key=sort_key)
    base = 0.0
    wvec = np.zeros(len(keys))
    for h in members:
        for k, u in system.c_coeffs[h].items():
            gamma_coeff = float(u) * math.sqrt(float(ctx.pq) ** k.edge_count)
            if k.edge_count == 0:
                base += tvals[h] * gamma_coeff
            else:
                sig = math.sqrt(float(count_in_complete(k, ctx.n)))
                wvec[keys.index(k)] += tvals[h] * gamma_coeff * sig
    rng = np.random.default_rng([seed, 0x5A17])
    re_acc = im_acc = re2_acc = im2_acc = 0.0
    done = 0
    while done < samples:
        chunk = min(1 << 16, samples - done)
        z = rng.standard_normal((chunk, len(keys)))
        phase = base + z @ wvec
        re = np.cos(phase)
        im = np.sin(phase)
        re_acc += float(re.sum())
        im_acc += float(im.sum())
        re2_acc += float((re * re).sum())
        im2_acc += float((im * im).sum())
        done += chunk
    phi_z = complex(re_acc / n, im_acc / n)
    var_re = max(re2_acc / n - (re_acc / n) ** 2, 0.0)
    var_im = max(im2_acc / n - (im_acc / n) ** 2, 0.0)
    phi_z_se = math.sqrt((var_re + var_im) / n)

    return CharPoint(
        t={token_of(h): tvals[h] for h in members},
        phi_x=phi_x, phi_x_stderr=phi_x_se,
        phi_z=phi_z, phi_z_stderr=phi_z_se,
    )
