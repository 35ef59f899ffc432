"""Integral factor systems and the permissibility map.

An integral factor system attaches to every graph H of a downwards-closed
family a statistic F_H that is an integer combination of starred subgraph
counts (so integer-valued on every host) whose scaled-factor expansion has
unit leading coefficient and small lower-order coefficients.  This module
constructs such systems by the subtract-the-nearest-integer loop, verifies
the required coefficient bounds, and implements the exact triangular maps
between integer subgraph-count tuples and factor tuples.

Coefficient conventions: b_coeffs and c_coeffs store the coefficients of the
rational statistics g*_{H'} and g_{H'}.  The factor-basis coefficients of
gamma*_{H'} and gamma_{H'} differ by (p(1-p))^{e(H')/2}, which is irrational
for odd edge counts, so every bound below is checked in squared-rational
form.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction

from .algebra import (
    HostEvaluator,
    ProblemContext,
    StatVector,
    expand_x_in_g,
    star_expand_plain,
    star_to_plain,
    xstar_to_gstar,
)
from .hostgraphs import UPTO4_NAMES, HostGraph, sample_host
from .kernels import default_workers, upto4_counts
from .numtheory import block_seed, format_rational
from .smallgraphs import (
    ALIASES,
    EMPTY,
    GraphFamily,
    SmallGraph,
    components,
    graph_token,
    precedes,
    sort_key,
    token_of,
)

__all__ = [
    "Evaluation",
    "IfsSystem",
    "IfsVerifyReport",
    "PermissibleBoxReport",
    "ifs_construct",
    "ifs_f_values",
    "ifs_verify",
    "is_permissible",
    "lattice_density",
    "permissible_count_box",
    "x_from_g",
    "g_from_x",
    "x_from_y",
    "y_from_x",
]


# ---------------------------------------------------------------------------
# Exact value plumbing

def _pq_power(ctx: ProblemContext, e: int) -> Fraction:
    return ctx.pq ** e


def _g_key_value(h: SmallGraph, gconn: dict, ctx: ProblemContext,
                 memo: dict) -> Fraction:
    """Plain-g value of an NIV key given the values of connected graphs.

    Disconnected keys are resolved through the component-product relation:
    the product of the components' g equals the plain expansion of the
    starred statistic, whose leading coefficient is divided out.
    """
    if h.edge_count == 0:
        return Fraction(1)
    if h.is_connected:
        return gconn[h]
    hit = memo.get(h)
    if hit is not None:
        return hit
    prod = Fraction(1)
    for comp in components(h):
        prod *= gconn[comp]
    expansion = star_expand_plain(h, ctx)
    lead = expansion.get(h)
    acc = prod
    for key, coeff in expansion.coeffs.items():
        if key == h:
            continue
        acc -= coeff * _g_key_value(key, gconn, ctx, memo)
    val = acc / lead
    memo[h] = val
    return val


def _gstar_key_value(h: SmallGraph, gconn: dict) -> Fraction:
    if h.edge_count == 0:
        return Fraction(1)
    prod = Fraction(1)
    for comp in components(h):
        prod *= gconn[comp]
    return prod


def x_from_g(family: GraphFamily, ctx: ProblemContext, gvals: dict) -> dict:
    """Exact forward map: plain-g values of the family -> X_H values."""
    memo: dict = {}
    out = {}
    for h in family:
        total = Fraction(0)
        for key, coeff in expand_x_in_g(h, ctx).coeffs.items():
            total += coeff * _g_key_value(key, gvals, ctx, memo)
        out[h] = total
    return out


def g_from_x(family: GraphFamily, ctx: ProblemContext, xvals: dict) -> dict:
    """Exact triangular inversion: X_H values -> plain-g values."""
    gconn: dict = {}
    memo: dict = {}
    for h in family:  # family iterates in sort order, lowest first
        acc = Fraction(xvals[h])
        lead = None
        for key, coeff in expand_x_in_g(h, ctx).coeffs.items():
            if key == h:
                lead = coeff
                continue
            acc -= coeff * _g_key_value(key, gconn, ctx, memo)
        assert lead == 1, "triangular map must have unit diagonal"
        gconn[h] = acc
    return gconn


@dataclass(frozen=True)
class Evaluation:
    """One point in the three coordinate systems at fixed (n, p): exact
    subgraph counts x, exact scaled factors g, and real factors y."""

    family: GraphFamily
    x: dict
    g: dict
    y: dict

    def x_tuple(self) -> tuple:
        return tuple(self.x[h] for h in self.family)

    def g_tuple(self) -> tuple:
        return tuple(self.g[h] for h in self.family)

    def y_tuple(self) -> tuple:
        return tuple(self.y[h] for h in self.family)


def _as_family_dict(family: GraphFamily, values) -> dict:
    if isinstance(values, dict):
        out = dict(values)
        missing = [h for h in family if h not in out]
        if missing:
            raise ValueError(f"missing values for {[token_of(h) for h in missing]}")
        return out
    vals = list(values)
    if len(vals) != len(family):
        raise ValueError("value tuple length does not match the family")
    return dict(zip(list(family), vals))


def _require_closed(family: GraphFamily):
    if not family.downwards_closed:
        raise ValueError("family must be downwards closed")


def _y_scale(ctx: ProblemContext, h: SmallGraph) -> float:
    # (p(1-p))^{e/2} as a float; exact rational when e is even
    return math.sqrt(float(_pq_power(ctx, h.edge_count)))


def _evaluation_from_g(family: GraphFamily, ctx: ProblemContext,
                       gvals: dict) -> Evaluation:
    xvals = x_from_g(family, ctx, gvals)
    yvals = {h: float(gvals[h]) / _y_scale(ctx, h) for h in family}
    return Evaluation(family, xvals, dict(gvals), yvals)


def x_from_y(family: GraphFamily, ctx: ProblemContext, y) -> Evaluation:
    """Map real factor values y to exact subgraph-count values.

    Exact zeros pass through exactly; other entries go through the float
    scaling g = y*(p(1-p))^{e/2} and an exact binary-rational conversion.
    """
    _require_closed(family)
    ydict = _as_family_dict(family, y)
    gvals = {}
    for h in family:
        val = ydict[h]
        if val == 0:
            gvals[h] = Fraction(0)
        else:
            gvals[h] = Fraction(float(val) * _y_scale(ctx, h)).limit_denominator(1 << 62)
    return _evaluation_from_g(family, ctx, gvals)


def y_from_x(family: GraphFamily, ctx: ProblemContext, x) -> Evaluation:
    """Exact triangular inversion of integer (or rational) subgraph counts,
    with the real factor values attached."""
    _require_closed(family)
    xdict = {h: Fraction(v) for h, v in _as_family_dict(family, x).items()}
    gvals = g_from_x(family, ctx, xdict)
    return _evaluation_from_g(family, ctx, gvals)


def is_permissible(family: GraphFamily, ctx: ProblemContext, y=None, *,
                   g=None, atol: float = 1e-6) -> bool:
    """Whether the factor tuple corresponds to integer subgraph counts.

    Exact mode: pass g (rational scaled-factor values).  Float mode: pass y;
    the point is snapped to the nearest permissible point and accepted with a
    warning when every coordinate moves less than `atol`.
    """
    _require_closed(family)
    if (y is None) == (g is None):
        raise ValueError("provide exactly one of y or g")
    if g is not None:
        gdict = {h: Fraction(v) for h, v in _as_family_dict(family, g).items()}
        xvals = x_from_g(family, ctx, gdict)
        return all(v.denominator == 1 for v in xvals.values())
    ydict = _as_family_dict(family, y)
    if all(v == 0 for v in ydict.values()):
        xvals = x_from_g(family, ctx, {h: Fraction(0) for h in family})
        return all(v.denominator == 1 for v in xvals.values())
    ev = x_from_y(family, ctx, ydict)
    snapped = {h: Fraction(round(ev.x[h])) for h in family}
    exact = all(ev.x[h] == snapped[h] for h in family)
    if exact:
        return True
    back = g_from_x(family, ctx, snapped)
    drift = max(abs(float(back[h] - ev.g[h])) for h in family)
    if drift <= atol:
        warnings.warn("factor tuple snapped to the nearest permissible point",
                      stacklevel=2)
        return True
    return False


def nearest_permissible(family: GraphFamily, ctx: ProblemContext, *,
                        radius: int = 3) -> Evaluation:
    """The permissible point closest to y = 0 in Euclidean y-distance.

    Searches integer count tuples within `radius` of the y = 0 preimage along
    each coordinate; exact arithmetic decides, lexicographic x breaks ties.
    """
    _require_closed(family)
    members = list(family)
    # squared y-distance accumulates as g^2 / (pq)^e, an exact rational
    inv_pq = {h: Fraction(1) / _pq_power(ctx, h.edge_count) for h in members}
    best: list = [None]

    def walk(idx: int, gconn: dict, memo: dict, score: Fraction, xacc: tuple):
        if best[0] is not None and score > best[0][0]:
            return
        if idx == len(members):
            key = (score, xacc)
            if best[0] is None or key < best[0][:2]:
                best[0] = (score, xacc, dict(gconn))
            return
        h = members[idx]
        acc = Fraction(0)
        for k, coeff in expand_x_in_g(h, ctx).coeffs.items():
            if k == h:
                continue
            acc += coeff * _g_key_value(k, gconn, ctx, memo)
        base = round(acc)
        # visit candidate counts nearest the centre first
        offsets = sorted(range(-radius, radius + 1), key=lambda d: (abs(d), d))
        for off in offsets:
            x = base + off
            g = Fraction(x) - acc
            gconn2 = dict(gconn)
            gconn2[h] = g
            walk(idx + 1, gconn2, dict(memo), score + g * g * inv_pq[h],
                 xacc + (x,))

    walk(0, {}, {}, Fraction(0), ())
    _, xs, _ = best[0]
    return y_from_x(family, ctx, dict(zip(members, xs)))


def lattice_density(family: GraphFamily, ctx: ProblemContext) -> Fraction:
    """Squared density of the permissible-point lattice in y-coordinates:
    prod (p(1-p))^{e(H)}.  Asserted against the diagonal of the y->x map."""
    _require_closed(family)
    sq = Fraction(1)
    for h in family:
        lead = expand_x_in_g(h, ctx).get(h)
        assert lead == 1, "triangular diagonal in g-coordinates must be 1"
        # dy/dx diagonal is (pq)^{-e/2}; density picks up its inverse
        sq *= _pq_power(ctx, h.edge_count)
    return sq


# ---------------------------------------------------------------------------
# Box counting (empirical lattice density)

def _floor_c_plus_sqrt(c: Fraction, b2: Fraction, seed: float) -> int:
    """floor(c + sqrt(b2)) via an exact quadratic predicate."""
    num, den = c.numerator, c.denominator

    def ok(x: int) -> bool:
        f = x * den - num
        if f <= 0:
            return True
        return f * f * b2.denominator <= b2.numerator * den * den

    x = int(seed)
    while ok(x + 1):
        x += 1
    while not ok(x):
        x -= 1
    return x


def _ceil_c_minus_sqrt(c: Fraction, b2: Fraction, seed: float) -> int:
    num, den = c.numerator, c.denominator

    def ok(x: int) -> bool:
        f = num - x * den
        if f <= 0:
            return True
        return f * f * b2.denominator <= b2.numerator * den * den

    x = int(seed)
    while ok(x - 1):
        x -= 1
    while not ok(x):
        x += 1
    return x


def _int_interval(c: Fraction, b2: Fraction) -> tuple[int, int]:
    """Integers x with (x - c)^2 <= b2, as an inclusive interval."""
    if b2 < 0:
        return 1, 0
    r = math.sqrt(float(b2))
    hi = _floor_c_plus_sqrt(c, b2, float(c) + r)
    lo = _ceil_c_minus_sqrt(c, b2, float(c) - r)
    return lo, hi


@dataclass(frozen=True)
class PermissibleBoxReport:
    family_tokens: tuple
    n: int
    p: str
    half_widths: tuple
    count: int
    volume: float
    density: float
    predicted_density: float

    @property
    def relative_error(self) -> float:
        return abs(self.density - self.predicted_density) / self.predicted_density


def permissible_count_box(family: GraphFamily, ctx: ProblemContext,
                          half_widths) -> PermissibleBoxReport:
    """Count permissible y-tuples in the centered box prod [-L_H, L_H] by
    running over integer subgraph-count tuples, exactly.

    The box constraint y_H^2 <= L_H^2 becomes the rational constraint
    g_H^2 <= L_H^2 (p(1-p))^{e(H)}, so the whole count is integer-interval
    arithmetic on the triangular map; no floats decide membership.
    """
    _require_closed(family)
    hw = _as_family_dict(family, half_widths)
    members = list(family)
    bounds2 = {h: Fraction(hw[h]) ** 2 * _pq_power(ctx, h.edge_count)
               for h in members}

    def descend(idx: int, gconn: dict, memo: dict) -> int:
        h = members[idx]
        acc = Fraction(0)
        for key, coeff in expand_x_in_g(h, ctx).coeffs.items():
            if key == h:
                continue
            acc += coeff * _g_key_value(key, gconn, ctx, memo)
        # x_h = acc + g_h, so g in [-L, L] pins x to an interval around acc
        lo, hi = _int_interval(acc, bounds2[h])
        if hi < lo:
            return 0
        if idx == len(members) - 1:
            return hi - lo + 1
        total = 0
        for x in range(lo, hi + 1):
            gconn2 = dict(gconn)
            gconn2[h] = Fraction(x) - acc
            total += descend(idx + 1, gconn2, dict(memo))
        return total

    count = descend(0, {}, {})
    volume = 1.0
    for h in members:
        volume *= 2.0 * float(hw[h])
    predicted = math.sqrt(float(lattice_density(family, ctx)))
    return PermissibleBoxReport(
        family_tokens=tuple(token_of(h) for h in members),
        n=ctx.n, p=ctx.p_token(),
        half_widths=tuple(float(hw[h]) for h in members),
        count=count, volume=volume,
        density=count / volume,
        predicted_density=predicted,
    )


# ---------------------------------------------------------------------------
# IFS construction

def _round_ties_to_zero(t: Fraction) -> int:
    fl = math.floor(t)
    frac = t - fl
    if frac > Fraction(1, 2):
        return fl + 1
    if frac < Fraction(1, 2):
        return fl
    return fl if t > 0 else fl + 1


@dataclass(frozen=True)
class IfsSystem:
    """Per-graph integral statistics F_H = sum a_{H'} X*_{H'} with their
    scaled-factor expansions in the starred (b) and plain (c) g-bases."""

    ctx: ProblemContext
    family: GraphFamily
    a_coeffs: dict
    b_coeffs: dict
    c_coeffs: dict
    eta: float

    def to_json(self) -> dict:
        def coeff_list(table, fmt):
            return [[token_of(k), fmt(v)]
                    for k, v in sorted(table.items(), key=lambda kv: sort_key(kv[0]))]

        per = {}
        for h in self.family:
            per[token_of(h)] = {
                "a": coeff_list(self.a_coeffs[h], int),
                "b_g_star": coeff_list(self.b_coeffs[h], format_rational),
                "c_g": coeff_list(self.c_coeffs[h], format_rational),
            }
        return {
            "n": self.ctx.n,
            "p": self.ctx.p_token(),
            "family": [token_of(h) for h in self.family],
            "per_H": per,
            "eta": self.eta,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, data: dict) -> "IfsSystem":
        from .smallgraphs import family as family_of
        from .numtheory import parse_rational

        ctx = ProblemContext.make(data["n"], data["p"])
        fam = family_of(",".join(data["family"]))

        def read(table, conv):
            return {_graph_from_token(tok): conv(v) for tok, v in table}

        a_coeffs, b_coeffs, c_coeffs = {}, {}, {}
        for tok, entry in data["per_H"].items():
            h = _graph_from_token(tok)
            a_coeffs[h] = read(entry["a"], int)
            b_coeffs[h] = read(entry["b_g_star"], Fraction)
            c_coeffs[h] = read(entry["c_g"], Fraction)
        return cls(ctx, fam, a_coeffs, b_coeffs, c_coeffs, float(data["eta"]))


def _graph_from_token(tok: str):
    return graph_token(tok)


def ifs_construct(family: GraphFamily, ctx: ProblemContext, *,
                  max_rounds: int = 10_000) -> IfsSystem:
    """Build an integral factor system by repeatedly subtracting integer
    multiples of starred subgraph counts at the largest offending key."""
    _require_closed(family)
    a_coeffs: dict = {}
    b_coeffs: dict = {}
    c_coeffs: dict = {}
    for h in family:
        vec = xstar_to_gstar(h, ctx)
        a: dict = {h: 1}
        prev_ranks = None
        rounds = 0
        while True:
            viol = [k for k, t in vec.coeffs.items()
                    if t * t * _pq_power(ctx, k.edge_count) > 1]
            if not viol:
                break
            ranks = tuple(sorted((sort_key(k) for k in viol), reverse=True))
            assert prev_ranks is None or ranks < prev_ranks, \
                "violator ranks must strictly decrease"
            prev_ranks = ranks
            maximal = [k for k in viol
                       if not any(o is not k and precedes(k, o) for o in viol)]
            target = min(maximal, key=sort_key)
            t = vec.coeffs[target]
            shift = _round_ties_to_zero(t)
            assert shift != 0
            vec = vec - xstar_to_gstar(target, ctx).scale(shift)
            a[target] = a.get(target, 0) - shift
            if not a[target]:
                del a[target]
            rounds += 1
            if rounds > max_rounds:
                raise RuntimeError("subtraction loop failed to settle")
        assert vec.get(h) == 1, "leading starred coefficient must stay 1"
        a_coeffs[h] = a
        b_coeffs[h] = dict(vec.coeffs)
        c_coeffs[h] = dict(star_to_plain(vec).coeffs)
    eta = _eta_of(ctx, family, b_coeffs, c_coeffs)
    return IfsSystem(ctx, family, a_coeffs, b_coeffs, c_coeffs, eta)


def _eta_of(ctx, family, b_coeffs, c_coeffs) -> float:
    worst = Fraction(0)
    n = ctx.n
    for h in family:
        for table in (b_coeffs[h], c_coeffs[h]):
            for key, t in table.items():
                # squared factor-basis magnitude over the allowed growth
                norm2 = t * t * _pq_power(ctx, key.edge_count) * \
                    Fraction(1, n ** (h.vertex_count - key.vertex_count))
                if norm2 > worst:
                    worst = norm2
    return math.sqrt(float(worst))


def _motif_x_table(host: HostGraph) -> dict:
    """X_H for every NIV pattern on up to 4 vertices, from one motif pass."""
    vec = upto4_counts(host)
    table = {EMPTY: 1}
    for (_, g), val in zip(UPTO4_NAMES, vec):
        table[g] = val
    e, ch = vec[0], vec[1]
    # pairs of disjoint edges: all edge pairs minus those sharing a vertex
    table[ALIASES["2K2"]] = e * (e - 1) // 2 - ch
    return table


def ifs_f_values(ifs: IfsSystem, host: HostGraph, x_table: dict | None = None) -> dict:
    """Integer F_H values on a host via the starred-count route."""
    if x_table is None:
        x_table = _motif_x_table(host)
    out = {}
    for h in ifs.family:
        total = 0
        for key, coeff in ifs.a_coeffs[h].items():
            prod = 1
            for comp in components(key):
                prod *= x_table[comp]
            total += coeff * prod
        out[h] = total
    return out


@dataclass(frozen=True)
class IfsVerifyReport:
    ok: bool
    eta: float
    hosts_checked: int
    violations: tuple
    a_ok: bool
    c_lead_ok: bool

    def __bool__(self):
        return self.ok


def ifs_verify(ifs: IfsSystem, *, samples: int = 1000, seed: int = 2024,
               workers: int | None = None) -> IfsVerifyReport:
    """Re-derive the coefficient tables, check the definition's three
    conditions, and test integrality of every F_H on seeded random hosts
    through three independent evaluation routes."""
    ctx = ifs.ctx
    family = ifs.family
    violations = []

    a_ok = True
    for h in family:
        a = ifs.a_coeffs[h]
        if a.get(h) != 1 or any(not isinstance(v, int) for v in a.values()):
            a_ok = False
            violations.append({"graph": token_of(h), "kind": "a-coeffs"})
        rebuilt = None
        for key, coeff in a.items():
            term = xstar_to_gstar(key, ctx).scale(coeff)
            rebuilt = term if rebuilt is None else rebuilt + term
        if dict(rebuilt.coeffs) != ifs.b_coeffs[h]:
            a_ok = False
            violations.append({"graph": token_of(h), "kind": "b-coeffs mismatch"})
        plain = star_to_plain(StatVector("gstar", ctx, ifs.b_coeffs[h]))
        if dict(plain.coeffs) != ifs.c_coeffs[h]:
            a_ok = False
            violations.append({"graph": token_of(h), "kind": "c-coeffs mismatch"})

    c_lead_ok = all(ifs.c_coeffs[h].get(h) == 1 and ifs.b_coeffs[h].get(h) == 1
                    for h in family)
    if not c_lead_ok:
        violations.append({"kind": "unit leading coefficient"})

    eta = _eta_of(ctx, family, ifs.b_coeffs, ifs.c_coeffs)

    conn = sorted({c for h in family
                   for key in ifs.c_coeffs[h]
                   for c in components(key)}, key=sort_key)
    closure = GraphFamily(conn)

    def check_host(i: int):
        host = sample_host(ctx.n, ctx.a, ctx.b, block_seed(seed, i))
        x_table = _motif_x_table(host)
        route_a = ifs_f_values(ifs, host, x_table)
        gconn = g_from_x(closure, ctx, x_table)
        memo: dict = {}
        bad = []
        for h in family:
            vb = sum((t * _gstar_key_value(k, gconn)
                      for k, t in ifs.b_coeffs[h].items()), Fraction(0))
            vc = sum((u * _g_key_value(k, gconn, ctx, memo)
                      for k, u in ifs.c_coeffs[h].items()), Fraction(0))
            if not (vb == vc == route_a[h]) or vb.denominator != 1:
                bad.append({"host_index": i, "graph": token_of(h),
                            "a": route_a[h], "b": str(vb), "c": str(vc)})
        return bad

    workers = workers or default_workers()
    indices = range(samples)
    if workers > 1 and samples > 64:
        from concurrent.futures import ThreadPoolExecutor
        with ThreadPoolExecutor(max_workers=workers) as pool:
            for bad in pool.map(check_host, indices):
                violations.extend(bad)
    else:
        for i in indices:
            violations.extend(check_host(i))

    ok = a_ok and c_lead_ok and not violations and math.isfinite(eta)
    return IfsVerifyReport(ok=ok, eta=eta, hosts_checked=samples,
                           violations=tuple(violations), a_ok=a_ok,
                           c_lead_ok=c_lead_ok)
