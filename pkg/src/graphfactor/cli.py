"""Command-line surface.

One executable with subcommands for the common workflows: exact statistics
of a concrete graph, compatibility checks, scans for hyper-compatible
integers, factor-system construction, permissibility queries, distribution
reports, characteristic-function comparison, proportional-graph search,
and the algebra identity suite.

Conventions.  Densities are accepted only as "a/b"; decimals are rejected
since every verdict is arithmetic in the numerator and denominator.  Check
style commands exit 0 when the answer is yes and 2 when the answer is a
mathematically clean no, keeping operational failures (exit 1) separate
for shell pipelines.  Reports are byte-identical for identical argv and
seed, independent of the worker count.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import __version__
from . import algebra, ifs, llt, proportional
from .hostgraphs import graph6_parse
from .numtheory import parse_rational
from .smallgraphs import family as parse_family
from .smallgraphs import token_of


class _Parser(argparse.ArgumentParser):
    """argparse that exits 1 on usage errors with a one-line diagnostic."""

    def error(self, message):
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _density(text: str) -> Fraction:
    if "/" not in text:
        raise argparse.ArgumentTypeError(
            f"density must be given as a/b, got {text!r}")
    try:
        p = parse_rational(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(str(exc))
    if not 0 < p < 1:
        raise argparse.ArgumentTypeError("density must satisfy 0 < p < 1")
    return p


def _emit(args, payload) -> None:
    text = payload if isinstance(payload, str) else json.dumps(payload, indent=2)
    if not text.endswith("\n"):
        text += "\n"
    if getattr(args, "output", None):
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _ctx(args) -> algebra.ProblemContext:
    return algebra.ProblemContext.make(args.n, args.p)


def _add_common(sub, *, p=True, n=True, fam=True, seed=False, workers=False,
                output=True):
    if p:
        sub.add_argument("--p", type=_density, required=True,
                         help="edge density as a/b")
    if n:
        sub.add_argument("--n", type=int, required=True, help="vertex count")
    if fam:
        sub.add_argument("--family", default="C2,C3",
                         help="family selector, e.g. C2,C3 or K2,P2,K3 "
                              "or g6:... tokens")
    if seed:
        sub.add_argument("--seed", type=int, default=2024)
    if workers:
        sub.add_argument("--workers", type=int, default=None,
                         help="worker count (default GRAPHFACTOR_WORKERS or cpu)")
    if output:
        sub.add_argument("--output", default=None, help="write report here")


def _cmd_stats(args) -> int:
    host = graph6_parse(args.graph)
    fam = parse_family(args.family)
    ctx = algebra.ProblemContext.make(host.n, args.p)
    ev = algebra.HostEvaluator(host, ctx)
    xvals = {token_of(h): ev.x(h) for h in fam}
    gvals = {token_of(h): ev.g(h) for h in fam}
    payload = {
        "graph": args.graph,
        "n": host.n,
        "p": f"{ctx.p.numerator}/{ctx.p.denominator}",
        "family": [token_of(h) for h in fam],
        "x": {k: str(v) for k, v in xvals.items()},
        "g": {k: str(v) for k, v in gvals.items()},
        "hat_proportional": all(v == 0 for v in gvals.values()),
    }
    _emit(args, payload)
    return 0


def _cmd_check(args) -> int:
    kind = args.kind
    if kind == "pc":
        verdict = proportional.is_pc(args.n, args.p.numerator, args.p.denominator)
        payload = {"kind": "pc", "n": args.n,
                   "p": f"{args.p.numerator}/{args.p.denominator}",
                   "verdict": verdict.verdict,
                   "paths": list(verdict.paths)}
        ok = verdict.verdict
    elif kind == "spc":
        verdict = proportional.is_spc(args.n, args.p.numerator, args.p.denominator)
        payload = {"kind": "spc", "n": args.n,
                   "p": f"{args.p.numerator}/{args.p.denominator}",
                   "verdict": verdict.verdict,
                   "paths": list(verdict.paths)}
        ok = verdict.verdict
    else:
        sign = "+" if kind == "hpc+" else "-"
        witness = proportional.is_hpc(
            args.n, args.p.numerator, args.p.denominator, sign)
        payload = witness.to_json()
        ok = witness.verdict
    _emit(args, payload)
    return 0 if ok else 2


def _cmd_find_hpc(args) -> int:
    a, b = args.p.numerator, args.p.denominator
    if args.pell:
        witnesses = proportional.hpc_scan(
            a, b, args.sign, mode="generator", limit=args.limit,
            unit_power_cap=args.cap)
    else:
        witnesses = proportional.hpc_scan(
            a, b, args.sign, mode="brute", n_max=args.scan_max)
    _emit(args, [w.to_json() for w in witnesses])
    return 0


def _cmd_smallest_hpc_half(args) -> int:
    _emit(args, str(proportional.smallest_hpc_half()))
    return 0


def _cmd_ifs(args) -> int:
    fam = parse_family(args.family)
    ctx = _ctx(args)
    system = ifs.ifs_construct(fam, ctx)
    report = ifs.ifs_verify(system, samples=args.samples, seed=args.seed,
                            workers=args.workers)
    payload = {
        "system": system.to_json(),
        "verify": {
            "ok": report.ok,
            "eta": report.eta,
            "hosts_checked": report.hosts_checked,
            "violations": report.violations,
        },
    }
    _emit(args, payload)
    return 0 if report.ok else 2


def _cmd_permissible(args) -> int:
    fam = parse_family(args.family)
    ctx = _ctx(args)
    members = list(fam)
    if (args.y is None) == (args.x is None):
        print("error: give exactly one of --y or --x", file=sys.stderr)
        return 1
    if args.y is not None:
        yvals = [float(v) for v in args.y.split(",")]
        if len(yvals) != len(members):
            print(f"error: --y needs {len(members)} values", file=sys.stderr)
            return 1
        y = dict(zip(members, yvals))
        verdict = ifs.is_permissible(fam, ctx, y)
        ev = ifs.x_from_y(fam, ctx, y)
        shown = {token_of(h): str(ev.x[h]) for h in members}
    else:
        xvals = [int(v) for v in args.x.split(",")]
        if len(xvals) != len(members):
            print(f"error: --x needs {len(members)} values", file=sys.stderr)
            return 1
        ev = ifs.y_from_x(fam, ctx,
                          {h: Fraction(v) for h, v in zip(members, xvals)})
        verdict = ifs.is_permissible(fam, ctx, g=ev.g)
        shown = {token_of(h): str(ev.x[h]) for h in members}
    payload = {
        "family": [token_of(h) for h in members],
        "n": ctx.n,
        "p": f"{ctx.p.numerator}/{ctx.p.denominator}",
        "x": shown,
        "permissible": bool(verdict),
    }
    _emit(args, payload)
    return 0 if verdict else 2


def _report_payload(args, report) -> str:
    if args.format == "csv":
        return report.to_csv()
    return report.dumps()


def _cmd_llt_exhaustive(args) -> int:
    fam = parse_family(args.family)
    ctx = _ctx(args)
    dist = llt.exact_joint_distribution(fam, ctx)
    report = llt.llt_error_report(dist, max_entries=args.max_entries)
    _emit(args, _report_payload(args, report))
    return 0


def _cmd_llt_mc(args) -> int:
    fam = parse_family(args.family)
    ctx = _ctx(args)
    est = llt.mc_joint_estimate(fam, ctx, args.samples, args.seed,
                                workers=args.workers)
    report = llt.llt_error_report(est, max_entries=args.max_entries)
    _emit(args, _report_payload(args, report))
    return 0


def _cmd_char_fn(args) -> int:
    fam = parse_family(args.family)
    ctx = _ctx(args)
    members = list(fam)
    tvals = [float(v) for v in args.t.split(",")]
    if len(tvals) != len(members):
        print(f"error: --t needs {len(members)} values", file=sys.stderr)
        return 1
    system = ifs.ifs_construct(fam, ctx)
    point = llt.char_fn_compare(fam, system, dict(zip(members, tvals)),
                                args.samples, args.seed, workers=args.workers)
    _emit(args, point.to_json())
    return 0


def _cmd_search_proportional(args) -> int:
    fam = parse_family(args.family)
    ctx = _ctx(args)
    result = proportional.search_proportional(
        ctx, fam, args.mode, args.seed, limit=args.limit, steps=args.steps,
        workers=args.workers)
    _emit(args, result.to_json())
    return 0


def _cmd_verify_identities(args) -> int:
    report = algebra.run_identity_suite(max_vertices=args.max_vertices,
                                        densities=tuple(args.p_list.split(",")))
    payload = {
        "max_vertices": args.max_vertices,
        "densities": args.p_list.split(","),
        "hosts_checked": report["hosts_checked"],
        "identities_checked": report["identities_checked"],
        "failures": report["failures"],
    }
    _emit(args, payload)
    return 0 if not report["failures"] else 2


def build_parser() -> _Parser:
    parser = _Parser(prog="graphfactor",
                     description="exact subgraph statistics, factor systems, "
                                 "and proportionality arithmetic")
    parser.add_argument(
        "--version", action="version",
        version=f"graphfactor {__version__} "
                f"(constant sha256 {proportional.constant_digest()})")
    sub = parser.add_subparsers(dest="command", required=True)

    s = sub.add_parser("stats", help="exact statistics of a graph6 host")
    s.add_argument("graph", help="graph6 string")
    _add_common(s, n=False)
    s.set_defaults(fn=_cmd_stats)

    s = sub.add_parser("check", help="compatibility of n at density p")
    s.add_argument("--kind", required=True, choices=("pc", "spc", "hpc+", "hpc-"))
    _add_common(s, fam=False)
    s.set_defaults(fn=_cmd_check)

    s = sub.add_parser("find-hpc", help="scan for hyper-compatible integers")
    s.add_argument("--sign", required=True, choices=("+", "-"))
    group = s.add_mutually_exclusive_group(required=True)
    group.add_argument("--scan-max", type=int, help="brute scan bound")
    group.add_argument("--pell", action="store_true",
                       help="walk the sufficiency generator")
    s.add_argument("--limit", type=int, default=4)
    s.add_argument("--cap", type=int, default=10 ** 6,
                   help="unit power cap for the generator walk")
    _add_common(s, n=False, fam=False)
    s.set_defaults(fn=_cmd_find_hpc)

    s = sub.add_parser("smallest-hpc-half",
                       help="smallest half-density hyper-compatible integer")
    _add_common(s, p=False, n=False, fam=False)
    s.set_defaults(fn=_cmd_smallest_hpc_half)

    s = sub.add_parser("ifs", help="construct and verify a factor system")
    _add_common(s, seed=True, workers=True)
    s.add_argument("--samples", type=int, default=1000)
    s.set_defaults(fn=_cmd_ifs)

    s = sub.add_parser("permissible", help="lattice membership of a point")
    _add_common(s)
    s.add_argument("--y", default=None, help="comma-separated floats")
    s.add_argument("--x", default=None, help="comma-separated integers")
    s.set_defaults(fn=_cmd_permissible)

    s = sub.add_parser("llt-exhaustive", help="exact joint distribution report")
    _add_common(s)
    s.add_argument("--max-entries", type=int, default=None)
    s.add_argument("--format", choices=("json", "csv"), default="json")
    s.set_defaults(fn=_cmd_llt_exhaustive)

    s = sub.add_parser("llt-mc", help="Monte Carlo joint distribution report")
    _add_common(s, seed=True, workers=True)
    s.add_argument("--samples", type=int, required=True)
    s.add_argument("--max-entries", type=int, default=None)
    s.add_argument("--format", choices=("json", "csv"), default="json")
    s.set_defaults(fn=_cmd_llt_mc)

    s = sub.add_parser("char-fn",
                       help="characteristic function, two routes compared")
    _add_common(s, seed=True, workers=True)
    s.add_argument("--t", required=True, help="comma-separated floats")
    s.add_argument("--samples", type=int, default=100_000)
    s.set_defaults(fn=_cmd_char_fn)

    s = sub.add_parser("search-proportional", help="find proportional graphs")
    _add_common(s, seed=True, workers=True)
    s.add_argument("--mode", choices=("exhaustive", "anneal"),
                   default="exhaustive")
    s.add_argument("--limit", type=int, default=100)
    s.add_argument("--steps", type=int, default=400_000)
    s.set_defaults(fn=_cmd_search_proportional)

    s = sub.add_parser("verify-identities", help="exact algebra identity suite")
    s.add_argument("--max-vertices", type=int, default=5)
    s.add_argument("--p-list", default="1/2,1/3,2/5")
    s.add_argument("--output", default=None)
    s.set_defaults(fn=_cmd_verify_identities)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code or 0
    try:
        return args.fn(args)
    except (ValueError, RuntimeError, ArithmeticError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
