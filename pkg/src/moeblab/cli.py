"""Command-line interface.

Subcommands mirror the library modules: `mobius` (sieve, Mertens,
pretentious scan), `mrt` (typical sets and bilinear averages), `contfrac`
(expansion and resonance data), `cocycle` (coboundary split and block
estimates), `complexity` (covering profiles), and `run` (experiment
configs producing CSV/JSON/SVG bundles).

Exit codes: 0 success, 2 parameter/usage errors, 3 assertion failures.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

from . import __version__
from .errors import MoebLabError


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    if not hasattr(args, "func"):
        parser.print_help()
        return 2
    try:
        args.func(args)
        return 0
    except MoebLabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except AssertionError as exc:
        print(f"assertion failed: {exc}", file=sys.stderr)
        return 3


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="moeblab",
        description="Covering complexity of dynamical systems and "
                    "Mobius-orbit correlation experiments")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command")

    p = sub.add_parser("mobius", help="Mobius sieve, Mertens, pretentious scan")
    p.add_argument("--limit", type=int, required=True)
    p.add_argument("--mertens", type=int, default=None, metavar="N")
    p.add_argument("--pretentious", action="store_true")
    p.add_argument("--bigq", type=int, default=2)
    p.add_argument("--tgrid", type=int, default=201)
    p.add_argument("--values", type=int, default=0, metavar="K",
                   help="print CSV rows n,mu for n <= K")
    p.set_defaults(func=_cmd_mobius)

    p = sub.add_parser("mrt", help="typical-factorization sets and bilinear averages")
    p.add_argument("--p1", type=float, required=True)
    p.add_argument("--q1", type=float, required=True)
    p.add_argument("--n0", type=int, required=True)
    p.add_argument("--bign", type=int, required=True)
    p.add_argument("--ell", type=int, default=1)
    p.add_argument("--members", type=int, default=0, metavar="K",
                   help="print CSV rows n,in_set for n <= K")
    p.set_defaults(func=_cmd_mrt)

    p = sub.add_parser("contfrac", help="expansion, convergents, resonance sets")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--alpha", type=str)
    group.add_argument("--quotients", type=str, metavar="A1,A2,...")
    p.add_argument("--tau", type=str, default="1")
    p.add_argument("--depth", type=int, default=20)
    p.add_argument("--freq-bound", type=int, default=10**6)
    p.set_defaults(func=_cmd_contfrac)

    p = sub.add_parser("cocycle", help="coboundary split and block estimates")
    p.add_argument("--coeffs", type=str, required=True,
                   help="CSV file of rows m,re,im")
    p.add_argument("--alpha", type=str, required=True)
    p.add_argument("--tau", type=str, default="1")
    p.add_argument("--depth", type=int, default=20)
    p.add_argument("--freq-bound", type=int, default=10**6)
    p.add_argument("--check-lemma54", action="store_true")
    p.add_argument("--grid", type=int, default=512)
    p.set_defaults(func=_cmd_cocycle)

    p = sub.add_parser("complexity", help="covering-number profiles")
    p.add_argument("--system", type=str, required=True, help="descriptor JSON file")
    p.add_argument("--samples", type=int, default=2000)
    p.add_argument("--eps", type=str, default="0.1,0.2")
    p.add_argument("--ns", type=str, default="1,2,4,8,16,32,64,128,256,512,1024,2048,4096")
    p.add_argument("--tau", type=float, default=1.0)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_complexity)

    p = sub.add_parser("run", help="run an experiment config (JSON)")
    p.add_argument("config", type=str)
    p.add_argument("--out", type=str, default="runs")
    p.set_defaults(func=_cmd_run)
    return parser


def _cmd_mobius(args) -> None:
    from .numtheory import (build_mobius_table, default_t_grid, mertens,
                            pretentious_scan)
    table = build_mobius_table(args.limit)
    if args.values:
        print("n,mu")
        for n in range(1, min(args.values, table.limit) + 1):
            print(f"{n},{table.mu(n)}")
    if args.mertens is not None:
        print(f"mertens({args.mertens}) = {mertens(table, args.mertens)}")
    if args.pretentious:
        grid = default_t_grid(args.limit, args.tgrid)
        rows = pretentious_scan(table, args.limit, args.bigq, grid)
        print("q,chi_index,t,distance_sq")
        for r in rows:
            print(f"{r.q},{r.chi_index},{r.t!r},{r.distance_sq!r}")


def _cmd_mrt(args) -> None:
    from .mrt import (bilinear_mobius_average, build_ladder,
                      complement_density, typical_set_mask)
    from .numtheory import build_mobius_table
    ladder = build_ladder(args.p1, args.q1, args.n0, args.bign)
    table = build_mobius_table(args.bign + args.ell)
    stats = complement_density(ladder, table)
    avg = bilinear_mobius_average(table, ladder, args.bign, args.ell)
    if args.members:
        mask = typical_set_mask(ladder, min(args.members, args.bign))
        print("n,in_set")
        for n in range(1, len(mask)):
            print(f"{n},{int(mask[n])}")
    print(json.dumps({"N": args.bign, "L": args.ell, "bilinear_avg": avg,
                      "complement_ratio": stats.complement_ratio},
                     sort_keys=True))


def _parse_tau(text: str) -> Fraction:
    return Fraction(text)


def _cmd_contfrac(args) -> None:
    from .contfrac import best_approx_check, expand, resonance_sets
    spec = args.alpha if args.alpha else [int(a) for a in args.quotients.split(",")]
    cf = expand(spec, args.depth)
    res = resonance_sets(cf, _parse_tau(args.tau), args.freq_bound)
    rows = best_approx_check(cf)
    out = {
        "alpha": str(cf.alpha),
        "quotients": list(cf.quotients),
        "convergents": [[p, q] for p, q in zip(cf.ps, cf.qs)],
        "finite": cf.finite,
        "E": list(res.E),
        "M": sorted(res.M),
        "m_finite_within_depth": res.m_finite_within_depth,
        "best_approx": [
            {"k": r.k, "norm": [r.norm_lo, r.norm_hi],
             "lower": str(r.lower_bound), "upper": str(r.upper_bound),
             "certified": r.certified, "boundary": r.boundary}
            for r in rows],
    }
    print(json.dumps(out, sort_keys=True, default=str))


def _cmd_cocycle(args) -> None:
    from .cocycle import block_estimate_check, cocycle_from_pairs, split_cocycle
    from .contfrac import expand, resonance_sets
    pairs = []
    for line in Path(args.coeffs).read_text().splitlines():
        line = line.strip()
        if not line or line.startswith("m,"):
            continue
        m, re_, im_ = line.split(",")
        pairs.append((int(m), complex(float(re_), float(im_))))
    tau = _parse_tau(args.tau)
    h = cocycle_from_pairs(pairs, tau=tau)
    cf = expand(args.alpha, args.depth)
    res = resonance_sets(cf, tau, args.freq_bound)
    split = split_cocycle(h, res)
    print(f"# support(h1) = {list(split.h1.support)}")
    print(f"# tail frequencies = {len(split.tail.support)}")
    if args.check_lemma54:
        rows = block_estimate_check(split.h1, cf, res, args.grid)
        print("t,q_t,deviation,bound_power")
        for r in rows:
            print(f"{r.t},{r.q_t},{r.deviation_sup!r},{r.bound_power!r}")


def _cmd_complexity(args) -> None:
    from .complexity import complexity_profile, sample_cloud
    from .dynamics import make_system
    descriptor = json.loads(Path(args.system).read_text())
    system = make_system(descriptor)
    cloud = sample_cloud(system, args.samples, args.seed)
    eps = [float(e) for e in args.eps.split(",")]
    ns = [int(n) for n in args.ns.split(",")]
    profiles = complexity_profile(cloud, eps, ns, args.tau)
    print("epsilon,n,Sn,method,covered_mass")
    for prof in profiles:
        for r in prof.rows:
            print(f"{prof.epsilon},{r.n},{r.s_n},{r.method},{r.covered_mass!r}")
    summary = {str(p.epsilon): {
        "classification": p.classification.kind,
        "poly_exponent": p.classification.poly_exponent,
        "exp_rate": p.classification.exp_rate,
        "entropy_rate": p.classification.entropy_rate,
        "liminf_witness": p.classification.liminf_witness,
    } for p in profiles}
    print(json.dumps(summary, sort_keys=True))


def _cmd_run(args) -> None:
    from .harness import run_experiment
    config = json.loads(Path(args.config).read_text())
    bundle = run_experiment(config, out_root=args.out)
    print(f"wrote {bundle.out_dir}")


if __name__ == "__main__":
    sys.exit(main())
