"""Command-line driver: batch verification suites, norm queries, walk bounds.

Commands
--------
verify SUITE    run a verification suite, write a JSON-lines report,
                exit 0 iff every record passed
norm            compute a delta norm with a chosen engine
walk            telescoped decay bound from a chamber start point
explain ID      print the claim a check id verifies and its grid

A JSON config file (--config) seeds the run configuration; individual flags
override it.  The SP4NORMS_JOBS environment variable sets the default worker
count, and --jobs overrides both.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .report import CHECK_REGISTRY, UnknownCheck, write_report
from .suites import SUITES, RunConfig, run_suite


def _load_config(args) -> RunConfig:
    cfg = RunConfig()
    if getattr(args, "config", None):
        with open(args.config) as fh:
            data = json.load(fh)
        for key, val in data.items():
            if not hasattr(cfg, key):
                raise ValueError(f"unknown config key: {key}")
            setattr(cfg, key, val)
    env_jobs = os.environ.get("SP4NORMS_JOBS")
    if env_jobs:
        cfg.jobs = int(env_jobs)
    for key in ("q", "max_len", "gauss_levels", "cells_i_max", "cells_m_max",
                "agree_len", "tables", "tol", "seed", "jobs", "out"):
        val = getattr(args, key, None)
        if val is not None:
            setattr(cfg, key, val)
    cfg.validate()
    return cfg


def _add_common(p):
    p.add_argument("--q", type=int, default=None, help="odd prime field size")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--tol", type=float, default=None)
    p.add_argument("--jobs", type=int, default=None)
    p.add_argument("--out", type=str, default=None, help="report path (default stdout)")
    p.add_argument("--config", type=str, default=None, help="JSON config file")


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="sp4norms", description=__doc__)
    sub = parser.add_subparsers(dest="cmd", required=True)

    pv = sub.add_parser("verify", help="run a verification suite")
    pv.add_argument("suite", choices=SUITES)
    pv.add_argument("--max-len", dest="max_len", type=int, default=None)
    pv.add_argument("--gauss-levels", dest="gauss_levels", type=int, default=None)
    pv.add_argument("--cells-i-max", dest="cells_i_max", type=int, default=None)
    pv.add_argument("--cells-m-max", dest="cells_m_max", type=int, default=None)
    pv.add_argument("--agree-len", dest="agree_len", type=int, default=None)
    pv.add_argument("--tables", type=int, default=None)
    _add_common(pv)

    pn = sub.add_parser("norm", help="compute a delta norm")
    pn.add_argument("--method", choices=("char-sup", "power-iter", "block-sup"), required=True)
    pn.add_argument("--i", type=int, required=True)
    pn.add_argument("--j", type=int, required=True)
    pn.add_argument("--delta", type=int, choices=(1, 2), default=None,
                    help="which family (default: 1 for char-sup, 2 for block-sup)")
    _add_common(pn)

    pw = sub.add_parser("walk", help="telescoped decay bound")
    pw.add_argument("--start", type=str, required=True, help="I,J")
    pw.add_argument("--s", type=float, required=True)
    pw.add_argument("--C", type=float, default=1.0)
    pw.add_argument("--variant", choices=("sec3", "sec4"), default="sec3")
    pw.add_argument("--lmax", type=int, default=24, help="grid cap for the uniform constant")
    _add_common(pw)

    pe = sub.add_parser("explain", help="describe a check id")
    pe.add_argument("check_id", type=str)

    args = parser.parse_args(argv)

    if args.cmd == "explain":
        info = CHECK_REGISTRY.get(args.check_id)
        if info is None:
            print(f"unknown check id: {args.check_id}", file=sys.stderr)
            print("known ids:", ", ".join(sorted(CHECK_REGISTRY)), file=sys.stderr)
            raise UnknownCheck(args.check_id)
        print(f"check: {args.check_id}")
        print(f"claim: {info['anchor']}")
        print(f"grid:  {info['grid']}")
        return 0

    cfg = _load_config(args)

    if args.cmd == "verify":
        records = run_suite(args.suite, cfg)
        summary = write_report(records, cfg.out)
        return 0 if summary["all_passed"] else 1

    if args.cmd == "norm":
        from .functions import delta1, delta2
        from .norms import char_sup_norm, delta1_norm, delta2_norm, regular_rep_norm

        which = args.delta or (2 if args.method == "block-sup" else 1)
        if args.method == "block-sup" and which != 2:
            parser.error("block-sup applies to the Heisenberg delta (--delta 2)")
        if args.method == "char-sup" and which != 1:
            parser.error("char-sup applies to the abelian delta (--delta 1)")
        q = cfg.q
        if args.method == "char-sup":
            value = delta1_norm(q, args.i, args.j)
        elif args.method == "block-sup":
            value = delta2_norm(q, args.i, args.j)
        else:
            f = delta1(q, args.i, args.j) if which == 1 else delta2(q, args.i, args.j)
            value = regular_rep_norm(f, seed=cfg.seed, tol=cfg.tol)
        from .norms import delta1_bound, delta2_bound

        bound = delta1_bound(q, args.i, args.j) if which == 1 else delta2_bound(q, args.i, args.j)
        print(json.dumps({
            "engine": args.method, "delta": which, "q": q,
            "i": args.i, "j": args.j, "norm": value, "bound": bound,
        }, sort_keys=True))
        return 0

    if args.cmd == "walk":
        from .symplectic import CartanPair
        from .walk import WalkBudget, chamber_constant, telescoped_bound

        i, j = (int(x) for x in args.start.split(","))
        budget = WalkBudget(cfg.q, args.s, args.C)
        bound, cq = telescoped_bound(CartanPair(i, j), budget, args.variant)
        uniform = chamber_constant(budget, args.variant, lmax=args.lmax)
        print(json.dumps({
            "start": [i, j], "s": args.s, "C": args.C, "q": cfg.q,
            "variant": args.variant, "bound": bound, "Cq": cq,
            "exponent_check": uniform,
        }, sort_keys=True))
        return 0

    return 2


if __name__ == "__main__":
    sys.exit(main())
