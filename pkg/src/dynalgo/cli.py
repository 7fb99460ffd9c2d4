"""Command line entry point: ``dynalgo {gen,run,counter,verify}``."""
from __future__ import annotations

import argparse
import csv
import json
import os
import sys

from .counter import CounterDist, adversarial_counter_dist, default_budget, simulate_counter
from .harness.runner import RunConfig, run, state_dump, verify_dump
from .harness.workloads import (Workload, gen_matching_adversary, gen_planted,
                                gen_spanner_skew, gen_uniform)


def _default_seed() -> int:
    return int(os.environ.get("DYNALGO_SEED", "0"))


def _add_gen_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--gen", choices=["uniform", "adversary", "skew", "planted"],
                   default="uniform")
    p.add_argument("--n", type=int, default=64)
    p.add_argument("--steps", type=int, default=1000)
    p.add_argument("--bias", type=float, default=0.5, help="insert probability")
    p.add_argument("--level", type=int, default=2, help="adversary level i")
    p.add_argument("--rounds", type=int, default=10, help="adversary rounds")
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--seed", type=int, default=None,
                   help="defaults to $DYNALGO_SEED or 0")


def _generate(args) -> Workload:
    if args.gen == "uniform":
        return gen_uniform(args.n, args.steps, args.bias, args.seed)
    if args.gen == "adversary":
        return gen_matching_adversary(args.level, args.rounds, args.seed)
    if args.gen == "skew":
        return gen_spanner_skew(args.n, args.k, args.seed)
    return gen_planted(args.n, args.steps, args.seed)


def cmd_gen(args) -> int:
    w = _generate(args)
    if args.out in (None, "-"):
        sys.stdout.write(w.to_text())
    else:
        w.save(args.out)
    return 0


def cmd_run(args) -> int:
    w = Workload.load(args.workload) if args.workload else _generate(args)
    cfg = RunConfig(algo=args.algo, n=w.n, k=args.k, seed=args.seed, wrap=args.wrap,
                    copies_c=args.copies_c, alpha=args.alpha, ell=args.ell,
                    phase_len=args.phase_len, verify=args.verify,
                    ell_scale=args.ell_scale, C=args.C, original=args.original)
    res = run(w, cfg)
    text = res.to_json() + "\n"
    if args.out in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(args.out, "w", newline="\n") as fh:
            fh.write(text)
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            wr = csv.writer(fh, lineterminator="\n")
            wr.writerow(["update", "units", "flush_units"])
            for t, (u, f) in enumerate(zip(res.units, res.flush_units)):
                wr.writerow([t, u, f])
    if args.dump:
        with open(args.dump, "w") as fh:
            json.dump(state_dump(res, cfg), fh)
    return 1 if res.report["verify"]["failed"] else 0


def cmd_counter(args) -> int:
    r = args.r if args.r is not None else default_budget(args.alpha, args.ell)
    if args.dist == "adversarial":
        dist = adversarial_counter_dist(args.alpha, r, args.ell)
    else:
        dist = CounterDist(args.dist, args.alpha)
    res = simulate_counter(dist, args.alpha, args.ell, args.trials, args.seed, r)
    json.dump(res.to_json(), sys.stdout)
    sys.stdout.write("\n")
    return 0


def cmd_verify(args) -> int:
    with open(args.state) as fh:
        dump = json.load(fh)
    problems = verify_dump(dump)
    json.dump({"ok": not problems, "problems": problems}, sys.stdout)
    sys.stdout.write("\n")
    return 0 if not problems else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dynalgo", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="write a workload file")
    _add_gen_args(g)
    g.add_argument("-o", "--out", default=None)
    g.set_defaults(func=cmd_gen)

    r = sub.add_parser("run", help="replay a workload and write a JSON report")
    _add_gen_args(r)
    r.add_argument("--algo", choices=["matching", "spanner"], default="matching")
    r.add_argument("--workload", help="workload file; otherwise one is generated")
    r.add_argument("--wrap", action="store_true", help="run under the deamortizer")
    r.add_argument("--copies-c", type=int, default=1)
    r.add_argument("--alpha", type=float, default=None,
                   help="expected cost bound; calibrated by a pilot run if omitted")
    r.add_argument("--ell", type=int, default=None, help="stream length bound")
    r.add_argument("--phase-len", type=int, default=None,
                   help="rotate instances every this many updates")
    r.add_argument("--verify", default="sample:64",
                   help="none, every, final or sample:K")
    r.add_argument("--ell-scale", type=float, default=1.0,
                   help="multiplier of the spanner filter prefix length")
    r.add_argument("--C", type=int, default=4, help="matching rise constant")
    r.add_argument("--original", action="store_true",
                   help="matching without random rises and resets")
    r.add_argument("-o", "--out", default=None)
    r.add_argument("--csv", default=None, help="per-update units as CSV")
    r.add_argument("--dump", default=None, help="final state for `verify`")
    r.set_defaults(func=cmd_run)

    c = sub.add_parser("counter", help="simulate the dynamic counter")
    c.add_argument("--dist", choices=["const", "geom", "adversarial"], default="geom")
    c.add_argument("--alpha", type=float, default=1.0)
    c.add_argument("--ell", type=int, default=1024)
    c.add_argument("--trials", type=int, default=10000)
    c.add_argument("--seed", type=int, default=None)
    c.add_argument("--r", type=float, default=None)
    c.set_defaults(func=cmd_counter)

    v = sub.add_parser("verify", help="check a state dump against the oracles")
    v.add_argument("--state", required=True)
    v.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if getattr(args, "seed", 0) is None:
            args.seed = _default_seed()
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"dynalgo: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
