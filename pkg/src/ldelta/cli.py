"""Command-line interface.

Exit codes: 0 success, 2 validation error, 3 infeasible, 4 size guard.
"""
from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

from . import core, io, linkage
from .exceptions import LDeltaError, UnsupportedParametersError
from .experiments import ExperimentSpec, run_experiment
from .generalization import STRATEGIES
from .mechanism import plan as make_plan
from .simulation import DEFAULT_TRIALS, simulate_linkage


def _cmd_check_diversity(args) -> int:
    dataset, mapping = io.read_dataset_csv(args.dataset)
    partition = io.read_partition_json(args.partition, mapping=mapping)
    print(core.diversity(core.anonymize(dataset, partition)))
    return 0


def _cmd_anonymize(args) -> int:
    dataset, mapping = io.read_dataset_csv(args.dataset)
    partition = io.read_partition_json(args.partition, mapping=mapping)
    anon = core.anonymize(dataset, partition)
    text = io.dump_json(io.anonymized_to_dict(anon), args.out)
    if args.out is None:
        sys.stdout.write(text)
    if args.mapping_out:
        io.dump_json(mapping.to_dict(), args.mapping_out)
    return 0


def _cmd_link(args) -> int:
    anons = [io.read_anonymized_json(p) for p in args.anonymized]
    q_size = 1 + max(max(c) for a in anons for c in a.partition.classes)
    if args.qid is not None:
        res = linkage.link(anons, args.qid)
        doc = {"format_version": io.FORMAT_VERSION, "qid": res.qid,
               "class_intersection": sorted(res.class_intersection),
               "linkage": {str(k): v for k, v in res.linkage.items()},
               "diversity": res.diversity}
    else:
        linked = linkage.link_all(anons, q_size)
        doc = io.anonymized_to_dict(linked)
        doc["diversity"] = core.diversity(linked)
    sys.stdout.write(io.dump_json(doc))
    return 0


def _cmd_worst_case(args) -> int:
    try:
        closed = linkage.worst_case_post_linkage_diversity(args.ell, args.s_alphabet, args.t)
    except UnsupportedParametersError:
        if not args.brute_force:
            raise
        closed = None
    if not args.brute_force:
        print(closed)
    else:
        brute = linkage.brute_force_worst_case(args.ell, args.s_alphabet, args.t)
        print(f"closed_form: {closed if closed is not None else 'n/a'}")
        print(f"brute_force: {brute}")
        if closed is not None:
            print(f"agree: {'yes' if closed == brute else 'no'}")
    if args.vectors and closed is not None:
        for v in linkage.adversarial_construction(args.ell, args.s_alphabet, args.t):
            print(v)
    return 0


def _cmd_plan(args) -> int:
    dist = io.read_distribution_json(args.dist)
    result = make_plan(dist, args.ell, args.delta, p=args.p, beta=args.beta, strategy=args.strategy)
    text = io.dump_json(io.plan_to_dict(result), args.out)
    if args.out is None:
        sys.stdout.write(text)
    return 0


def _cmd_simulate(args) -> int:
    result = io.read_plan_json(args.plan)
    dist = io.read_distribution_json(args.dist)
    report = simulate_linkage(result, dist, t=args.t, trials=args.trials, seed=args.seed,
                              n_jobs=args.jobs, keep_per_trial=args.per_trial_csv is not None)
    text = io.dump_json(report.to_dict(), args.out)
    if args.out is None:
        sys.stdout.write(text)
    if args.per_trial_csv:
        with open(args.per_trial_csv, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["trial", "seed", "min_distinct"])
            for i, v in enumerate(report.per_trial):
                w.writerow([i, args.seed + i, int(v)])
    return 0


def _cmd_experiment(args) -> int:
    doc = io._load_json(args.spec)
    spec = ExperimentSpec.from_dict(doc)
    for path in run_experiment(spec, args.out):
        print(path)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ldelta", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check-diversity", help="print the exact l of an anonymized CSV dataset")
    p.add_argument("dataset", type=Path)
    p.add_argument("partition", type=Path)
    p.set_defaults(func=_cmd_check_diversity)

    p = sub.add_parser("anonymize", help="tally a CSV dataset into class counts")
    p.add_argument("dataset", type=Path)
    p.add_argument("partition", type=Path)
    p.add_argument("--out", type=Path)
    p.add_argument("--mapping-out", type=Path, help="write the qid label mapping as JSON")
    p.set_defaults(func=_cmd_anonymize)

    p = sub.add_parser("link", help="link anonymized releases (at one qid or everywhere)")
    p.add_argument("anonymized", type=Path, nargs="+")
    p.add_argument("--qid", type=int)
    p.set_defaults(func=_cmd_link)

    p = sub.add_parser("worst-case", help="worst-case post-linkage diversity")
    p.add_argument("--ell", type=int, required=True)
    p.add_argument("--s-alphabet", type=int, required=True)
    p.add_argument("--t", type=int, required=True)
    p.add_argument("--brute-force", action="store_true", help="also run the exhaustive search")
    p.add_argument("--vectors", action="store_true", help="print the adversarial characteristic vectors")
    p.set_defaults(func=_cmd_worst_case)

    p = sub.add_parser("plan", help="build a mechanism plan")
    p.add_argument("--dist", type=Path, required=True)
    p.add_argument("--ell", type=int, required=True)
    p.add_argument("--delta", type=float, required=True)
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--p", type=float)
    g.add_argument("--beta", type=float)
    p.add_argument("--strategy", choices=sorted(STRATEGIES), default="greedy")
    p.add_argument("--out", type=Path)
    p.set_defaults(func=_cmd_plan)

    p = sub.add_parser("simulate", help="Monte Carlo failure rate of a plan")
    p.add_argument("--plan", type=Path, required=True)
    p.add_argument("--dist", type=Path, required=True)
    p.add_argument("--t", type=int, default=1)
    p.add_argument("--trials", type=int, default=DEFAULT_TRIALS)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", type=Path)
    p.add_argument("--per-trial-csv", type=Path)
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("experiment", help="write sample-size curves as CSV")
    p.add_argument("--spec", type=Path, required=True)
    p.add_argument("--out", type=Path, required=True)
    p.set_defaults(func=_cmd_experiment)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except LDeltaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
