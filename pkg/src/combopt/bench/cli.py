"""Command-line harness.

Subcommands: clique-sweep, clique-eval, kmedoids-sweep, kmedoids-eval,
verify.  Exit codes: 0 success, 1 partial failures during a sweep,
2 invalid configuration or unreadable inputs.
"""

import argparse
import csv
import sys
from pathlib import Path

from ..clique import parse_dimacs
from .config import ConfigError, ExperimentSpec
from .evaluate import (
    evaluate_clique_results,
    evaluate_kmedoids_results,
    load_best_known_csv,
    verify_clique_records,
)
from .sweep import load_records, run_sweep


def _load_graph_dir(path):
    root = Path(path)
    files = sorted(root.glob("*.clq")) if root.is_dir() else [root]
    if not files:
        raise ConfigError(f"no .clq files under {root}")
    return {f.stem: parse_dimacs(f.read_text()) for f in files}


def _sweep_command(args, problem):
    spec = ExperimentSpec.from_toml(args.config)
    if spec.problem != problem:
        raise ConfigError(f"config is for problem {spec.problem!r}, expected {problem!r}")
    completed, failed, _ = run_sweep(spec, jobs=args.jobs, master_seed=args.seed, out=args.out)
    return 1 if failed else 0


def _clique_eval(args):
    records = load_records(args.records)
    graphs = _load_graph_dir(args.graphs)
    best_known = load_best_known_csv(args.best_known) if args.best_known else None
    tables, warnings = evaluate_clique_results(
        records, graphs, best_known=best_known, reference=args.reference
    )
    for warning in warnings:
        print(f"warning: {warning}", file=sys.stderr)
    out_dir = Path(args.out or ".")
    out_dir.mkdir(parents=True, exist_ok=True)
    for name, metric_table in tables.items():
        target = out_dir / f"{name}.csv"
        metric_table.to_csv(target)
        print(f"wrote {target}")
    return 0


def _kmedoids_eval(args):
    records = load_records(args.records)
    evaluation = evaluate_kmedoids_results(records)
    for warning in evaluation.warnings:
        print(f"warning: {warning}", file=sys.stderr)
    target = Path(args.out or "kmedoids_ranking.csv")
    evaluation.to_csv(target)
    print(f"wrote {target}")
    return 0


def _verify(args):
    records = load_records(args.records)
    graphs = _load_graph_dir(args.graphs)
    rows = verify_clique_records(records, graphs)
    fields = [
        "graph",
        "sampler",
        "update_rule",
        "kappa",
        "seed",
        "size",
        "clique",
        "inclusion_maximal",
        "local_optimum",
    ]
    if args.out:
        with open(args.out, "w", newline="") as handle:
            writer = csv.DictWriter(handle, fieldnames=fields, extrasaction="ignore")
            writer.writeheader()
            writer.writerows(rows)
        print(f"wrote {args.out}")
    else:
        writer = csv.DictWriter(sys.stdout, fieldnames=fields, extrasaction="ignore")
        writer.writeheader()
        writer.writerows(rows)
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="combopt", description="benchmark harness for the adaptive sampling toolkit"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    for name, problem in (("clique-sweep", "clique"), ("kmedoids-sweep", "kmedoids")):
        p = sub.add_parser(name, help=f"run a {problem} sweep from a TOML config")
        p.add_argument("--config", required=True, help="TOML experiment spec")
        p.add_argument("--jobs", type=int, default=1, help="concurrent cells")
        p.add_argument("--seed", type=int, default=None, help="master seed override")
        p.add_argument("--out", default=None, help="JSON-lines output override")
        p.set_defaults(func=lambda args, problem=problem: _sweep_command(args, problem))

    p = sub.add_parser("clique-eval", help="build the four clique metric tables")
    p.add_argument("--records", required=True, help="JSON-lines sweep output")
    p.add_argument("--graphs", required=True, help="directory of .clq files")
    p.add_argument("--best-known", default=None, help="CSV of graph_id,best_known")
    p.add_argument("--reference", default="scaled_cdf", help="sampler the others are tested against")
    p.add_argument("--out", default=None, help="output directory for the CSV tables")
    p.set_defaults(func=_clique_eval)

    p = sub.add_parser("kmedoids-eval", help="rank k-medoids methods")
    p.add_argument("--records", required=True, help="JSON-lines sweep output")
    p.add_argument("--out", default=None, help="output CSV path")
    p.set_defaults(func=_kmedoids_eval)

    p = sub.add_parser("verify", help="re-check stored best solutions against the clique predicates")
    p.add_argument("--records", required=True, help="JSON-lines sweep output")
    p.add_argument("--graphs", required=True, help="directory of .clq files")
    p.add_argument("--out", default=None, help="output CSV path (stdout when omitted)")
    p.set_defaults(func=_verify)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, ValueError, OSError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
