"""Command-line front end.

Subcommands: ``limits`` (theoretical anchors), ``sweep`` (replica grid from a
config file), ``graph`` (generate one weighted instance), ``dist`` (shortest
paths on a stored graph), ``branch`` (population growth simulation), ``tail``
(tail-exponent estimation).  Results go to stdout as JSON or tables; failures
print a JSON error record to stderr and exit nonzero.

Environment overrides (and nothing else is overridable this way):
FPPLAB_OUT_DIR for the sweep output directory, FPPLAB_WORKERS for the
sweep worker count.  Explicit flags beat the environment.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from .branching import BranchingSpec, estimate_growth_rate, simulate_branching
from .degrees import sample_degree_sequence
from .experiments import (
    format_summary,
    parse_config,
    parse_degree_spec,
    run_sweep,
    summarize,
    theoretical_limits,
)
from .fpp import single_source_distances, weighted_distance
from .graph import (
    assign_weights,
    graph_stats,
    pair_half_edges,
    read_graph_binary,
    read_graph_text,
    write_graph_binary,
    write_graph_text,
)
from .weights import estimate_tail_exponent, parse_weight_law, tail_exponent


def _print_json(obj) -> None:
    print(json.dumps(obj, sort_keys=True))


def cmd_limits(args: argparse.Namespace) -> int:
    lim = theoretical_limits(parse_degree_spec(args.degrees), parse_weight_law(args.weights))
    _print_json(
        {
            "nu": lim.nu,
            "alpha": lim.alpha,
            "tail_c": lim.tail_c,
            "min_degree": lim.min_degree,
            "diameter_over_log_n": lim.diameter_over_log_n,
            "flood_over_log_n": lim.flood_over_log_n,
        }
    )
    return 0


def cmd_sweep(args: argparse.Namespace) -> int:
    config = parse_config(args.config)
    out_dir = Path(args.out_dir or os.environ.get("FPPLAB_OUT_DIR", "."))
    out_dir.mkdir(parents=True, exist_ok=True)
    workers = args.workers or int(os.environ.get("FPPLAB_WORKERS", "1"))
    csv_path = out_dir / f"{config.label}.csv"
    jsonl_path = out_dir / f"{config.label}.jsonl"
    records = run_sweep(config, workers=workers, csv_path=csv_path, jsonl_path=jsonl_path)
    try:
        limits = theoretical_limits(config.degrees, config.law)
    except ValueError:
        limits = None
    print(format_summary(summarize(records, limits)))
    print(f"records: {csv_path}")
    print(f"records+timing: {jsonl_path}")
    return 0


def cmd_graph(args: argparse.Namespace) -> int:
    p = parse_degree_spec(args.degrees)
    law = parse_weight_law(args.weights)
    rng = np.random.default_rng(args.seed)
    seq = sample_degree_sequence(p, args.n, rng)
    g = assign_weights(pair_half_edges(seq, rng), law, rng)
    if args.binary:
        write_graph_binary(g, args.out)
    else:
        write_graph_text(g, args.out)
    s = graph_stats(g)
    _print_json(
        {
            "n": s.n,
            "edges": s.edge_count,
            "loops": s.loop_count,
            "multi_edge_excess": s.multi_edge_excess,
            "max_degree": s.max_degree,
            "connected": s.connected,
            "out": str(args.out),
        }
    )
    return 0


def cmd_dist(args: argparse.Namespace) -> int:
    g = read_graph_binary(args.graph) if args.binary else read_graph_text(args.graph)
    if args.target is not None:
        d = weighted_distance(g, args.source, args.target)
        _print_json({"source": args.source, "target": args.target, "distance": d})
        return 0
    dm = single_source_distances(g, args.source)
    if args.out:
        Path(args.out).write_text("".join(f"{float(x)!r}\n" for x in dm.dist))
        _print_json({"source": args.source, "out": args.out, "reachable": int(dm.reachable.sum())})
    else:
        _print_json(
            {
                "source": args.source,
                "distances": [float(x) for x in dm.dist],
            }
        )
    return 0


def cmd_branch(args: argparse.Namespace) -> int:
    p = parse_degree_spec(args.degrees)
    law = parse_weight_law(args.weights)
    spec = BranchingSpec.from_degree_distribution(p, law, initial_population=args.initial)
    rng = np.random.default_rng(args.seed)
    traj = simulate_branching(spec, rng, horizon=args.horizon, size_cap=args.size_cap)
    out = {
        "nu": spec.nu,
        "alpha": spec.alpha,
        "mean_growth_prefactor": spec.mean_growth_prefactor,
        "initial_population": spec.initial_population,
        "final_time": traj.final_time,
        "final_population": traj.final_population,
        "terminal_reason": traj.terminal_reason,
        "events": int(traj.times.size),
    }
    if args.fit:
        out["estimated_growth_rate"] = estimate_growth_rate(traj)
    _print_json(out)
    return 0


def cmd_tail(args: argparse.Namespace) -> int:
    if args.samples:
        samples = np.array(
            [float(tok) for tok in Path(args.samples).read_text().split()], dtype=float
        )
        truth = None
    else:
        if not args.weights:
            raise ValueError("tail needs either --samples FILE or --weights LAW")
        law = parse_weight_law(args.weights)
        rng = np.random.default_rng(args.seed)
        samples = np.asarray(law.sample(rng, size=args.n_samples), dtype=float)
        try:
            truth = tail_exponent(law).value
        except TypeError:
            truth = None
    est = estimate_tail_exponent(samples, n_boot=args.bootstrap)
    out = {
        "value": est.value,
        "band_low": est.band[0],
        "band_high": est.band[1],
        "curvature_ratio": est.curvature_ratio,
        "classification": est.classification,
        "samples": int(samples.size),
    }
    if truth is not None and math.isfinite(truth):
        out["analytic_value"] = truth
    _print_json(out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="fpplab", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("limits", help="theoretical diameter/flood anchors for a model")
    p.add_argument("--degrees", required=True, help="regular:d | k:p,k:p,... | @file")
    p.add_argument("--weights", required=True, help="exp:r | shiftexp:r,s | gamma:k,r | weibull:k[,s]")
    p.set_defaults(fn=cmd_limits)

    p = sub.add_parser("sweep", help="run a replica sweep from a config file")
    p.add_argument("--config", required=True)
    p.add_argument("--out-dir", default=None, help="output directory (env FPPLAB_OUT_DIR)")
    p.add_argument("--workers", type=int, default=None, help="parallel replicas (env FPPLAB_WORKERS)")
    p.set_defaults(fn=cmd_sweep)

    p = sub.add_parser("graph", help="generate one weighted multigraph")
    p.add_argument("--degrees", required=True)
    p.add_argument("--weights", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--binary", action="store_true")
    p.set_defaults(fn=cmd_graph)

    p = sub.add_parser("dist", help="shortest paths on a stored graph")
    p.add_argument("--graph", required=True)
    p.add_argument("--binary", action="store_true")
    p.add_argument("--source", type=int, required=True)
    p.add_argument("--target", type=int, default=None)
    p.add_argument("--out", default=None, help="write per-vertex distances here")
    p.set_defaults(fn=cmd_dist)

    p = sub.add_parser("branch", help="simulate the branching growth model")
    p.add_argument("--degrees", required=True)
    p.add_argument("--weights", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--horizon", type=float, default=None)
    p.add_argument("--size-cap", type=int, default=None)
    p.add_argument("--initial", type=int, default=None, help="override the initial population")
    p.add_argument("--fit", action="store_true", help="also fit the empirical growth rate")
    p.set_defaults(fn=cmd_branch)

    p = sub.add_parser("tail", help="estimate the weight-tail exponent from samples")
    p.add_argument("--samples", default=None, help="file of numbers, whitespace separated")
    p.add_argument("--weights", default=None, help="draw fresh samples from this law instead")
    p.add_argument("--n-samples", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--bootstrap", type=int, default=200)
    p.set_defaults(fn=cmd_tail)

    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (ValueError, TypeError, ArithmeticError, OSError) as exc:
        print(
            json.dumps({"error": type(exc).__name__, "message": str(exc)}),
            file=sys.stderr,
        )
        return 1


if __name__ == "__main__":
    sys.exit(main())
