"""Command-line front end.

Verbs: sample-graph, spectral-report, verify, verify-dist, walk-sample,
dist-compare, sunflower-extract, adversary-bound, triangles, experiment run.
Stochastic verbs require --seed; results print as JSON on stdout.  Exit
codes: 0 all declared checks pass, 1 a check failed, 2 usage or config error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import adversary, sunflowers, walks
from .experiments import (ConfigError, OUTPUT_ENV_VAR, load_config, run_experiment,
                          write_report)
from .graphs import components, load_graph, load_graph_csv, save_graph, save_graph_csv
from .randomness import make_rng, seed_sequence
from .sampling import (DistributionParams, desk_params, sample_conditioned,
                       sample_graph, triangle_count, exactly_components, connected)
from .spectral import spectral_report
from .verifier import (acceptance_probability, expectation_over_distribution,
                       ideal_witness, optimal_acceptance, subset_witness,
                       uniform_witness)

USAGE_ERROR = 2


def _load_any_graph(path):
    if str(path).endswith(".csv"):
        return load_graph_csv(path)
    return load_graph(path)


def _parse_vertices(text: str) -> tuple:
    return tuple(int(v) for v in text.split(",") if v != "")


def _params_from_args(args) -> DistributionParams:
    if args.m is not None:
        return DistributionParams(n=args.n, m=args.m, ell=args.ell, d=args.d,
                                  pinned=_parse_vertices(args.pinned), seed=args.seed)
    return desk_params(n=args.n, d=args.d, ell=args.ell, gamma=args.gamma,
                       pinned=_parse_vertices(args.pinned), seed=args.seed)


def _emit(obj) -> None:
    json.dump(obj, sys.stdout, indent=2, sort_keys=True, default=_jsonable)
    sys.stdout.write("\n")


def _jsonable(obj):
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, frozenset):
        return sorted(obj)
    raise TypeError(f"not JSON-serializable: {type(obj)}")


def cmd_sample_graph(args) -> int:
    params = _params_from_args(args)
    rng = make_rng(seed_sequence(args.seed))
    transcript_lines = []
    last = None
    for _ in range(args.count):
        out = sample_graph(params, rng)
        last = out
        transcript_lines.append({
            "aborted": out.aborted,
            "k_map": out.k_map.tolist(),
            "iota": None if out.iota is None else out.iota.tolist(),
            "coins": out.coins,
        })
    if args.out:
        if args.out.endswith(".csv"):
            save_graph_csv(last.graph, args.out)
        else:
            save_graph(last.graph, args.out)
    if args.transcript:
        with open(args.transcript, "w") as fh:
            for line in transcript_lines:
                fh.write(json.dumps(line) + "\n")
    part = components(last.graph)
    _emit({"n": last.graph.n, "d": last.graph.degree, "aborted": last.aborted,
           "component_sizes": list(part.size_multiset()),
           "graph_file": args.out, "samples_drawn": args.count})
    return 0


def cmd_spectral_report(args) -> int:
    g = _load_any_graph(args.graph)
    dense_threshold = 0 if args.method == "power" else (
        10 ** 9 if args.method == "dense" else args.dense_threshold)
    rep = spectral_report(g, tol=args.tol, max_iter=args.max_iter,
                          dense_threshold=dense_threshold)
    _emit(rep.to_dict())
    return 0 if rep.converged else 1


def _witness_from_spec(spec: str, n: int) -> np.ndarray:
    if spec == "uniform":
        return uniform_witness(n)
    if spec.startswith("ideal:"):
        return ideal_witness(_parse_vertices(spec[6:]), n)
    if spec.startswith("subset:"):
        return subset_witness(_parse_vertices(spec[7:]), n)
    if spec.startswith("file:"):
        w = np.loadtxt(spec[5:], dtype=np.float64).reshape(-1)
        return w
    raise ValueError(f"unknown witness spec {spec!r}; "
                     "use ideal:V1,V2|subset:V1,V2|uniform|file:PATH")


def cmd_verify(args) -> int:
    g = _load_any_graph(args.graph)
    if args.witness == "optimal":
        _emit({"p_accept_best": optimal_acceptance(g)})
        return 0
    w = _witness_from_spec(args.witness, g.n)
    out = acceptance_probability(g, w)
    _emit(out.to_dict())
    return 0


def cmd_verify_dist(args) -> int:
    with open(args.config) as fh:
        cfg = json.load(fh)
    params = DistributionParams(**cfg["params"])
    condition = cfg.get("condition")
    if condition == "connected":
        pred = connected
    elif condition == "exact-components":
        pred = exactly_components(cfg["components"])
    elif condition is None:
        pred = None
    else:
        raise ConfigError(f"unknown condition {condition!r}")
    rng = make_rng(seed_sequence(cfg["seed"]))

    def sampler(gen):
        if pred is None:
            out = sample_graph(params, gen)
            while out.aborted:
                out = sample_graph(params, gen)
            return out.graph
        res = sample_conditioned(params, pred, gen)
        if not res.accepted:
            raise RuntimeError("conditioning retry budget exhausted")
        return res.outcome.graph

    wspec = cfg.get("witness", "uniform")
    witness = "optimal" if wspec == "optimal" else _witness_from_spec(wspec, params.n)
    result = expectation_over_distribution(sampler, witness, cfg["n_samples"], rng)
    _emit({"mean": result.mean, "stderr": result.stderr, "n_samples": result.n_samples})
    return 0


def cmd_walk_sample(args) -> int:
    g = _load_any_graph(args.graph)
    wp = walks.WalkParams(core_size=args.m, stride=args.t, retained=args.r)
    rng = make_rng(seed_sequence(args.seed))
    out = walks.sample_walk_core(g, wp, rng)
    _emit({"core": None if out.core is None else list(out.core),
           "aborted": out.aborted, "start": out.start, "queries": out.queries})
    return 0


def cmd_dist_compare(args) -> int:
    with open(args.config) as fh:
        cfg = json.load(fh)
    params = DistributionParams(**cfg["params"])
    rng = make_rng(seed_sequence(cfg["seed"]))
    report = walks.compare_sampling_orders(params, cfg.get("core_size", 2),
                                           cfg["n_samples"], rng)
    _emit({"feature_tvd": report.feature_tvd,
           "block0_mean_graph_first": report.block0_mean_graph_first,
           "block0_mean_core_first": report.block0_mean_core_first,
           "n_samples": report.n_samples})
    return 0


def cmd_sunflower_extract(args) -> int:
    wm = sunflowers.load_witness_map(args.input)
    sf, star = sunflowers.extract_sunflower(wm, args.mu, args.zeta, args.n)
    verdict = sunflowers.verify_sunflower(sf, args.n)
    _emit({"witness": star,
           "core": sorted(sf.core),
           "family_size": len(sf.sets),
           "verified": verdict.ok})
    return 0 if verdict.ok else 1


def cmd_adversary_bound(args) -> int:
    if args.families:
        with open(args.families) as fh:
            fam = json.load(fh)
        sunflower_sets = [frozenset(s) for s in fam["sunflower"]]
        ideal_sets = [frozenset(s) for s in fam["ideal"]]
    else:
        sunflower_sets = [frozenset({0, v}) for v in range(1, 1 + args.petals)]
        ideal_sets = list(sunflowers.ideal_family([0], args.zeta, args.n))
    rel = adversary.build_permutation_relation(sunflower_sets, ideal_sets,
                                               args.k, args.n)
    stats = adversary.relation_stats(rel)
    brute = adversary.distinguishing_lower_bound(stats, args.delta)
    closed = adversary.sunflower_permutation_bound(args.n, args.zeta, args.mu,
                                                   args.delta)
    _emit({"stats": {"m_lo": stats.m_lo, "m_hi": stats.m_hi,
                     "mp_lo": stats.mp_lo, "mp_hi": stats.mp_hi,
                     "l_max": stats.l_max, "l_max_forward": stats.l_max_forward,
                     "n_pairs": stats.n_pairs},
           "brute_force_bound": brute.value,
           "vacuous": brute.vacuous,
           "closed_form_bound": closed,
           "graph_closed_form_bound": adversary.sunflower_graph_bound(
               args.n, args.zeta, args.mu, args.delta)})
    return 0


def cmd_triangles(args) -> int:
    g = _load_any_graph(args.graph)
    rep = triangle_count(g)
    _emit({"count": rep.count, "per_component": list(rep.per_component)})
    return 0


def cmd_experiment(args) -> int:
    cfg = load_config(args.config)
    report = run_experiment(cfg)
    json_path, csv_path = write_report(report, args.out)
    _emit({"passed": report["passed"], "report": json_path, "table": csv_path})
    return 0 if report["passed"] else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="expanderlab",
        description="Desk-scale lab for distinguishing multi-component graph "
                    "oracles from expanders")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sample-graph", help="draw graphs from the blocked-matching distribution")
    p.add_argument("--n", type=int, default=256)
    p.add_argument("--d", type=int, default=8)
    p.add_argument("--ell", type=int, default=4)
    p.add_argument("--m", type=int, default=None, help="super-vertex count (default from gamma)")
    p.add_argument("--gamma", type=float, default=1 / 16)
    p.add_argument("--pinned", default="", help="comma-separated vertices pinned to block 0")
    p.add_argument("--count", type=int, default=1)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", default=None, help="graph file (.csv for the text form)")
    p.add_argument("--transcript", default=None, help="JSON-lines transcript log")
    p.set_defaults(fn=cmd_sample_graph)

    p = sub.add_parser("spectral-report", help="second eigenvalue and expansion report")
    p.add_argument("--graph", required=True)
    p.add_argument("--method", choices=["auto", "dense", "power"], default="auto")
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--max-iter", type=int, default=100_000)
    p.add_argument("--dense-threshold", type=int, default=4096)
    p.set_defaults(fn=cmd_spectral_report)

    p = sub.add_parser("verify", help="acceptance probability of a witness on a graph")
    p.add_argument("--graph", required=True)
    p.add_argument("--witness", required=True,
                   help="ideal:V1,V2|subset:V1,V2|uniform|file:PATH|optimal")
    p.set_defaults(fn=cmd_verify)

    p = sub.add_parser("verify-dist", help="mean acceptance over a graph distribution")
    p.add_argument("--config", required=True)
    p.set_defaults(fn=cmd_verify_dist)

    p = sub.add_parser("walk-sample", help="lazy-walk core sampling")
    p.add_argument("--graph", required=True)
    p.add_argument("--m", type=int, required=True, help="core size")
    p.add_argument("--t", type=int, required=True, help="steps between retained samples")
    p.add_argument("--r", type=int, required=True, help="retained samples")
    p.add_argument("--seed", type=int, required=True)
    p.set_defaults(fn=cmd_walk_sample)

    p = sub.add_parser("dist-compare", help="core-then-graph vs graph-then-core closeness")
    p.add_argument("--config", required=True)
    p.set_defaults(fn=cmd_dist_compare)

    p = sub.add_parser("sunflower-extract", help="greedy sunflower extraction from a witness map")
    p.add_argument("--input", required=True, help="JSON-lines witness map")
    p.add_argument("--mu", type=float, required=True)
    p.add_argument("--zeta", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.set_defaults(fn=cmd_sunflower_extract)

    p = sub.add_parser("adversary-bound", help="relation statistics and query bounds")
    p.add_argument("--n", type=int, default=6)
    p.add_argument("--zeta", type=int, default=2)
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--mu", type=float, default=0.5)
    p.add_argument("--delta", type=float, default=0.1)
    p.add_argument("--petals", type=int, default=2,
                   help="sunflower petals around vertex 0 when no families file is given")
    p.add_argument("--families", default=None, help="JSON {sunflower: [...], ideal: [...]}")
    p.set_defaults(fn=cmd_adversary_bound)

    p = sub.add_parser("triangles", help="triangle count of a graph")
    p.add_argument("--graph", required=True)
    p.set_defaults(fn=cmd_triangles)

    p = sub.add_parser("experiment", help="run a configured experiment")
    exp_sub = p.add_subparsers(dest="experiment_command", required=True)
    pr = exp_sub.add_parser("run")
    pr.add_argument("config")
    pr.add_argument("--out", default=None,
                    help=f"output directory (default ${OUTPUT_ENV_VAR} or .)")
    pr.set_defaults(fn=cmd_experiment)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return USAGE_ERROR if exc.code not in (0, None) else 0
    try:
        return args.fn(args)
    except (ConfigError, ValueError, FileNotFoundError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR


if __name__ == "__main__":
    sys.exit(main())
