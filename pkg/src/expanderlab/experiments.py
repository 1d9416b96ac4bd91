"""Experiment orchestration: seeded, config-driven runs with JSON reports and
CSV plot tables.

Every experiment is a registered function taking a validated config and
returning metrics; each metric carries the name of the property it checks,
the measured value, optional confidence interval, and its pass/fail verdict
against a threshold declared in the config (thresholds are never hard-coded
in the experiment bodies).  Reports are byte-reproducible for a fixed config:
all randomness flows from the mandatory seed and timing lives in a separate
section excluded from the canonical form.
"""

from __future__ import annotations

import csv
import json
import math
import os
import time

import numpy as np

from . import adversary, sunflowers, walks
from .graphs import OracleContext, all_self_loop_graph, components
from .randomness import make_rng, seed_sequence
from .sampling import (DistributionParams, desk_params, profile_for, sample_cover_pair,
                       sample_graph, triangle_comparison, with_pinned)
from .spectral import second_eigenvalue
from .verifier import (acceptance_probability, ideal_witness, optimal_acceptance,
                       repeated_acceptance, solve_reps, subset_witness)

CONFIG_VERSION = 1
OUTPUT_ENV_VAR = "EXPANDERLAB_OUT"


class ConfigError(ValueError):
    """Invalid or incomplete experiment configuration."""


def metric(name: str, claim: str, value, threshold=None, comparison=None,
           passed=None, ci_lo=None, ci_hi=None) -> dict:
    return {"name": name, "claim": claim, "value": value, "threshold": threshold,
            "comparison": comparison, "passed": passed, "ci_lo": ci_lo, "ci_hi": ci_hi}


def check(name: str, claim: str, value: float, threshold: float, comparison: str,
          ci_lo=None, ci_hi=None) -> dict:
    ok = value >= threshold if comparison == ">=" else value <= threshold
    return metric(name, claim, value, threshold, comparison, bool(ok), ci_lo, ci_hi)


def _binomial_ci(successes: int, trials: int) -> tuple:
    # normal approximation is fine at the trial counts used here
    p = successes / trials
    half = 3.0 * math.sqrt(max(p * (1 - p), 1e-12) / trials)
    return max(0.0, p - half), min(1.0, p + half)


def _params_from(cfg_block: dict, pinned=()) -> DistributionParams:
    block = dict(cfg_block)
    if "m" in block:
        return DistributionParams(n=block["n"], m=block["m"], ell=block["ell"],
                                  d=block["d"], pinned=tuple(pinned),
                                  seed=block.get("seed", 0))
    return desk_params(n=block.get("n", 256), d=block.get("d", 8),
                       ell=block.get("ell", 4), gamma=block.get("gamma", 1 / 16),
                       pinned=tuple(pinned), seed=block.get("seed", 0))


def _thresholds(cfg: dict, *keys) -> dict:
    declared = cfg.get("thresholds", {})
    missing = [k for k in keys if k not in declared]
    if missing:
        raise ConfigError(f"config must declare thresholds {missing} "
                          f"for experiment {cfg['experiment']!r}")
    return declared


# -- experiments ---------------------------------------------------------------

def _run_concentration(cfg: dict) -> tuple[list, int]:
    """Fraction of pinned-distribution samples landing in the canonical
    component profile, with the abort atom included, plus the improvement
    trend in n."""
    th = _thresholds(cfg, "min_fraction")
    params = _params_from(cfg.get("params", {}), pinned=cfg.get("pinned", [0, 1]))
    n_samples = cfg.get("n_samples", 1000)
    rng = make_rng(seed_sequence(cfg["seed"]))
    pred = profile_for(params)
    good = aborted = 0
    for _ in range(n_samples):
        out = sample_graph(params, rng)
        if out.aborted:
            aborted += 1
            continue
        if pred(out.graph, components(out.graph)):
            good += 1
    frac = good / n_samples
    lo, hi = _binomial_ci(good, n_samples)
    nonabort = n_samples - aborted
    metrics = [
        check("fraction_good", "samples split into the expected number of "
              "size-concentrated components", frac, th["min_fraction"], ">=",
              ci_lo=lo, ci_hi=hi),
        metric("fraction_good_nonabort", "same fraction among non-abort samples",
               good / nonabort if nonabort else 0.0),
        metric("abort_rate", "share of draws hitting the block-overflow abort",
               aborted / n_samples),
    ]
    trend_ns = cfg.get("trend_n", [])
    if trend_ns:
        fractions = []
        for n in trend_ns:
            tp = desk_params(n=n, d=params.d, ell=params.ell,
                             gamma=cfg.get("params", {}).get("gamma", 1 / 16),
                             pinned=params.pinned)
            tpred = profile_for(tp)
            t_good = 0
            t_samples = cfg.get("trend_samples", n_samples)
            for _ in range(t_samples):
                out = sample_graph(tp, rng)
                if not out.aborted and tpred(out.graph, components(out.graph)):
                    t_good += 1
            fractions.append(t_good / t_samples)
            metrics.append(metric(f"fraction_good_n{n}",
                                  "profile fraction at this scale", fractions[-1]))
        monotone = all(a <= b for a, b in zip(fractions, fractions[1:]))
        metrics.append(metric("trend_monotone",
                              "profile fraction improves as n grows",
                              1.0 if monotone else 0.0, 1.0, ">=", monotone))
    return metrics, 0


def _run_qma_completeness(cfg: dict) -> tuple[list, int]:
    """Matched two-level witnesses are accepted with certainty on every
    component of every non-abort multi-block sample; covering subset
    witnesses clear the 1 - 3 sqrt(gamma) floor."""
    th = _thresholds(cfg, "tolerance", "subset_floor_slack")
    params = _params_from(cfg.get("params", {}), pinned=cfg.get("pinned", ()))
    n_samples = cfg.get("n_samples", 200)
    rng = make_rng(seed_sequence(cfg["seed"]))
    worst = 1.0
    checked = 0
    ctx = None
    min_cover = 1.0
    cover_values = []
    for _ in range(n_samples):
        out = sample_graph(params, rng)
        while out.aborted:
            out = sample_graph(params, rng)
        ctx = OracleContext(out.graph) if ctx is None else ctx
        part = components(out.graph)
        for comp in range(part.n_components):
            members = part.members(comp)
            if members.size == out.graph.n:
                continue
            ctx.graph = out.graph
            res = acceptance_probability(out.graph, ideal_witness(members, out.graph.n), ctx)
            worst = min(worst, res.p_accept)
            checked += 1
    base = with_pinned(params, ())
    floor = 1.0 - 3.0 * math.sqrt(base.gamma)
    for _ in range(cfg.get("n_cover_samples", n_samples)):
        out, cover = sample_cover_pair(base, rng)
        res = acceptance_probability(out.graph, subset_witness(cover, out.graph.n), ctx)
        min_cover = min(min_cover, res.p_accept)
        cover_values.append(res.p_accept)
    queries = ctx.queries if ctx is not None else 0
    return [
        check("min_ideal_acceptance", "matched witness accepted with certainty "
              "on every component", worst, 1.0 - th["tolerance"], ">="),
        metric("components_checked", "number of (sample, component) pairs", checked),
        check("min_cover_acceptance", "uniform witness over a covering set "
              "clears the 1-3*sqrt(gamma) floor", min_cover,
              floor - th["subset_floor_slack"], ">="),
        metric("mean_cover_acceptance", "average covering-witness acceptance",
               float(np.mean(cover_values))),
    ], queries


def _run_qma_soundness(cfg: dict) -> tuple[list, int]:
    """No witness beats 1 - gap/4 on connected single-block samples."""
    th = _thresholds(cfg, "tolerance")
    base = _params_from(cfg.get("params", {}))
    params = DistributionParams(n=base.n, m=base.m, ell=1, d=base.d, seed=base.seed)
    n_samples = cfg.get("n_samples", 200)
    rng = make_rng(seed_sequence(cfg["seed"]))
    worst_margin = -1.0
    gaps = []
    for _ in range(n_samples):
        while True:
            out = sample_graph(params, rng)
            if not out.aborted and components(out.graph).n_components == 1:
                break
        lam2 = second_eigenvalue(out.graph).value
        gap = 1.0 - lam2
        gaps.append(gap)
        best = optimal_acceptance(out.graph)
        worst_margin = max(worst_margin, best - (1.0 - gap / 4.0))
    alpha5 = float(np.percentile(gaps, 5))
    return [
        check("max_soundness_violation", "best witness never beats 1 - gap/4",
              worst_margin, th["tolerance"], "<="),
        metric("alpha_5th_percentile", "measured 5th-percentile spectral gap "
               "of the connected corpus", alpha5),
        metric("alpha_min", "smallest observed gap", float(np.min(gaps))),
    ], 0


def _run_walk_abort(cfg: dict) -> tuple[list, int]:
    """Walk-core abort rate sits inside the mixing envelope on an expander and
    is certain on the all-self-loop negative control."""
    th = _thresholds(cfg, "sigma_allowance")
    base = _params_from(cfg.get("params", {}))
    single = DistributionParams(n=base.n, m=base.m, ell=1, d=base.d, seed=base.seed)
    rng = make_rng(seed_sequence(cfg["seed"]))
    while True:
        out = sample_graph(single, rng)
        if not out.aborted and components(out.graph).n_components == 1:
            break
    g = out.graph
    alpha = 1.0 - second_eigenvalue(g).value
    core_size = cfg.get("core_size", 4)
    default_stride = max(1, math.ceil(2.0 * math.log(g.n) / alpha))
    wp = walks.WalkParams(core_size=core_size,
                          stride=cfg.get("stride", default_stride),
                          retained=cfg.get("retained", 100 * core_size))
    n_trials = cfg.get("n_trials", 10_000)
    ctx = OracleContext(g)
    rate = walks.batch_abort_rate(g, wp, n_trials, rng, ctx=ctx)
    envelope = walks.walk_abort_envelope(wp.retained, g.n, alpha, wp.stride)
    sigma = math.sqrt(max(rate * (1 - rate), 1e-12) / n_trials)
    loop_graph = all_self_loop_graph(cfg.get("control_n", 32), base.d)
    control_trials = cfg.get("control_trials", 200)
    control_rate = walks.batch_abort_rate(
        loop_graph, walks.WalkParams(2, wp.stride, wp.retained), control_trials, rng)
    return [
        check("abort_rate_within_envelope", "walk-core abort rate within the "
              "mixing envelope", rate,
              min(1.0, envelope) + th["sigma_allowance"] * sigma, "<="),
        metric("abort_rate", "measured abort rate", rate),
        metric("envelope", "mixing envelope value (clamped at 1)", min(1.0, envelope)),
        metric("alpha", "measured spectral gap of the walked graph", alpha),
        check("negative_control_aborts", "all-self-loop walk never finds a "
              "second vertex", control_rate, 1.0, ">="),
    ], ctx.queries


def _run_d1_vs_d2(cfg: dict) -> tuple[list, int]:
    """Feature-projected closeness of core-then-graph vs graph-then-core,
    with a shrinking trend across scales."""
    th = _thresholds(cfg, "max_tvd_at_largest")
    rng = make_rng(seed_sequence(cfg["seed"]))
    scales = cfg.get("trend_n", [64, 256])
    core_size = cfg.get("core_size", 2)
    n_samples = cfg.get("n_samples", 400)
    block = cfg.get("params", {})
    worst_per_scale = []
    metrics = []
    for n in scales:
        params = desk_params(n=n, d=block.get("d", 8), ell=block.get("ell", 4),
                             gamma=block.get("gamma", 1 / 16))
        report = walks.compare_sampling_orders(params, core_size, n_samples, rng)
        worst = max(entry["tvd"] for entry in report.feature_tvd.values())
        worst_per_scale.append(worst)
        for feat, entry in report.feature_tvd.items():
            metrics.append(metric(f"tvd_{feat}_n{n}",
                                  "empirical total-variation distance on this feature",
                                  entry["tvd"], ci_lo=entry["ci_lo"], ci_hi=entry["ci_hi"]))
        metrics.append(metric(f"block0_mean_graph_first_n{n}",
                              "mean block-0 preimage size, graph-first order",
                              report.block0_mean_graph_first))
        metrics.append(metric(f"block0_mean_core_first_n{n}",
                              "mean block-0 preimage size, core-first order",
                              report.block0_mean_core_first))
    metrics.append(check("max_tvd_at_largest_scale",
                         "worst feature distance at the largest scale",
                         worst_per_scale[-1], th["max_tvd_at_largest"], "<="))
    shrinking = worst_per_scale[-1] <= worst_per_scale[0]
    metrics.append(metric("trend_shrinking", "feature distance does not grow "
                          "with scale", 1.0 if shrinking else 0.0, 1.0, ">=", shrinking))
    return metrics, 0


def _run_sunflower_pipeline(cfg: dict) -> tuple[list, int]:
    """Extraction on random witness maps always verifies, honors the popular-
    class counting bound, and stays under the core-size cap."""
    th = _thresholds(cfg, "min_fraction_ok")
    n = cfg.get("n", 12)
    zeta = cfg.get("zeta", 3)
    q = cfg.get("q", 3)
    mu = cfg.get("mu", 0.5)
    trials = cfg.get("n_trials", 1000)
    rng = make_rng(seed_sequence(cfg["seed"]))
    domain_size = math.comb(n, zeta)
    ok = 0
    for _ in range(trials):
        wm = sunflowers.random_witness_map(n, zeta, q, rng)
        sf, star = sunflowers.extract_sunflower(wm, mu, zeta, n)
        popular = sum(1 for w in wm.values() if w == star)
        bound = sunflowers.core_size_bound(q, mu, n, zeta).strict
        if (sunflowers.verify_sunflower(sf, n).ok
                and popular * (2 ** q) >= domain_size
                and len(sf.core) <= bound):
            ok += 1
    frac = ok / trials
    return [
        check("fraction_ok", "every extraction verifies, meets the counting "
              "bound, and stays under the core cap", frac,
              th["min_fraction_ok"], ">="),
        metric("trials", "number of random witness maps", trials),
    ], 0


def _run_adversary_tiny(cfg: dict) -> tuple[list, int]:
    """Degree identities and the analytic worst-product cap on the explicit
    tiny relation, plus the closed-form sanity identities."""
    th = _thresholds(cfg, "identity_tolerance")
    n = cfg.get("n", 6)
    zeta = cfg.get("zeta", 2)
    k = cfg.get("k", 2)
    mu = cfg.get("mu", 0.5)
    family = [frozenset(s) for s in cfg.get("sunflower", [[0, 1], [0, 2]])]
    ideal = [frozenset(s) for s in cfg.get("ideal", None)
             ] if cfg.get("ideal") else list(sunflowers.ideal_family([0], zeta, n))
    rel = adversary.build_permutation_relation(family, ideal, k, n)
    stats = adversary.relation_stats(rel)
    degree_ok = (stats.m_lo == stats.m_hi == len(ideal)
                 and stats.mp_lo == stats.mp_hi == len(family))
    analytic_cap = (zeta / n) ** (1 - mu) * len(family) * len(ideal)
    eps_half = adversary.query_lower_bound(stats, 0.5).value
    eps_zero = adversary.query_lower_bound(stats, 0.0).value
    exact_zero = math.sqrt(stats.m_lo * stats.mp_lo / stats.l_max)
    return [
        metric("degree_identities", "every left degree is the ideal-family "
               "size and vice versa", 1.0 if degree_ok else 0.0, 1.0, ">=", degree_ok),
        check("l_max_forward_vs_analytic", "worst forward-table product under "
              "the frequency-cap estimate (the positions its derivation covers)",
              float(stats.l_max_forward), analytic_cap, "<="),
        metric("l_max", "worst product over all queryable positions "
               "(inverse-table complements can exceed the frequency cap)",
               stats.l_max),
        check("eps_half_identity", "bound vanishes at eps = 1/2",
              abs(eps_half), th["identity_tolerance"], "<="),
        check("eps_zero_identity", "bound equals sqrt(m m' / l_max) at eps = 0",
              abs(eps_zero - exact_zero), th["identity_tolerance"], "<="),
        metric("n_pairs", "relation size", stats.n_pairs),
    ], 0


def _run_triangles(cfg: dict) -> tuple[list, int]:
    """Triangle-count ratio between the multi-block distribution and the
    one-block baseline tracks the block count."""
    th = _thresholds(cfg, "ratio_slack")
    params = _params_from(cfg.get("params", {"n": 1024, "d": 8, "ell": 4}))
    n_samples = cfg.get("n_samples", 1000)
    rng = make_rng(seed_sequence(cfg["seed"]))
    result = triangle_comparison(params, n_samples, rng)
    ell = params.ell
    lo, hi = (1 - th["ratio_slack"]) * ell, (1 + th["ratio_slack"]) * ell
    ok = lo <= result["ratio"] <= hi
    return [
        metric("triangle_ratio", "mean triangles scale with the block count",
               result["ratio"], f"[{lo}, {hi}]", "in", bool(ok)),
        metric("mean_triangles", "mean triangle count, multi-block",
               result["mean"]),
        metric("baseline_mean_triangles", "mean triangle count, one-block "
               "baseline", result["baseline_mean"]),
        metric("abort_rate", "multi-block abort rate", result["abort_rate"]),
    ], 0


def _run_wrapup(cfg: dict) -> tuple[list, int]:
    """Plug measured (or supplied) quantities into the 0.99/0.01 bookkeeping
    and report every inequality's margin."""
    th = _thresholds(cfg, "target_completeness", "target_soundness")
    inputs = cfg.get("inputs")
    if inputs is None:
        sub = dict(cfg)
        sub["thresholds"] = {"tolerance": 1e-9}
        sub.setdefault("n_samples", 50)
        metrics, _ = _run_qma_soundness(sub)
        alpha = next(m["value"] for m in metrics if m["name"] == "alpha_5th_percentile")
        comp_cfg = dict(cfg)
        comp_cfg["thresholds"] = {"tolerance": 1e-10, "subset_floor_slack": 1e-9}
        comp_cfg.setdefault("n_samples", 50)
        cmetrics, _ = _run_qma_completeness(comp_cfg)
        completeness = next(m["value"] for m in cmetrics
                            if m["name"] == "min_ideal_acceptance")
    else:
        alpha = inputs["alpha"]
        completeness = inputs["completeness_min"]
    p_no = 1.0 - alpha / 4.0
    reps = solve_reps(p_no, th["target_soundness"])
    soundness_reps = repeated_acceptance(p_no, reps)
    completeness_reps = repeated_acceptance(completeness, reps)
    margins = [
        ("soundness_margin", "repeated soundness lands under target",
         th["target_soundness"] - soundness_reps),
        ("completeness_margin", "repeated completeness stays above target",
         completeness_reps - th["target_completeness"]),
        ("gap_margin", "positive completeness-soundness gap after repetition",
         completeness_reps - soundness_reps),
    ]
    metrics = [metric("repetitions", "all-accept repetitions needed", reps),
               metric("alpha", "spectral gap plugged in", alpha),
               metric("single_round_soundness", "per-round soundness ceiling", p_no)]
    for name, claim, margin in margins:
        metrics.append(check(name, claim, margin, 0.0, ">="))
    return metrics, 0


EXPERIMENTS = {
    "concentration": _run_concentration,
    "qma-completeness": _run_qma_completeness,
    "qma-soundness": _run_qma_soundness,
    "walk-abort": _run_walk_abort,
    "d1-vs-d2": _run_d1_vs_d2,
    "sunflower-pipeline": _run_sunflower_pipeline,
    "adversary-tiny": _run_adversary_tiny,
    "triangles": _run_triangles,
    "wrapup": _run_wrapup,
}


# -- driver --------------------------------------------------------------------

def validate_config(cfg: dict) -> dict:
    if not isinstance(cfg, dict):
        raise ConfigError("config must be a JSON object")
    if cfg.get("version") != CONFIG_VERSION:
        raise ConfigError(f"config version must be {CONFIG_VERSION}")
    name = cfg.get("experiment")
    if name not in EXPERIMENTS:
        raise ConfigError(f"unknown experiment {name!r}; "
                          f"known: {sorted(EXPERIMENTS)}")
    if "seed" not in cfg or not isinstance(cfg["seed"], int):
        raise ConfigError("an integer seed is mandatory")
    return cfg


def load_config(path) -> dict:
    with open(path) as fh:
        try:
            cfg = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from exc
    return validate_config(cfg)


def run_experiment(cfg: dict) -> dict:
    """Run one registered experiment and assemble its report."""
    cfg = validate_config(cfg)
    start = time.perf_counter()
    metrics, queries = EXPERIMENTS[cfg["experiment"]](cfg)
    elapsed = time.perf_counter() - start
    passed = all(m["passed"] for m in metrics if m["passed"] is not None)
    return {
        "experiment": cfg["experiment"],
        "config": cfg,
        "metrics": metrics,
        "passed": passed,
        "total_queries": queries,
        "timing": {"wall_clock_s": elapsed},
    }


def canonical_report_json(report: dict) -> str:
    """Deterministic JSON form with timing stripped."""
    trimmed = {k: v for k, v in report.items() if k != "timing"}
    return json.dumps(trimmed, sort_keys=True, indent=2)


def output_dir(cfg: dict) -> str:
    return cfg.get("output_dir") or os.environ.get(OUTPUT_ENV_VAR, ".")


def write_report(report: dict, directory=None) -> tuple[str, str]:
    """Write <experiment>_report.json and <experiment>_metrics.csv."""
    directory = directory or output_dir(report["config"])
    os.makedirs(directory, exist_ok=True)
    base = report["experiment"]
    json_path = os.path.join(directory, f"{base}_report.json")
    with open(json_path, "w") as fh:
        fh.write(canonical_report_json(report))
        fh.write("\n")
    csv_path = os.path.join(directory, f"{base}_metrics.csv")
    emit_plot_tables(report, csv_path)
    return json_path, csv_path


def emit_plot_tables(report: dict, path) -> None:
    """Long-format CSV, one metric per row; header row always present."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["experiment", "metric", "claim", "value",
                         "ci_lo", "ci_hi", "threshold", "passed"])
        for m in report.get("metrics", []):
            writer.writerow([report.get("experiment", ""), m["name"], m["claim"],
                             m["value"], m["ci_lo"], m["ci_hi"],
                             m["threshold"], m["passed"]])
