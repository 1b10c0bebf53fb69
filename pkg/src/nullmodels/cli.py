"""Command-line entry point: generate graphs, compute stats, run experiments.

Exit codes: 0 success, 1 runtime or assertion failure, 2 usage/validation.
Every artifact embeds the canonical hash of the producing configuration, and
all outputs are byte-reproducible from (config, seed) regardless of the
worker count. The environment variable NULLMODELS_SEED overrides the seed
found in an experiment config file.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import time

import numpy as np

from . import __version__
from .degree import DegreeLaw, sample_sequence, replica_rng
from .graphs import (EdgeListParseError, KernelSpec, KernelConditionError,
                     MultiGraph, erase, generate_cm, generate_irg)
from .integrals import (QuadratureToleranceError, TripleIntegralSpec,
                        triple_integral)
from .stats import (DegenerateStatisticError, clustering_global,
                    degree_power_sums, pearson)
from . import experiments as exp

try:
    import jsonschema
except ImportError:                  # pragma: no cover
    jsonschema = None


def canonical_config_hash(config: dict) -> str:
    """Hash that is stable under key reordering."""
    blob = json.dumps(config, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ": "), indent=1)


# -- generate ------------------------------------------------------------------


def cmd_generate(args) -> int:
    try:
        law = DegreeLaw(args.gamma)
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    if args.n < 1:
        print("error: need n >= 1", file=sys.stderr)
        return 2
    seq = sample_sequence(law, args.n, replica_rng(args.seed, 0))
    gen_rng = replica_rng(args.seed, 1)
    try:
        if args.model == "cm":
            g = generate_cm(seq, gen_rng)
        elif args.model == "ecm":
            g = generate_cm(seq, gen_rng)
            g, report = erase(g)
        elif args.model == "irg":
            g = generate_irg(seq, KernelSpec.named(args.kernel), gen_rng)
        else:
            print(f"error: unknown model '{args.model}'", file=sys.stderr)
            return 2
    except (KeyError, KernelConditionError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except Exception as e:
        print(f"generation failed: {e}", file=sys.stderr)
        return 1
    gen_params = {"model": args.model, "gamma": args.gamma, "n": args.n,
                  "seed": args.seed}
    if args.model == "irg":
        gen_params["kernel"] = args.kernel
        g.meta["kernel"] = args.kernel
    g.meta.update({"model": args.model, "gamma": repr(args.gamma), "seed": args.seed,
                   "config_hash": canonical_config_hash(gen_params)})
    with open(args.out, "w") as fh:
        fh.write(g.to_text())
    if args.model == "ecm":
        with open(args.out + ".erasure.json", "w") as fh:
            fh.write(report.to_json())
    return 0


# -- stats ---------------------------------------------------------------------


def cmd_stats(args) -> int:
    try:
        with open(args.graph) as fh:
            g = MultiGraph.from_text(fh.read())
    except EdgeListParseError as e:
        print(f"parse error: {e}", file=sys.stderr)
        return 1
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    out = {"n": g.n, "edges": g.edge_count, "meta": g.meta}
    try:
        pb = pearson(g)
        out["pearson"] = {"r": pb.r, "r_plus": pb.r_plus, "r_minus": pb.r_minus,
                          "numerator_edge_sum": pb.numerator_edge_sum,
                          "s2": pb.s2, "s3": pb.s3, "l": pb.l}
    except DegenerateStatisticError as e:
        out["pearson"] = None
        out["pearson_degenerate_reason"] = str(e)
    try:
        cr = clustering_global(g)
        out["clustering"] = {"triangles": cr.triangles, "wedge_sum": cr.wedge_sum,
                             "c_global": cr.c_global}
    except DegenerateStatisticError as e:
        out["clustering"] = None
        out["clustering_degenerate_reason"] = str(e)
    out["degree_power_sums"] = {str(p): v for p, v in
                                degree_power_sums(g, (1, 2, 3, 4, 6)).items()}
    print(_dump(out))
    return 0


# -- integrate -------------------------------------------------------------------


def cmd_integrate(args) -> int:
    try:
        kernel = KernelSpec.named(args.kernel)
        lower = args.epsilon
        upper = 1.0 / args.epsilon if args.epsilon > 0 else float("inf")
        spec = TripleIntegralSpec(gamma=args.gamma, kernel=kernel.q, lower=lower,
                                  upper=upper, tolerance=args.tolerance)
    except (KeyError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    table = []
    try:
        for npp in (8, 10, 12):
            val, err = triple_integral(spec, nodes_per_panel=npp)
            table.append({"nodes_per_panel": npp, "value": val, "error_estimate": err})
    except QuadratureToleranceError as e:
        print(_dump({"error": "tolerance unreachable", "best_value": float(e.value),
                     "error_bound": float(e.bound)}))
        return 1
    print(_dump({"gamma": args.gamma, "kernel": args.kernel, "epsilon": args.epsilon,
                 "value": table[-1]["value"], "error_estimate": table[-1]["error_estimate"],
                 "convergence": table}))
    return 0


# -- experiment ------------------------------------------------------------------

CONFIG_SCHEMA = {
    "type": "object",
    "required": ["seed", "experiments"],
    "additionalProperties": False,
    "properties": {
        "seed": {"type": "integer"},
        "gamma": {"type": "number", "exclusiveMinimum": 1.0, "exclusiveMaximum": 2.0},
        "threads": {"type": "integer", "minimum": 1},
        "experiments": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["name", "type"],
                "additionalProperties": False,
                "properties": {
                    "name": {"type": "string"},
                    "type": {"enum": ["scaling", "distribution", "erased_sums",
                                      "joint", "conditional_variance",
                                      "edge_probability"]},
                    "model": {"enum": ["cm", "ecm", "irg"]},
                    "statistic": {"type": "string"},
                    "kernel": {"enum": ["chung_lu", "poisson", "max_entropy"]},
                    "gamma": {"type": "number", "exclusiveMinimum": 1.0,
                              "exclusiveMaximum": 2.0},
                    "sizes": {"type": "array", "items": {"type": "integer", "minimum": 1}},
                    "replicas": {"type": ["integer", "array"]},
                    "n": {"type": "integer", "minimum": 1},
                    "pairings": {"type": "integer", "minimum": 1000},
                    "pairs": {"type": "integer", "minimum": 1},
                    "n_limit": {"type": "integer", "minimum": 100},
                    "epsilon": {"type": "number"},
                    "assert": {
                        "type": "object",
                        "additionalProperties": False,
                        "properties": {
                            "slope": {"type": "object",
                                      "properties": {"target": {"type": "number"},
                                                     "tol": {"type": "number"}},
                                      "required": ["target", "tol"]},
                            "sign_fraction_min": {"type": "number"},
                            "ks_max": {"type": "number"},
                            "ratio_range": {"type": "array"},
                            "max_entrywise_diff": {"type": "number"},
                            "tag": {"type": "string"},
                        },
                    },
                },
            },
        },
    },
}


def validate_config(config: dict):
    """Returns a list of 'path: message' strings; empty when valid."""
    if jsonschema is None:
        return []
    validator = jsonschema.Draft202012Validator(CONFIG_SCHEMA)
    problems = []
    for err in sorted(validator.iter_errors(config), key=lambda e: list(e.path)):
        path = "/".join(str(p) for p in err.path) or "<root>"
        problems.append(f"{path}: {err.message}")
    return problems


def _experiment_config(entry: dict, defaults: dict) -> exp.ExperimentConfig:
    return exp.ExperimentConfig(
        model=entry.get("model", "ecm"),
        gamma=entry.get("gamma", defaults.get("gamma", 1.5)),
        sizes=entry.get("sizes", [1000, 10_000]),
        replicas=entry.get("replicas", 10),
        statistic=entry.get("statistic", "erased_edges"),
        seed=defaults["seed"],
        kernel=entry.get("kernel", "poisson"),
    )


def _check_assertions(entry, summary):
    """Returns a list of failure strings for the enabled assertions."""
    fails = []
    want = entry.get("assert", {})
    tag = want.get("tag", entry["name"])
    if "slope" in want:
        target, tol = want["slope"]["target"], want["slope"]["tol"]
        got = summary.get("slope")
        if got is None or abs(got - target) > tol:
            fails.append(f"{tag}: slope {got} outside {target} +- {tol}")
    if "sign_fraction_min" in want:
        frac = summary.get("sign_fraction", [0.0])[-1]
        if frac < want["sign_fraction_min"]:
            fails.append(f"{tag}: negative fraction {frac} below "
                         f"{want['sign_fraction_min']}")
    if "ks_max" in want and summary.get("ks", 0.0) > want["ks_max"]:
        fails.append(f"{tag}: KS {summary['ks']} above {want['ks_max']}")
    if "ratio_range" in want:
        lo, hi = want["ratio_range"]
        ratio = summary.get("ratio")
        if ratio is None or not lo <= ratio <= hi:
            fails.append(f"{tag}: ratio {ratio} outside [{lo}, {hi}]")
    if "max_entrywise_diff" in want:
        got = summary.get("max_entrywise_diff")
        if got is None or got > want["max_entrywise_diff"]:
            fails.append(f"{tag}: rank-matrix deviation {got} above "
                         f"{want['max_entrywise_diff']}")
    return fails


def _run_experiment_entry(entry, defaults, threads):
    kind = entry["type"]
    if kind == "scaling":
        cfg = _experiment_config(entry, defaults)
        records = exp.scaling_records(cfg, threads=threads)
        res = exp.run_scaling(cfg, records=records)
        return res.summary(), records
    if kind == "distribution":
        res = exp.run_distribution(_experiment_config(entry, defaults),
                                   n_limit=entry.get("n_limit", 20_000),
                                   threads=threads)
        records = [{"replica": i, "rescaled": float(v)}
                   for i, v in enumerate(res.rescaled)]
        return res.summary(), records
    if kind == "erased_sums":
        results = exp.run_erased_sums(_experiment_config(entry, defaults),
                                      threads=threads)
        return {name: r.summary() for name, r in results.items()}, None
    if kind == "joint":
        res = exp.run_joint(_experiment_config(entry, defaults),
                            n_limit=entry.get("n_limit", 20_000), threads=threads)
        return res.summary(), None
    law = DegreeLaw(entry.get("gamma", defaults.get("gamma", 1.5)))
    n = entry.get("n", 10_000)
    seq = sample_sequence(law, n, replica_rng(defaults["seed"], 0))
    if kind == "conditional_variance":
        res = exp.run_conditional_variance(seq, entry.get("pairings", 2000),
                                           replica_rng(defaults["seed"], 1))
        return {"estimate": res.estimate, "prediction": res.prediction,
                "corrected_reference": res.corrected_reference,
                "ratio": res.ratio, "pairings": res.pairings}, None
    if kind == "edge_probability":
        res = exp.check_edge_probability(seq, entry.get("pairs", 100),
                                         entry.get("pairings", 2000),
                                         replica_rng(defaults["seed"], 1))
        return {"p95_deviation": res.percentile(95),
                "weighted_mean_deviation": res.weighted_mean_deviation(),
                "hub_deviation": res.hub_deviation,
                "hub_pair": list(res.hub_pair)}, None
    raise ValueError(f"unknown experiment type '{kind}'")


def cmd_experiment(args) -> int:
    try:
        with open(args.config) as fh:
            config = json.load(fh)
    except (OSError, json.JSONDecodeError) as e:
        print(f"error reading config: {e}", file=sys.stderr)
        return 2
    problems = validate_config(config)
    if problems:
        print("config schema violations:", file=sys.stderr)
        for p in problems:
            print(f"  {p}", file=sys.stderr)
        return 2
    if os.environ.get("NULLMODELS_SEED"):
        config["seed"] = int(os.environ["NULLMODELS_SEED"])
    threads = args.threads or config.get("threads", 1)
    out_dir = args.out or "."
    os.makedirs(out_dir, exist_ok=True)
    cfg_hash = canonical_config_hash(config)

    t0 = time.time()
    summaries = {}
    failures = []
    for entry in config.get("experiments", []):
        summary, records = _run_experiment_entry(entry, config, threads)
        summary["config_hash"] = cfg_hash
        summaries[entry["name"]] = summary
        failures.extend(_check_assertions(entry, summary))
        path = os.path.join(out_dir, f"{entry['name']}.json")
        with open(path, "w") as fh:
            fh.write(_dump(summary))
        if records is not None:
            with open(os.path.join(out_dir, f"{entry['name']}.jsonl"), "w") as fh:
                fh.write(json.dumps({"config_hash": cfg_hash,
                                     "experiment": entry["name"]},
                                    sort_keys=True) + "\n")
                for rec in records:
                    fh.write(json.dumps(rec, sort_keys=True) + "\n")

    summary_path = os.path.join(out_dir, "summary.json")
    with open(summary_path, "w") as fh:
        fh.write(_dump({"config_hash": cfg_hash, "experiments": summaries,
                        "failed_assertions": failures}))
    _write_slope_csv(summaries, os.path.join(out_dir, "slopes.csv"))
    _write_quantile_csv(summaries, os.path.join(out_dir, "quantiles.csv"))
    manifest = {
        "config_hash": cfg_hash,
        "master_seed": config["seed"],
        "artifact_version": __version__,
        "wall_clock_seconds": round(time.time() - t0, 3),
        "outputs": {name: os.path.join(out_dir, f"{name}.json") for name in summaries},
        "summary": summary_path,
    }
    with open(os.path.join(out_dir, "manifest.json"), "w") as fh:
        fh.write(_dump(manifest))
    if failures:
        for f in failures:
            print(f"ASSERTION FAILED {f}", file=sys.stderr)
        return 1
    return 0


def _write_quantile_csv(summaries: dict, path: str):
    rows = ["experiment,percentile,empirical,limit"]
    for name, s in sorted(summaries.items()):
        for q, pair in sorted(s.get("quantiles", {}).items(), key=lambda kv: int(kv[0])):
            rows.append(f"{name},{q},{pair[0]!r},{pair[1]!r}")
    if len(rows) > 1:
        with open(path, "w") as fh:
            fh.write("\n".join(rows) + "\n")


def _write_slope_csv(summaries: dict, path: str):
    rows = ["experiment,statistic,slope,slope_stderr"]
    for name, s in sorted(summaries.items()):
        if "slope" in s:
            rows.append(f"{name},{s.get('statistic','')},{s['slope']!r},{s['slope_stderr']!r}")
        else:
            for sub, inner in sorted(s.items()):
                if isinstance(inner, dict) and "slope" in inner:
                    rows.append(f"{name}.{sub},{inner.get('statistic','')},"
                                f"{inner['slope']!r},{inner['slope_stderr']!r}")
    with open(path, "w") as fh:
        fh.write("\n".join(rows) + "\n")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="nullmodels",
                                 description="heavy-tailed random-graph null models")
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="sample a graph and write an edge list")
    g.add_argument("--model", required=True, choices=["cm", "ecm", "irg"])
    g.add_argument("--gamma", type=float, required=True,
                   help="tail exponent, must lie in (1, 2)")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--kernel", default="poisson",
                   choices=["chung_lu", "poisson", "max_entropy"])
    g.add_argument("--out", required=True)
    g.set_defaults(func=cmd_generate)

    s = sub.add_parser("stats", help="statistics of an edge-list file as JSON")
    s.add_argument("graph")
    s.set_defaults(func=cmd_stats)

    e = sub.add_parser("experiment", help="run experiments from a JSON config")
    e.add_argument("--config", required=True)
    e.add_argument("--out", default=None, help="output directory")
    e.add_argument("--threads", type=int, default=None)
    e.set_defaults(func=cmd_experiment)

    i = sub.add_parser("integrate", help="kernel triple integral as JSON")
    i.add_argument("--gamma", type=float, required=True)
    i.add_argument("--kernel", default="poisson",
                   choices=["chung_lu", "poisson", "max_entropy"])
    i.add_argument("--epsilon", type=float, default=0.0,
                   help="truncation: integrate over [eps, 1/eps]^3; 0 = full range")
    i.add_argument("--tolerance", type=float, default=1e-4)
    i.set_defaults(func=cmd_integrate)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        # argparse exits 2 on usage errors already
        return int(e.code or 0)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
