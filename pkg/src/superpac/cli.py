"""Command-line entry points: batch clustering runs, the theory harnesses,
label-file evaluation, and the labeling server."""
from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import active, affinity, datasets, evaluation, theory

STRATEGIES = ("superpac", "superpac-s", "random", "explore-only")


class ConfigError(Exception):
    """Bad run configuration (exit code 2)."""


class DataError(Exception):
    """Unreadable or inconsistent input data (exit code 3)."""


def _load_config(args) -> dict:
    config = {}
    if args.config:
        try:
            with open(args.config) as f:
                config = json.load(f)
        except OSError as e:
            raise ConfigError(f"cannot read config {args.config}: {e}")
        except json.JSONDecodeError as e:
            raise ConfigError(f"config {args.config} is not valid JSON: {e}")
    # flags win over config-file values
    for key in ("seed", "strategy", "budget", "affinity", "out", "preset"):
        v = getattr(args, key, None)
        if v is not None:
            config[key] = v
    return config


def load_dataset(config) -> datasets.DataMatrix:
    ds = config.get("dataset")
    if not isinstance(ds, dict):
        raise ConfigError("config needs a 'dataset' object (manifest or synthetic)")
    if "synthetic" in ds:
        spec_dict = dict(ds["synthetic"])
        if "seed" not in spec_dict and "seed" in config:
            spec_dict["seed"] = config["seed"]
        mac = spec_dict.get("min_angle_control")
        if mac is not None:
            spec_dict["min_angle_control"] = tuple(mac)
        try:
            spec = datasets.SyntheticSpec(**spec_dict)
            X, _ = datasets.generate_uos(spec)
        except (TypeError, ValueError) as e:
            raise ConfigError(f"bad synthetic spec: {e}")
        return X
    if "manifest" in ds:
        try:
            return datasets.load_manifest(ds["manifest"])
        except OSError as e:
            raise DataError(f"cannot read dataset: {e}")
        except ValueError as e:
            raise DataError(str(e))
    raise ConfigError("dataset must specify 'synthetic' or 'manifest'")


def resolve_affinity(config, X, K) -> affinity.Affinity:
    source = config.get("affinity", "tsc")
    if source == "tsc":
        q = config.get("tsc_q") or affinity.default_tsc_q(X.n, K)
        return affinity.build_tsc(X, q)
    try:
        A = affinity.load_affinity(source)
    except OSError as e:
        raise DataError(f"cannot read affinity: {e}")
    except ValueError as e:
        raise DataError(str(e))
    if A.n != X.n:
        raise DataError(f"affinity is {A.n}x{A.n} but the dataset has N={X.n} points")
    return A


def run_active(config) -> dict:
    """Run one active clustering session; returns a report dict and writes
    trace.csv, final_labels.csv, report.json, query_log.jsonl to 'out'."""
    strategy = config.get("strategy", "superpac")
    if strategy not in STRATEGIES:
        raise ConfigError(
            f"unknown strategy {strategy!r}; choose from {', '.join(STRATEGIES)}"
        )
    out = config.get("out")
    if not out:
        raise ConfigError("config needs an output directory 'out'")
    seed = int(config.get("seed", 0))
    budget = config.get("budget")
    if budget is None:
        raise ConfigError("config needs a query budget 'budget'")
    budget = int(budget)
    if budget < 0:
        raise ConfigError("budget must be >= 0")

    X = load_dataset(config)
    if "preset" in config:
        p = datasets.preset(config["preset"])
        config.setdefault("d", p.d)
        config.setdefault("K", p.K[0])
    K = config.get("K")
    if K is None and "synthetic" in config.get("dataset", {}):
        K = config["dataset"]["synthetic"]["K"]
    if K is None:
        raise ConfigError("config needs the number of clusters 'K'")
    K = int(K)
    d = config.get("d")
    if d is None and "synthetic" in config.get("dataset", {}):
        d = config["dataset"]["synthetic"]["d"]
    if d is None:
        raise ConfigError("config needs the subspace dimension 'd'")
    d = int(d)

    if X.truth is None:
        raise ConfigError(
            "the simulated oracle needs ground-truth labels; provide a labels "
            "file in the manifest or use the interactive server"
        )
    oracle = active.SimulatedOracle(X.truth)
    A = resolve_affinity(config, X, K)

    log = None
    n_certain = None
    if strategy == "random":
        log = active.QueryLog()
        trace = active.random_baseline(X, K, A, budget, oracle, seed, d=d, log=log)
    elif strategy == "explore-only":
        A_norm = affinity.normalize_max2(A)
        from .spectral import spectral_clustering

        labeling = spectral_clustering(A_norm, K, seed)
        Z, qlog = active.uos_explore(X, K, d, A_norm, budget, oracle, seed,
                                     labeling=labeling)
        trace = active.RunTrace()
        err = evaluation.misclassification_rate(labeling, X.truth).misclassification_rate
        trace.append(qlog.count, labeling.labels, err,
                     active.ksubspaces_cost(X, labeling, d))
        log = qlog
        n_certain = Z.n_sets
    else:
        options = active.LoopOptions(smoothing=(strategy == "superpac-s"))
        captured = {}

        def observer(event, **state):
            if state.get("log") is not None:
                captured["log"] = state["log"]
            if state.get("Z") is not None:
                captured["Z"] = state["Z"]

        trace = active.active_clustering(X, K, d, A, budget, oracle, seed,
                                         options=options, observer=observer)
        log = captured.get("log")
        if captured.get("Z") is not None:
            n_certain = captured["Z"].n_sets

    out_dir = Path(out)
    out_dir.mkdir(parents=True, exist_ok=True)
    trace.to_csv(out_dir / "trace.csv")
    np.savetxt(out_dir / "final_labels.csv", trace.final_labels, fmt="%d")
    (log if log is not None else active.QueryLog()).save_jsonl(
        out_dir / "query_log.jsonl"
    )
    log = log if log is not None else active.QueryLog()
    final = trace.records[-1]
    report = {
        "strategy": strategy,
        "seed": seed,
        "budget": budget,
        "K": K,
        "d": d,
        "n_points": X.n,
        "queries_used": final.queries_used,
        "final_error": final.error,
        "final_cost": final.cost,
        "n_certain_sets": n_certain,
    }
    with open(out_dir / "report.json", "w") as f:
        json.dump(report, f, indent=2)
    return report


def cmd_active(args) -> int:
    config = _load_config(args)
    run_active(config)
    return 0


def cmd_theory(args) -> int:
    config = _load_config(args)
    out_dir = Path(config.get("out", "."))
    out_dir.mkdir(parents=True, exist_ok=True)
    seed = int(config.get("seed", 0))
    trials = int(config.get("trials", 1000))
    if args.kind == "thm1":
        d = int(config.get("d", 5))
        sweep = config.get("D_values", [d + 20, d + 50, d + 100, d + 195])
        summary = theory.run_margin_coverage(
            [int(D) for D in sweep], d,
            float(config.get("sigma", 0.05)),
            float(config.get("epsilon", 0.2)),
            trials, seed,
        )
    else:
        try:
            summary = theory.run_intersection_ordering(
                float(config.get("delta", 0.0)),
                float(config.get("tau", 1.5)),
                float(config.get("phi1", 0.0)),
                float(config.get("avg_sin2", 0.6)),
                float(config.get("sigma", 0.001)),
                int(config.get("D", 200)),
                int(config.get("d", 5)),
                trials, seed,
            )
        except ValueError as e:
            raise ConfigError(str(e))
    theory.save_summary(summary, out_dir / "summary.json", out_dir / "summary.csv")
    return 0


def cmd_eval(args) -> int:
    try:
        est = datasets.load_labels(args.labels)
        truth = datasets.load_labels(args.truth)
    except OSError as e:
        raise DataError(str(e))
    except ValueError as e:
        raise DataError(str(e))
    try:
        report = evaluation.misclassification_rate(est, truth)
    except ValueError as e:
        raise DataError(str(e))
    print(f"{report.misclassification_rate:.6f}")
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .server import create_app

    app = create_app(args.sessions_dir)
    host = os.environ.get("SUPERPAC_HOST", "127.0.0.1")
    port = int(os.environ.get("SUPERPAC_PORT", "8000"))
    uvicorn.run(app, host=host, port=port)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="superpac",
        description="Active pairwise-constrained subspace clustering",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--config", help="JSON config file; flags override it")
        p.add_argument("--seed", type=int)
        p.add_argument("--out", help="output directory")

    p = sub.add_parser("active", help="run an active clustering session")
    add_common(p)
    p.add_argument("--strategy", choices=STRATEGIES)
    p.add_argument("--budget", type=int)
    p.add_argument("--affinity", help="'tsc' or a path to an affinity file")
    p.add_argument("--preset", help="named dataset parameterization")
    p.set_defaults(func=cmd_active)

    p = sub.add_parser("theory", help="run a Monte Carlo theory harness")
    p.add_argument("kind", choices=["thm1", "cor1"])
    add_common(p)
    p.set_defaults(func=cmd_theory)

    p = sub.add_parser("eval", help="misclassification rate of a label file")
    p.add_argument("labels")
    p.add_argument("truth")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("serve", help="start the labeling HTTP server")
    p.add_argument("--sessions-dir", default="sessions")
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return 2
    except DataError as e:
        print(f"data error: {e}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
