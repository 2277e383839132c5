"""Command-line interface.

Subcommands: reach, experiment1, experiment2, verify, compare,
emit-plot-data.  All runs are deterministic given config and seed; on
failure a machine-readable error JSON is printed to stderr and the exit
code is nonzero.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import serialize
from .harness import (DEFAULT_PANELS, ExperimentConfig, benchmark_config,
                      compare_widths, execute_run, result_projection_rows,
                      run_experiment_1, run_experiment_2, verify_run)


def _load_cfg(args, experiment: int | None = None) -> ExperimentConfig:
    if getattr(args, "config", None):
        cfg = serialize.load_config(args.config)
    elif experiment is not None:
        cfg = benchmark_config(experiment)
    else:
        raise ValueError("--config is required for this subcommand")
    if args.seed is not None:
        cfg.seed = args.seed
    if getattr(args, "horizon", None) is not None:
        cfg.horizon = args.horizon
    if getattr(args, "density", None) is not None:
        cfg.samples_per_set = args.density
    return cfg


def _parse_panels(spec: str | None):
    if not spec:
        return DEFAULT_PANELS
    panels = []
    for part in spec.split(";"):
        i, j = (int(v) for v in part.split(","))
        panels.append((i, j))
    return tuple(panels)


def _emit_experiment(result, out: Path, stem: str, panels):
    rows = result_projection_rows(result, panels)
    serialize.write_projection_csv(out / f"{stem}_projections.csv", rows)
    serialize.write_json(out / f"{stem}_metadata.json",
                         dict(result.metadata, panels=[list(p) for p in panels],
                              samples_per_set=result.cfg.samples_per_set))


def cmd_reach(args) -> int:
    cfg = _load_cfg(args)
    from .harness import _seed, _slice_batch, generate_data
    total = cfg.offline_length + sum(cfg.online_lengths)
    data = generate_data(cfg, total, _seed(cfg.seed, 0))
    offline = _slice_batch(data, 0, cfg.offline_length)
    online, pos = {}, cfg.offline_length
    for i, length in enumerate(cfg.online_lengths):
        online[i + 1] = _slice_batch(data, pos, pos + length)
        pos += length
    run = execute_run(cfg, offline, online)
    out = Path(args.out)
    serialize.write_json(out / "reach_summary.json", {
        "seed": cfg.seed,
        "horizon": cfg.horizon,
        "generator_counts": run.metrics["generator_counts"],
        "refinement_steps": run.refinement_steps,
    })
    panels = _parse_panels(args.panels)
    labeled = [("X0", 0, run.reach_sets[0])] + [
        ("Rhat", k, run.reach_sets[k]) for k in range(1, len(run.reach_sets))]
    from .harness import projection_rows
    rows = projection_rows(labeled, panels, cfg.samples_per_set, cfg.seed)
    serialize.write_projection_csv(out / "reach_projections.csv", rows)
    print(json.dumps({"ok": True, "out": str(out)}))
    return 0


def cmd_experiment(args, which: int) -> int:
    cfg = _load_cfg(args, experiment=which)
    result = run_experiment_1(cfg) if which == 1 else run_experiment_2(cfg)
    out = Path(args.out)
    panels = _parse_panels(args.panels)
    _emit_experiment(result, out, f"experiment{which}", panels)
    if which == 2:
        rows = compare_widths(result.runs["Rhat"].reach_sets,
                              result.runs["Rbar"].reach_sets,
                              n_samples=min(cfg.samples_per_set, 1000),
                              seed=cfg.seed)
        serialize.write_widths_csv(out / "experiment2_widths.csv", rows)
    print(json.dumps({"ok": True, "out": str(out)}))
    return 0


def cmd_verify(args) -> int:
    cfg = _load_cfg(args, experiment=args.experiment)
    result = run_experiment_1(cfg) if args.experiment == 1 else run_experiment_2(cfg)
    run = result.runs["Rhat"]
    report = verify_run(run, cfg.system, cfg, trials=args.trials,
                        seed=None if args.seed is None else args.seed)
    out = Path(args.out)
    serialize.write_json(out / "verify_report.json", report.to_dict())
    print(json.dumps({"ok": bool(report.passed), "trials": report.trials}))
    return 0 if report.passed else 2


def cmd_compare(args) -> int:
    cfg = _load_cfg(args, experiment=2)
    result = run_experiment_2(cfg)
    rows = compare_widths(result.runs["Rhat"].reach_sets,
                          result.runs["Rbar"].reach_sets,
                          n_samples=args.width_samples, seed=cfg.seed)
    out = Path(args.out)
    serialize.write_widths_csv(out / "widths.csv", rows)
    better = sum(r["support_width_a"] <= r["support_width_b"] for r in rows)
    print(json.dumps({"ok": True, "cells": len(rows),
                      "refined_not_wider": better}))
    return 0


def cmd_emit_plot_data(args) -> int:
    cfg = _load_cfg(args, experiment=args.experiment)
    result = run_experiment_1(cfg) if args.experiment == 1 else run_experiment_2(cfg)
    panels = _parse_panels(args.panels)
    out = Path(args.out)
    _emit_experiment(result, out, f"experiment{args.experiment}", panels)
    print(json.dumps({"ok": True, "out": str(out)}))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ncreach",
        description="Data-driven non-convex reachability analysis")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, config_required=False):
        p.add_argument("--config", required=config_required,
                       help="JSON config file")
        p.add_argument("--out", default="out", help="output directory")
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--horizon", type=int, default=None)
        p.add_argument("--density", type=int, default=None,
                       help="sampled points per set for emission")
        p.add_argument("--panels", default=None,
                       help='projection panels, e.g. "1,2;3,4;4,5"')

    p = sub.add_parser("reach", help="run the reachability loop from a config")
    common(p, config_required=True)
    p.set_defaults(func=cmd_reach)

    for which in (1, 2):
        p = sub.add_parser(f"experiment{which}",
                           help=f"reproduce benchmark experiment {which}")
        common(p)
        p.set_defaults(func=lambda a, w=which: cmd_experiment(a, w))

    p = sub.add_parser("verify", help="Monte-Carlo exactness check")
    common(p)
    p.add_argument("--experiment", type=int, choices=(1, 2), default=1)
    p.add_argument("--trials", type=int, default=100)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("compare", help="width table refined vs one-shot")
    common(p)
    p.add_argument("--width-samples", type=int, default=1000)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("emit-plot-data", help="emit projection CSVs only")
    common(p)
    p.add_argument("--experiment", type=int, choices=(1, 2), default=1)
    p.set_defaults(func=cmd_emit_plot_data)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except Exception as exc:  # surface every failure as machine-readable JSON
        print(json.dumps({"error": {"type": type(exc).__name__,
                                    "message": str(exc)}}), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
