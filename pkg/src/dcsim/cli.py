"""Command-line harness: run scenarios, sweep locations x controllers, and
serve the line-protocol session.

Exit codes: 0 success, 1 validation error, 2 runtime error, 3 partial sweep
failure. Machine-readable JSON is always emitted alongside CSV.
"""

import argparse
import concurrent.futures
import dataclasses
import json
import os
import sys

from .config import load_scenario
from .controllers import parse_controllers
from .errors import ConfigError, ConfigParseError, DataFormatError, \
    DataValidationError, DcsimError
from .metrics import METRIC_COLUMNS, metrics_csv_text, metrics_json_text, \
    normalize_table, ztable_csv_text, ztable_json_text
from .orchestrator import TRACE_COLUMNS, run_episode
from .session import serve

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_RUNTIME = 2
EXIT_PARTIAL = 3


def _fmt(v):
    return repr(float(v)) if isinstance(v, float) else str(v)


def trace_csv_text(records):
    lines = [",".join(TRACE_COLUMNS)]
    for r in records:
        lines.append(",".join(_fmt(getattr(r, c)) for c in TRACE_COLUMNS))
    return "\n".join(lines) + "\n"


def trace_jsonl_text(result, horizon):
    """Full per-step JSON lines: observations, actions, rewards, record."""
    lines = []
    for i, record in enumerate(result.records):
        lines.append(json.dumps({
            "t": record.t,
            "obs": result.observations[i],
            "actions": result.actions[i],
            "rewards": {
                "agent_ls": record.mixed_r_ls,
                "agent_dc": record.mixed_r_dc,
                "agent_bat": record.mixed_r_bat,
            },
            "done": i == horizon - 1,
            "info": record.to_dict(),
        }))
    return "\n".join(lines) + "\n"


def _apply_overrides(scenario, args):
    changes = {}
    if getattr(args, "horizon", None) is not None:
        changes["horizon_steps"] = args.horizon
    if getattr(args, "start_step", None) is not None:
        changes["start_step"] = args.start_step
    if getattr(args, "seed", None) is not None:
        changes["seed"] = args.seed
    if changes:
        scenario = dataclasses.replace(scenario, **changes)
        scenario.validate()
    return scenario


def cmd_run(args):
    if args.repeat < 1:
        raise ConfigError("run.repeat", "must be >= 1")
    scenario = _apply_overrides(load_scenario(args.config), args)
    controllers = parse_controllers(args.controllers, scenario.steps_per_hour)
    label = args.controllers or "ls=baseline,dc=g36,bat=ci3h"

    need_trace = args.trace or args.jsonl is not None
    outputs = None
    for _ in range(args.repeat):
        result = run_episode(scenario, controllers, record_trace=need_trace)
        current = {
            os.path.join(args.out, "metrics.csv"): metrics_csv_text([(label, result.metrics)]),
            os.path.join(args.out, "metrics.json"): metrics_json_text([(label, result.metrics)]),
        }
        if args.trace:
            current[os.path.join(args.out, "trace.csv")] = trace_csv_text(result.records)
        if args.jsonl is not None:
            current[args.jsonl] = trace_jsonl_text(result, scenario.horizon_steps)
        if outputs is not None and current != outputs:
            raise DcsimError("repeat runs diverged; determinism violated")
        outputs = current

    os.makedirs(args.out, exist_ok=True)
    for path, text in outputs.items():
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    m = result.metrics
    for col in METRIC_COLUMNS:
        print(f"{col}: {getattr(m, col)}")
    return EXIT_OK


def _sweep_cell(path, controllers_spec):
    scenario = load_scenario(path)
    controllers = parse_controllers(controllers_spec, scenario.steps_per_hour)
    result = run_episode(scenario, controllers)
    return result.metrics


def cmd_sweep(args):
    locations = []
    for entry in args.locations:
        name, sep, path = entry.partition("=")
        if not sep:
            print(f"error: malformed location '{entry}' (want name=path)",
                  file=sys.stderr)
            return EXIT_VALIDATION
        locations.append((name, path))
    controller_specs = args.controllers

    cells = list(dict.fromkeys(
        (loc, spec) for loc, _ in locations for spec in controller_specs))
    paths = dict(locations)
    rows, failures = [], []
    with concurrent.futures.ThreadPoolExecutor(max_workers=args.jobs) as pool:
        futs = {
            pool.submit(_sweep_cell, paths[loc], spec): (loc, spec)
            for loc, spec in cells
        }
        results = {}
        for fut in futs:
            loc, spec = futs[fut]
            try:
                results[(loc, spec)] = fut.result()
            except Exception as exc:
                failures.append({"location": loc, "controllers": spec,
                                 "error": f"{type(exc).__name__}: {exc}"})
    for loc, spec in cells:  # deterministic row order
        if (loc, spec) in results:
            rows.append((f"{loc}:{spec}", results[(loc, spec)]))

    os.makedirs(args.out, exist_ok=True)
    with open(os.path.join(args.out, "sweep_metrics.csv"), "w", encoding="utf-8") as fh:
        fh.write(metrics_csv_text(rows))
    with open(os.path.join(args.out, "sweep_metrics.json"), "w", encoding="utf-8") as fh:
        fh.write(metrics_json_text(rows))
    if len(rows) >= 2:
        table = normalize_table(dict(rows))
        with open(os.path.join(args.out, "sweep_ztable.csv"), "w", encoding="utf-8") as fh:
            fh.write(ztable_csv_text(table))
        with open(os.path.join(args.out, "sweep_ztable.json"), "w", encoding="utf-8") as fh:
            fh.write(ztable_json_text(table))
    if failures:
        with open(os.path.join(args.out, "sweep_failures.json"), "w", encoding="utf-8") as fh:
            fh.write(json.dumps(failures, indent=2) + "\n")
        for f in failures:
            print(f"failed: {f['location']} x {f['controllers']}: {f['error']}",
                  file=sys.stderr)
        return EXIT_PARTIAL
    print(f"{len(rows)} sweep cells completed")
    return EXIT_OK


def cmd_serve(args):
    return serve()


def build_parser():
    parser = argparse.ArgumentParser(
        prog="dcsim",
        description="Data-center workload/cooling/battery co-simulation harness",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one scenario episode")
    p_run.add_argument("--config", required=True, help="scenario JSON path")
    p_run.add_argument("--controllers", default=None,
                       help="e.g. ls=baseline,dc=g36,bat=ci3h")
    p_run.add_argument("--horizon", type=int, default=None)
    p_run.add_argument("--start-step", type=int, default=None, dest="start_step")
    p_run.add_argument("--out", default="out", help="output directory")
    p_run.add_argument("--seed", type=int, default=None)
    p_run.add_argument("--trace", action="store_true", help="write trace.csv")
    p_run.add_argument("--jsonl", default=None,
                       help="write a full per-step JSONL trace to this path")
    p_run.add_argument("--repeat", type=int, default=1,
                       help="re-run and verify byte-identical outputs")
    p_run.set_defaults(func=cmd_run)

    p_sweep = sub.add_parser("sweep", help="locations x controllers comparison")
    p_sweep.add_argument("--locations", nargs="+", required=True,
                         help="name=scenario.json entries")
    p_sweep.add_argument("--controllers", nargs="+", required=True,
                         help="one or more controller selection strings")
    p_sweep.add_argument("--out", default="out")
    p_sweep.add_argument("--jobs", type=int, default=1)
    p_sweep.set_defaults(func=cmd_sweep)

    p_serve = sub.add_parser("serve", help="line-delimited JSON session on stdio")
    p_serve.set_defaults(func=cmd_serve)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, ConfigParseError, DataFormatError, DataValidationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except DcsimError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except Exception as exc:
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
