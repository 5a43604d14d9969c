"""Command-line interface for swarm optimization runs and experiment sweeps.

Six subcommands are available:

``run``
    A single optimization run; prints the best score, iteration count and
    termination reason.
``failure-sweep``
    Repeated runs per (q, amplitude) cell; reports the failure rate, i.e.
    the percentage of runs whose best score stays above ``epsilon``.
``a-sweep``
    Sweeps the width-schedule amplitude A and reports mean best scores.
``diversity-trace``
    Records the mean swarm-diversity trace per q over many runs.
``cpu-bench``
    Times runs at q=1 against a heavier-tailed q (default: the dimension's
    critical value 1 + 1/sqrt(d)) and reports per-iteration cost ratios.
``solve-y0``
    Solves the width-equation root y0 for given acceptance levels.

Option values resolve in precedence order: explicit command-line flag,
then the JSON object given via ``--config`` (keys mirror ExperimentSpec
field names, e.g. ``q_values``, ``base_seed``, ``max_iterations``), then
the subcommand default. ``--full-scale`` swaps the desk-scale defaults
for the full-size grids (thousands of runs per cell); explicit flags
still win over it.

``--out PREFIX`` writes ``PREFIX.runs.csv``, ``PREFIX.summary.csv``,
``PREFIX.json`` and, when traces were recorded, ``PREFIX.diversity.csv``.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from . import __version__
from .benchmarks import make_objective, objective_names
from .harness import (
    ExperimentSpec,
    audit_result,
    diversity_csv_text,
    q_critical,
    run_cpu_bench,
    run_diversity_trace,
    run_experiment,
    runs_csv_text,
    summary_csv_text,
    summary_json_text,
    write_text,
)
from .optimizer import SwarmConfig, run
from .qmath import solve_y0_q

# Canonical option keys are ExperimentSpec field names; these map the few
# CLI spellings that differ.
_CLI_TO_FIELD = {
    "q": "q_values",
    "amplitude": "amplitudes",
    "seed": "base_seed",
    "max_iter": "max_iterations",
}
_FIELD_TO_CLI = {field: cli for cli, field in _CLI_TO_FIELD.items()}

_COMMON_DEFAULTS = {
    "objective": "rastrigin",
    "dim": 2,
    "particles": 20,
    "q_values": [1.0],
    "amplitudes": [0.2],
    "runs": 100,
    "base_seed": 20260825,
    "epsilon": 1e-4,
    "p0": 0.75,
    "g": 0.5,
    "omega": 0.1,
    "max_iterations": 5000,
    "backend": "auto",
    "threads": 1,
}

# Full-size amplitude grids for --full-scale sweeps.
_FULL_FAILURE_AMPLITUDES = [
    0.01, 0.05, 0.10, 0.15, 0.20, 0.25, 0.30, 0.35, 0.40, 0.45,
]
_FULL_ASWEEP_AMPLITUDES = [
    0.01, 0.2, 0.4, 0.6, 0.8, 1.0, 1.2, 1.4, 1.6, 1.8, 2.0, 2.2,
]


def _grid_defaults(**overrides):
    merged = dict(_COMMON_DEFAULTS)
    merged.update(overrides)
    return merged


def _add_common_options(sub: argparse.ArgumentParser, *, grid: bool) -> None:
    sub.add_argument(
        "--objective", choices=objective_names(), help="benchmark function name"
    )
    sub.add_argument("--dim", type=int, help="search-space dimension")
    sub.add_argument("--particles", type=int, help="swarm size")
    sub.add_argument(
        "--q",
        action="append",
        type=float,
        help="entropic index; repeat the flag for a grid",
    )
    sub.add_argument(
        "--amplitude",
        action="append",
        type=float,
        help="width-schedule amplitude A; repeat the flag for a grid",
    )
    sub.add_argument("--p0", type=float, help="acceptance probability for y0")
    sub.add_argument("--g", type=float, help="base width factor")
    sub.add_argument("--omega", type=float, help="width-schedule frequency")
    sub.add_argument(
        "--epsilon", type=float, help="success threshold on the best score"
    )
    sub.add_argument("--max-iter", type=int, help="iteration cap per run")
    sub.add_argument("--seed", type=int, help="base seed for run-seed derivation")
    sub.add_argument(
        "--backend",
        choices=("auto", "compiled", "python"),
        help="engine selection",
    )
    sub.add_argument("--config", help="JSON file with default option values")
    sub.add_argument("--out", help="output path prefix for CSV/JSON files")
    sub.add_argument(
        "--json", action="store_true", help="print a JSON summary to stdout"
    )
    if grid:
        sub.add_argument("--runs", type=int, help="runs per (q, amplitude) cell")
        sub.add_argument("--threads", type=int, help="worker processes")
        sub.add_argument(
            "--full-scale",
            action="store_true",
            help="use full-size grids instead of desk-scale defaults",
        )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qswarm",
        description="Swarm optimization runs and experiment sweeps.",
    )
    parser.add_argument(
        "--version", action="version", version=f"%(prog)s {__version__}"
    )
    commands = parser.add_subparsers(dest="command", required=True)

    sub = commands.add_parser("run", help="single optimization run")
    _add_common_options(sub, grid=False)
    sub.set_defaults(
        handler=_handle_run,
        _defaults=_grid_defaults(),
        _full_overrides={},
    )

    sub = commands.add_parser(
        "failure-sweep", help="failure rate per (q, amplitude) cell"
    )
    _add_common_options(sub, grid=True)
    sub.set_defaults(
        handler=_handle_failure_sweep,
        _defaults=_grid_defaults(
            runs=500, q_values=[1.0, 1.072, 1.32, 1.625], amplitudes=[0.2]
        ),
        _full_overrides={
            "runs": 10000,
            "amplitudes": list(_FULL_FAILURE_AMPLITUDES),
        },
    )

    sub = commands.add_parser("a-sweep", help="amplitude sweep of mean best score")
    _add_common_options(sub, grid=True)
    sub.set_defaults(
        handler=_handle_a_sweep,
        _defaults=_grid_defaults(
            dim=5,
            particles=50,
            runs=200,
            q_values=[1.0, 1.32],
            amplitudes=[0.05, 0.5, 1.5],
        ),
        _full_overrides={
            "runs": 2000,
            "amplitudes": list(_FULL_ASWEEP_AMPLITUDES),
        },
    )

    sub = commands.add_parser(
        "diversity-trace", help="mean swarm-diversity trace per q"
    )
    _add_common_options(sub, grid=True)
    sub.set_defaults(
        handler=_handle_diversity,
        _defaults=_grid_defaults(
            dim=10, particles=50, runs=100, q_values=[1.0, 1.32], amplitudes=[0.2]
        ),
        _full_overrides={"runs": 1000},
    )

    sub = commands.add_parser(
        "cpu-bench", help="per-iteration cost of q=1 vs heavier tails"
    )
    _add_common_options(sub, grid=True)
    sub.set_defaults(
        handler=_handle_cpu_bench,
        _defaults=_grid_defaults(
            dim=5, particles=50, runs=50, q_values=None, amplitudes=[0.2]
        ),
        _full_overrides={"runs": 1000},
    )

    sub = commands.add_parser("solve-y0", help="width-equation root y0")
    sub.add_argument("--p0", type=float, help="acceptance probability")
    sub.add_argument(
        "--q",
        action="append",
        type=float,
        help="entropic index; repeat the flag for several roots",
    )
    sub.add_argument("--config", help="JSON file with default option values")
    sub.add_argument("--out", help="output path prefix for the JSON file")
    sub.add_argument(
        "--json", action="store_true", help="print a JSON payload to stdout"
    )
    sub.set_defaults(
        handler=_handle_solve_y0,
        _defaults={"p0": 0.75, "q_values": [1.0]},
        _full_overrides={},
    )

    return parser


def _resolve_options(args: argparse.Namespace) -> dict:
    """Merge CLI flags, --config values, and subcommand defaults."""
    defaults = dict(args._defaults)
    if getattr(args, "full_scale", False):
        defaults.update(args._full_overrides)
    config = {}
    if args.config is not None:
        config = json.loads(Path(args.config).read_text(encoding="utf-8"))
        if not isinstance(config, dict):
            raise ValueError("config file must contain a JSON object")
        unknown = sorted(set(config) - set(defaults))
        if unknown:
            raise ValueError(f"unknown config keys: {', '.join(unknown)}")
    merged = {}
    for field, fallback in defaults.items():
        value = getattr(args, _FIELD_TO_CLI.get(field, field), None)
        if value is None:
            value = config.get(field, fallback)
        merged[field] = value
    return merged


def _spec_from_options(merged: dict) -> ExperimentSpec:
    return ExperimentSpec(
        objective=merged["objective"],
        dim=int(merged["dim"]),
        particles=int(merged["particles"]),
        q_values=tuple(float(v) for v in merged["q_values"]),
        amplitudes=tuple(float(v) for v in merged["amplitudes"]),
        runs=int(merged["runs"]),
        base_seed=int(merged["base_seed"]),
        epsilon=float(merged["epsilon"]),
        p0=float(merged["p0"]),
        g=float(merged["g"]),
        omega=float(merged["omega"]),
        max_iterations=int(merged["max_iterations"]),
        backend=merged["backend"],
        threads=int(merged["threads"]),
    )


def _write_outputs(result, prefix: str) -> None:
    base = Path(prefix)
    if base.parent != Path("."):
        base.parent.mkdir(parents=True, exist_ok=True)
    outputs = [
        (base.with_name(base.name + ".runs.csv"), runs_csv_text(result)),
        (base.with_name(base.name + ".summary.csv"), summary_csv_text(result)),
        (base.with_name(base.name + ".json"), summary_json_text(result)),
    ]
    if result.diversity is not None:
        outputs.append(
            (base.with_name(base.name + ".diversity.csv"), diversity_csv_text(result))
        )
    for path, text in outputs:
        write_text(path, text)
        print(f"wrote {path}")


def _print_summary_table(result) -> None:
    print(
        f"{'q':>10} {'A':>8} {'runs':>6} {'fail%':>8} "
        f"{'mean_iter':>10} {'mean_best':>13} {'cpu_x_q1':>9}"
    )
    for cell in result.cells:
        ratio = (
            f"{cell.cpu_ratio_vs_q1:.3f}"
            if cell.cpu_ratio_vs_q1 is not None
            else "-"
        )
        print(
            f"{cell.q:>10g} {cell.amplitude:>8g} {cell.runs:>6d} "
            f"{cell.failure_rate_pct:>8.2f} {cell.mean_iterations:>10.1f} "
            f"{cell.mean_best_score:>13.6g} {ratio:>9}"
        )


def _single_value(merged: dict, field: str, label: str) -> float:
    values = merged[field]
    if len(values) != 1:
        raise ValueError(f"run takes a single --{label} value")
    return float(values[0])


def _handle_run(args: argparse.Namespace) -> int:
    merged = _resolve_options(args)
    q = _single_value(merged, "q_values", "q")
    amplitude = _single_value(merged, "amplitudes", "amplitude")
    objective = make_objective(merged["objective"], int(merged["dim"]))
    config = SwarmConfig(
        q=q,
        particles=int(merged["particles"]),
        amplitude=amplitude,
        p0=float(merged["p0"]),
        g=float(merged["g"]),
        omega=float(merged["omega"]),
        max_iterations=int(merged["max_iterations"]),
    )
    seed = int(merged["base_seed"])
    start = time.perf_counter()
    record = run(objective, config, seed=seed, backend=merged["backend"])
    wall_ms = (time.perf_counter() - start) * 1000.0
    success = record.best_score <= objective.minimum_value + float(merged["epsilon"])
    payload = {
        "objective": objective.name,
        "dim": objective.dim,
        "q": q,
        "amplitude": amplitude,
        "seed": seed,
        "backend": record.backend,
        "iterations": record.iterations,
        "termination": record.termination,
        "best_score": record.best_score,
        "best_position": [float(v) for v in record.best_position],
        "success": success,
        "wall_ms": round(wall_ms, 3),
    }
    if args.out is not None:
        base = Path(args.out)
        if base.parent != Path("."):
            base.parent.mkdir(parents=True, exist_ok=True)
        path = base.with_name(base.name + ".json")
        write_text(path, json.dumps(payload, indent=2, sort_keys=True) + "\n")
        print(f"wrote {path}")
    if args.json:
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        for key in (
            "objective",
            "dim",
            "q",
            "amplitude",
            "seed",
            "backend",
            "iterations",
            "termination",
            "best_score",
            "success",
        ):
            print(f"{key:<13} {payload[key]}")
        print(f"{'wall_ms':<13} {payload['wall_ms']:.3f}")
    return 0


def _run_grid(args: argparse.Namespace, runner, merged: dict) -> int:
    spec = _spec_from_options(merged)
    result = runner(spec)
    problems = audit_result(result)
    if problems:
        for problem in problems:
            print(f"audit: {problem}", file=sys.stderr)
        return 1
    if args.out is not None:
        _write_outputs(result, args.out)
    if args.json:
        print(summary_json_text(result))
    else:
        _print_summary_table(result)
    return 0


def _handle_failure_sweep(args: argparse.Namespace) -> int:
    return _run_grid(args, run_experiment, _resolve_options(args))


def _handle_a_sweep(args: argparse.Namespace) -> int:
    return _run_grid(args, run_experiment, _resolve_options(args))


def _handle_diversity(args: argparse.Namespace) -> int:
    return _run_grid(args, run_diversity_trace, _resolve_options(args))


def _handle_cpu_bench(args: argparse.Namespace) -> int:
    merged = _resolve_options(args)
    if merged["q_values"] is None:
        merged["q_values"] = [1.0, q_critical(int(merged["dim"]))]
    return _run_grid(args, run_cpu_bench, merged)


def _handle_solve_y0(args: argparse.Namespace) -> int:
    merged = _resolve_options(args)
    p0 = float(merged["p0"])
    roots = {}
    for q in merged["q_values"]:
        roots[repr(float(q))] = solve_y0_q(p0, float(q))
    payload = {"p0": p0, "roots": roots}
    if args.out is not None:
        base = Path(args.out)
        if base.parent != Path("."):
            base.parent.mkdir(parents=True, exist_ok=True)
        path = base.with_name(base.name + ".json")
        write_text(path, json.dumps(payload, indent=2, sort_keys=True) + "\n")
        print(f"wrote {path}")
    if args.json:
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        for q in merged["q_values"]:
            print(f"q={float(q)!r} p0={p0!r} y0={roots[repr(float(q))]!r}")
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
