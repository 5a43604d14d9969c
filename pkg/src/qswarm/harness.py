"""Experiment harness: seeded run grids, summaries, and file output.

An experiment is a grid over jump-law parameters q and width amplitudes A,
with a fixed number of independent runs per cell.  Each run's seed is
derived from (base_seed, q index, amplitude index, run index), so adding
rows or columns to a grid never changes the runs of existing cells, and
any single run can be reproduced in isolation.

Outputs are deterministic: runs are reported sorted by (q, A, run index),
floats are serialized with repr (exact round-trip), and the only fields
that vary between identical invocations are wall-clock timings.  A
self-audit (audit_result) re-derives every cell summary from the run rows
and checks seeds, ordering, and grid accounting.

Summary semantics:
  failure_rate_pct  share of runs (in %) whose best score exceeds the
                    objective's known minimum by more than epsilon
  mean_iter_ms      mean over runs of wall_ms / iterations (per-iteration
                    cost; runs that stop before the first sweep count with
                    their full wall time)
  cpu_ratio_vs_q1   cell mean_wall_ms divided by that of the q=1 cell with
                    the same amplitude (None when there is no q=1 cell)
  iter_ratio_vs_q1  same ratio for mean_iter_ms
"""

from __future__ import annotations

import dataclasses
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .benchmarks import make_objective, objective_names
from .optimizer import SwarmConfig, run
from .rng import derive_seed

RUNS_CSV_FIELDS = (
    "run_id",
    "q",
    "a",
    "dim",
    "particles",
    "seed",
    "iterations",
    "best_score",
    "success",
    "termination",
    "wall_ms",
)

SUMMARY_CSV_FIELDS = (
    "q",
    "a",
    "runs",
    "failure_rate_pct",
    "mean_iterations",
    "mean_best_score",
    "mean_wall_ms",
    "cpu_ratio_vs_q1",
)

DIVERSITY_CSV_FIELDS = ("iteration", "q", "mean_diversity")

# columns whose values may differ between otherwise identical invocations
TIMING_COLUMNS = frozenset(
    {"wall_ms", "mean_wall_ms", "cpu_ratio_vs_q1", "mean_iter_ms", "iter_ratio_vs_q1"}
)


def q_critical(dim: int) -> float:
    """Largest q keeping the jump-length variance finite in dim dimensions,
    1 + 1/sqrt(dim)."""
    if dim < 1:
        raise ValueError(f"dim must be >= 1, got {dim}")
    return 1.0 + 1.0 / math.sqrt(dim)


@dataclass(frozen=True)
class ExperimentSpec:
    """A full experiment grid; validated and normalized at construction.

    q_values and amplitudes are sorted ascending and deduplicated, which
    fixes the (q, A, run) ordering of every output.
    """

    objective: str = "rastrigin"
    dim: int = 2
    particles: int = 20
    q_values: tuple[float, ...] = (1.0, 1.32)
    amplitudes: tuple[float, ...] = (0.2,)
    runs: int = 100
    base_seed: int = 20260825
    epsilon: float = 1e-4
    p0: float = 0.75
    g: float = 0.5
    omega: float = 0.1
    diversity_tol: float = 1e-5
    max_iterations: int = 5000
    w_cap: float = 1.71
    attractor_r_mode: str = "per_particle"
    bounds_mode: str = "free"
    backend: str = "auto"
    threads: int = 1

    def __post_init__(self):
        if self.objective not in objective_names():
            known = ", ".join(sorted(objective_names()))
            raise ValueError(
                f"unknown objective {self.objective!r}; expected one of: {known}"
            )
        if self.runs < 1:
            raise ValueError(f"runs must be >= 1, got {self.runs}")
        if self.epsilon <= 0.0:
            raise ValueError(f"epsilon must be positive, got {self.epsilon}")
        if self.threads < 1:
            raise ValueError(f"threads must be >= 1, got {self.threads}")
        if not self.q_values:
            raise ValueError("q_values must not be empty")
        if not self.amplitudes:
            raise ValueError("amplitudes must not be empty")
        object.__setattr__(
            self, "q_values", tuple(sorted(set(float(q) for q in self.q_values)))
        )
        object.__setattr__(
            self, "amplitudes", tuple(sorted(set(float(a) for a in self.amplitudes)))
        )
        # fail fast on invalid swarm parameters (q range, p0 range, ...)
        for q in self.q_values:
            self.swarm_config(q, self.amplitudes[0])

    def swarm_config(self, q: float, amplitude: float) -> SwarmConfig:
        return SwarmConfig(
            q=q,
            particles=self.particles,
            amplitude=amplitude,
            p0=self.p0,
            g=self.g,
            omega=self.omega,
            diversity_tol=self.diversity_tol,
            max_iterations=self.max_iterations,
            w_cap=self.w_cap,
            attractor_r_mode=self.attractor_r_mode,
            bounds_mode=self.bounds_mode,
        )

    def cell_count(self) -> int:
        return len(self.q_values) * len(self.amplitudes)


@dataclass
class RunRow:
    """Slim record of one run inside an experiment grid."""

    run_id: int
    q: float
    amplitude: float
    seed: int
    iterations: int
    best_score: float
    success: bool
    termination: str
    wall_ms: float


@dataclass
class CellSummary:
    """Aggregates over the runs of one (q, amplitude) cell."""

    q: float
    amplitude: float
    runs: int
    failures: int
    failure_rate_pct: float
    mean_iterations: float
    mean_best_score: float
    mean_wall_ms: float
    mean_iter_ms: float
    cpu_ratio_vs_q1: float | None = None
    iter_ratio_vs_q1: float | None = None


@dataclass
class ExperimentResult:
    spec: ExperimentSpec
    rows: list[RunRow]
    cells: list[CellSummary]
    # q -> per-iteration mean diversity (only when traces were kept)
    diversity: dict[float, np.ndarray] | None = None

    def cell(self, q: float, amplitude: float) -> CellSummary:
        for c in self.cells:
            if c.q == q and c.amplitude == amplitude:
                return c
        raise KeyError(f"no cell for q={q}, amplitude={amplitude}")


# ---------------------------------------------------------------------------
# execution
# ---------------------------------------------------------------------------

_WORKER_SPEC: ExperimentSpec | None = None
_WORKER_CACHE: dict | None = None


def _pool_init(spec: ExperimentSpec) -> None:
    global _WORKER_SPEC, _WORKER_CACHE
    _WORKER_SPEC = spec
    _WORKER_CACHE = {}


def _run_one(task, spec: ExperimentSpec | None = None, cache: dict | None = None):
    """Execute one grid cell run; used directly and by pool workers."""
    if spec is None:
        spec = _WORKER_SPEC
        cache = _WORKER_CACHE
    qi, ai, ri, keep_trace = task
    key = (qi, ai)
    if key not in cache:
        cache[key] = (
            make_objective(spec.objective, spec.dim),
            spec.swarm_config(spec.q_values[qi], spec.amplitudes[ai]),
        )
    objective, config = cache[key]
    seed = derive_seed(spec.base_seed, qi, ai, ri)
    start = time.perf_counter()
    record = run(objective, config, seed, backend=spec.backend)
    wall_ms = (time.perf_counter() - start) * 1e3
    trace = record.diversity_trace if keep_trace else None
    return (
        qi,
        ai,
        ri,
        seed,
        record.iterations,
        record.best_score,
        record.termination,
        wall_ms,
        trace,
    )


def execute(spec: ExperimentSpec, keep_traces: bool = False) -> ExperimentResult:
    """Run the full grid and aggregate summaries.

    With threads > 1 the runs are distributed over worker processes; the
    result is independent of the worker count except for wall timings.
    """
    tasks = [
        (qi, ai, ri, keep_traces)
        for qi in range(len(spec.q_values))
        for ai in range(len(spec.amplitudes))
        for ri in range(spec.runs)
    ]
    if spec.threads > 1:
        with ProcessPoolExecutor(
            max_workers=spec.threads, initializer=_pool_init, initargs=(spec,)
        ) as pool:
            chunk = max(1, len(tasks) // (spec.threads * 8))
            raw = list(pool.map(_run_one, tasks, chunksize=chunk))
        raw.sort(key=lambda item: (item[0], item[1], item[2]))
    else:
        cache: dict = {}
        raw = [_run_one(task, spec, cache) for task in tasks]

    minimum = make_objective(spec.objective, spec.dim).minimum_value
    threshold = minimum + spec.epsilon
    rows = []
    traces: dict[float, list[np.ndarray]] = {q: [] for q in spec.q_values}
    for qi, ai, ri, seed, iterations, best, termination, wall_ms, trace in raw:
        rows.append(
            RunRow(
                run_id=ri,
                q=spec.q_values[qi],
                amplitude=spec.amplitudes[ai],
                seed=seed,
                iterations=iterations,
                best_score=best,
                success=best <= threshold,
                termination=termination,
                wall_ms=wall_ms,
            )
        )
        if keep_traces and trace is not None:
            traces[spec.q_values[qi]].append(trace)

    cells = _summarize(spec, rows)
    diversity = _mean_traces(traces) if keep_traces else None
    return ExperimentResult(spec=spec, rows=rows, cells=cells, diversity=diversity)


def _summarize(spec: ExperimentSpec, rows: Sequence[RunRow]) -> list[CellSummary]:
    cells = []
    for q in spec.q_values:
        for a in spec.amplitudes:
            cell_rows = [r for r in rows if r.q == q and r.amplitude == a]
            n = len(cell_rows)
            failures = 0
            iter_sum = 0
            best_sum = 0.0
            wall_sum = 0.0
            iter_ms_sum = 0.0
            for r in cell_rows:
                if not r.success:
                    failures += 1
                iter_sum += r.iterations
                best_sum += r.best_score
                wall_sum += r.wall_ms
                iter_ms_sum += r.wall_ms / max(r.iterations, 1)
            cells.append(
                CellSummary(
                    q=q,
                    amplitude=a,
                    runs=n,
                    failures=failures,
                    failure_rate_pct=100.0 * failures / n,
                    mean_iterations=iter_sum / n,
                    mean_best_score=best_sum / n,
                    mean_wall_ms=wall_sum / n,
                    mean_iter_ms=iter_ms_sum / n,
                )
            )
    if 1.0 in spec.q_values:
        base = {c.amplitude: c for c in cells if c.q == 1.0}
        for c in cells:
            ref = base[c.amplitude]
            if ref.mean_wall_ms > 0.0:
                c.cpu_ratio_vs_q1 = c.mean_wall_ms / ref.mean_wall_ms
            if ref.mean_iter_ms > 0.0:
                c.iter_ratio_vs_q1 = c.mean_iter_ms / ref.mean_iter_ms
    return cells


def _mean_traces(traces: dict[float, list[np.ndarray]]) -> dict[float, np.ndarray]:
    """Per-iteration mean diversity per q.

    Runs stop at different iterations; shorter traces are padded with
    their final value (the diversity a converged swarm would keep), so
    the mean at iteration t always averages exactly len(runs) values.
    """
    out = {}
    for q, qtraces in traces.items():
        if not qtraces:
            continue
        longest = max(len(tr) for tr in qtraces)
        acc = np.zeros(longest, dtype=np.float64)
        for tr in qtraces:
            padded = np.concatenate(
                [tr, np.full(longest - len(tr), tr[-1], dtype=np.float64)]
            )
            acc += padded
        out[q] = acc / len(qtraces)
    return out


# ---------------------------------------------------------------------------
# experiment entry points
# ---------------------------------------------------------------------------


def run_experiment(spec: ExperimentSpec) -> ExperimentResult:
    """Generic failure-rate / amplitude-sweep grid."""
    return execute(spec, keep_traces=False)


def run_diversity_trace(spec: ExperimentSpec) -> ExperimentResult:
    """Grid with per-iteration mean diversity traces; single amplitude."""
    if len(spec.amplitudes) != 1:
        raise ValueError(
            f"diversity traces require exactly one amplitude, got "
            f"{len(spec.amplitudes)}"
        )
    return execute(spec, keep_traces=True)


def run_cpu_bench(spec: ExperimentSpec) -> ExperimentResult:
    """Timing comparison grid; requires q = 1 as the ratio baseline."""
    if 1.0 not in spec.q_values:
        raise ValueError("cpu benchmarks need q=1.0 in q_values as the baseline")
    return execute(spec, keep_traces=False)


# ---------------------------------------------------------------------------
# audit
# ---------------------------------------------------------------------------


def audit_result(result: ExperimentResult) -> list[str]:
    """Re-derive all accounting from the run rows; return problems found.

    An empty list means the result is internally consistent: the row count
    matches the grid, rows are sorted by (q, A, run_id) with contiguous
    ids, every seed matches its (base_seed, q index, A index, run index)
    derivation, and each cell summary equals an independent naive
    recomputation from its rows (timings excluded).
    """
    spec = result.spec
    problems = []
    expected = spec.cell_count() * spec.runs
    if len(result.rows) != expected:
        problems.append(f"row count {len(result.rows)} != grid size {expected}")

    key = [(r.q, r.amplitude, r.run_id) for r in result.rows]
    if key != sorted(key):
        problems.append("rows are not sorted by (q, amplitude, run_id)")

    minimum = make_objective(spec.objective, spec.dim).minimum_value
    threshold = minimum + spec.epsilon
    pos = 0
    for qi, q in enumerate(spec.q_values):
        for ai, a in enumerate(spec.amplitudes):
            cell_rows = result.rows[pos : pos + spec.runs]
            pos += spec.runs
            for ri, row in enumerate(cell_rows):
                if (row.q, row.amplitude, row.run_id) != (q, a, ri):
                    problems.append(
                        f"row at position {pos - spec.runs + ri} is "
                        f"({row.q}, {row.amplitude}, {row.run_id}), "
                        f"expected ({q}, {a}, {ri})"
                    )
                    continue
                if row.seed != derive_seed(spec.base_seed, qi, ai, ri):
                    problems.append(
                        f"seed mismatch for cell q={q} a={a} run {ri}"
                    )
                if row.success != (row.best_score <= threshold):
                    problems.append(
                        f"success flag inconsistent for q={q} a={a} run {ri}"
                    )
            try:
                cell = result.cell(q, a)
            except KeyError:
                problems.append(f"missing summary cell for q={q} a={a}")
                continue
            failures = 0
            iter_sum = 0
            best_sum = 0.0
            for row in cell_rows:
                if not row.success:
                    failures += 1
                iter_sum += row.iterations
                best_sum += row.best_score
            if cell.runs != len(cell_rows):
                problems.append(f"cell q={q} a={a}: runs {cell.runs}")
            if cell.failures != failures:
                problems.append(
                    f"cell q={q} a={a}: failures {cell.failures} != {failures}"
                )
            if cell.failure_rate_pct != 100.0 * failures / len(cell_rows):
                problems.append(f"cell q={q} a={a}: failure rate mismatch")
            if cell.mean_iterations != iter_sum / len(cell_rows):
                problems.append(f"cell q={q} a={a}: mean iterations mismatch")
            if cell.mean_best_score != best_sum / len(cell_rows):
                problems.append(f"cell q={q} a={a}: mean best score mismatch")
    return problems


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------


def _metadata_lines(spec: ExperimentSpec) -> list[str]:
    fields = dataclasses.asdict(spec)
    parts = [f"{name}={fields[name]!r}" for name in fields]
    return ["# qswarm experiment", "# " + " ".join(parts)]


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def runs_csv_text(result: ExperimentResult) -> str:
    """Per-run rows; wall_ms (%.3f) is the only non-deterministic column."""
    lines = _metadata_lines(result.spec)
    lines.append(",".join(RUNS_CSV_FIELDS))
    for r in result.rows:
        lines.append(
            ",".join(
                (
                    str(r.run_id),
                    repr(r.q),
                    repr(r.amplitude),
                    str(result.spec.dim),
                    str(result.spec.particles),
                    str(r.seed),
                    str(r.iterations),
                    repr(r.best_score),
                    _fmt(r.success),
                    r.termination,
                    f"{r.wall_ms:.3f}",
                )
            )
        )
    return "\n".join(lines) + "\n"


def summary_csv_text(result: ExperimentResult) -> str:
    """Per-cell summary; the last two columns are timing-derived."""
    lines = _metadata_lines(result.spec)
    lines.append(",".join(SUMMARY_CSV_FIELDS))
    for c in result.cells:
        lines.append(
            ",".join(
                (
                    repr(c.q),
                    repr(c.amplitude),
                    str(c.runs),
                    repr(c.failure_rate_pct),
                    repr(c.mean_iterations),
                    repr(c.mean_best_score),
                    f"{c.mean_wall_ms:.3f}",
                    _fmt(c.cpu_ratio_vs_q1),
                )
            )
        )
    return "\n".join(lines) + "\n"


def diversity_csv_text(result: ExperimentResult) -> str:
    if result.diversity is None:
        raise ValueError("result holds no diversity traces")
    lines = _metadata_lines(result.spec)
    lines.append(",".join(DIVERSITY_CSV_FIELDS))
    for q in sorted(result.diversity):
        trace = result.diversity[q]
        for i, value in enumerate(trace):
            lines.append(f"{i},{q!r},{float(value)!r}")
    return "\n".join(lines) + "\n"


def summary_json_text(result: ExperimentResult) -> str:
    """Full result as JSON, including the timing-derived fields."""
    payload = {
        "spec": dataclasses.asdict(result.spec),
        "cells": [dataclasses.asdict(c) for c in result.cells],
    }
    if result.diversity is not None:
        payload["diversity"] = {
            repr(q): [float(v) for v in trace]
            for q, trace in sorted(result.diversity.items())
        }
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def write_text(path, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def strip_timing_columns(csv_text: str) -> str:
    """Drop timing-derived columns from harness CSV text.

    Two otherwise identical invocations must agree byte-for-byte after
    this transformation.
    """
    out = []
    keep: list[int] | None = None
    for line in csv_text.splitlines():
        if line.startswith("#"):
            out.append(line)
            continue
        parts = line.split(",")
        if keep is None:
            keep = [i for i, name in enumerate(parts) if name not in TIMING_COLUMNS]
        out.append(",".join(parts[i] for i in keep))
    return "\n".join(out) + "\n"
