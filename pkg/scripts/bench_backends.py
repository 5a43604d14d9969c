"""Timing comparison between the compiled and pure-Python swarm engines.

Runs the same seeded workload through both engines, verifies that every
output (scores, traces, final positions) is bit-identical, and prints a
small table with per-run and per-iteration times plus the speedup.

Usage:
    python3 scripts/bench_backends.py [--objective rastrigin] [--dim 5]
        [--particles 30] [--q 1.32] [--amplitude 0.2] [--max-iter 300]
        [--repeats 5] [--seed 1234]
"""

import argparse
import sys
import time

import numpy as np

from qswarm import compiled_available, derive_seed, make_objective, run
from qswarm.benchmarks import objective_names
from qswarm.optimizer import SwarmConfig


def time_backend(backend, objective, config, seeds):
    records = []
    walls = []
    for seed in seeds:
        start = time.perf_counter()
        record = run(objective, config, seed=seed, backend=backend)
        walls.append(time.perf_counter() - start)
        records.append(record)
    return records, walls


def identical(a, b):
    return (
        a.best_score == b.best_score
        and a.iterations == b.iterations
        and a.termination == b.termination
        and np.array_equal(a.best_position, b.best_position)
        and np.array_equal(a.gbest_trace, b.gbest_trace)
        and np.array_equal(a.diversity_trace, b.diversity_trace)
        and np.array_equal(a.final_positions, b.final_positions)
    )


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--objective", default="rastrigin", choices=objective_names())
    parser.add_argument("--dim", type=int, default=5)
    parser.add_argument("--particles", type=int, default=30)
    parser.add_argument("--q", type=float, default=1.32)
    parser.add_argument("--amplitude", type=float, default=0.2)
    parser.add_argument("--max-iter", type=int, default=300)
    parser.add_argument("--repeats", type=int, default=5)
    parser.add_argument("--seed", type=int, default=1234)
    args = parser.parse_args(argv)

    if not compiled_available():
        print("compiled engine not available; nothing to compare", file=sys.stderr)
        return 1

    objective = make_objective(args.objective, args.dim)
    config = SwarmConfig(
        q=args.q,
        particles=args.particles,
        amplitude=args.amplitude,
        max_iterations=args.max_iter,
    )
    seeds = [derive_seed(args.seed, i) for i in range(args.repeats)]

    print(
        f"workload: {args.objective} d={args.dim} particles={args.particles} "
        f"q={args.q} A={args.amplitude} max_iter={args.max_iter} "
        f"repeats={args.repeats}"
    )

    results = {}
    for backend in ("python", "compiled"):
        records, walls = time_backend(backend, objective, config, seeds)
        results[backend] = (records, walls)

    py_records, py_walls = results["python"]
    c_records, c_walls = results["compiled"]
    mismatches = [
        i for i, (a, b) in enumerate(zip(py_records, c_records)) if not identical(a, b)
    ]

    print(f"{'engine':<10} {'total s':>9} {'per-run ms':>11} {'per-iter us':>12}")
    for backend, (records, walls) in results.items():
        total = sum(walls)
        iters = sum(max(r.iterations, 1) for r in records)
        print(
            f"{backend:<10} {total:>9.3f} {1000.0 * total / len(walls):>11.2f} "
            f"{1e6 * total / iters:>12.2f}"
        )
    print(f"speedup: {sum(py_walls) / sum(c_walls):.1f}x")

    if mismatches:
        print(f"output mismatch on repeats: {mismatches}", file=sys.stderr)
        return 1
    print("outputs bit-identical across engines")
    return 0


if __name__ == "__main__":
    sys.exit(main())
