"""Quantum-behaved swarm minimizer with Gaussian or q-Gaussian jumps.

The swarm keeps, per particle, its best visited position (local best);
the best of those is the global best.  Each sweep moves every particle to
a stochastic attractor point between its local best and the global best,
plus a jump whose length couples the distance to the mean-best position,
a slowly oscillating width schedule, and the magnitude of a Gaussian
(q = 1) or q-Gaussian (q > 1) deviate.  Heavier tails (larger q) produce
occasional long jumps that help the swarm escape local minima.

The run terminates when the swarm diversity (mean distance of local bests
from their centroid) falls below a threshold, or at an iteration cap.

Two engines implement the identical algorithm: the pure-Python one in
this module and a compiled twin in qswarm._core.  They consume the random
stream in the same order and perform the same scalar arithmetic, so for
any seed they produce bit-identical trajectories.  Keep every formula
here in exact sync with the compiled twin; in particular do not reorder
accumulations or introduce vectorized (SIMD) transcendentals.

Random draw order contract, per run:
  1. initial positions: particle-major, dimension-minor, one uniform each
  2. per sweep, per particle: one attractor mix uniform (per_particle
     mode) or one per dimension (per_dimension mode), drawn before that
     dimension's jump; then per dimension: two uniforms for the deviate
     (redrawing the first if it is exactly zero), then one sign uniform
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import _backend
from .benchmarks import ObjectiveFunction
from .qmath import solve_y0_q
from .rng import Xoshiro256PlusPlus

_TWO_PI = 2.0 * math.pi

ATTRACTOR_MODES = ("per_particle", "per_dimension")
BOUNDS_MODES = ("free", "clamp")
TERMINATIONS = ("diversity", "cap")


@dataclass(frozen=True)
class SwarmConfig:
    """Swarm hyperparameters; validated and frozen at construction.

    q selects the jump law (1 = Gaussian, up to but excluding 3); p0 is
    the target transition probability whose root fixes the characteristic
    length y0 (solved once here and cached); g scales the jump width;
    amplitude/omega shape the oscillating width schedule
    w(t) = g (1 + amplitude |sin(omega t)|), clamped at w_cap.
    """

    q: float = 1.0
    particles: int = 20
    amplitude: float = 0.2
    p0: float = 0.75
    g: float = 0.5
    omega: float = 0.1
    diversity_tol: float = 1e-5
    max_iterations: int = 5000
    w_cap: float = 1.71
    attractor_r_mode: str = "per_particle"
    bounds_mode: str = "free"
    y0: float = field(init=False)

    def __post_init__(self):
        if not 1.0 <= self.q < 3.0:
            raise ValueError(f"q must satisfy 1 <= q < 3, got {self.q}")
        if self.particles < 2:
            raise ValueError(f"particles must be >= 2, got {self.particles}")
        if self.amplitude < 0.0:
            raise ValueError(f"amplitude must be >= 0, got {self.amplitude}")
        if not 0.5 < self.p0 < 1.0:
            raise ValueError(f"p0 must lie in (0.5, 1), got {self.p0}")
        if self.g <= 0.0:
            raise ValueError(f"g must be positive, got {self.g}")
        if self.omega < 0.0:
            raise ValueError(f"omega must be >= 0, got {self.omega}")
        if self.diversity_tol <= 0.0:
            raise ValueError(
                f"diversity_tol must be positive, got {self.diversity_tol}"
            )
        if self.max_iterations < 1:
            raise ValueError(
                f"max_iterations must be >= 1, got {self.max_iterations}"
            )
        if self.w_cap <= 0.0:
            raise ValueError(f"w_cap must be positive, got {self.w_cap}")
        if self.attractor_r_mode not in ATTRACTOR_MODES:
            raise ValueError(
                f"attractor_r_mode must be one of {ATTRACTOR_MODES}, "
                f"got {self.attractor_r_mode!r}"
            )
        if self.bounds_mode not in BOUNDS_MODES:
            raise ValueError(
                f"bounds_mode must be one of {BOUNDS_MODES}, "
                f"got {self.bounds_mode!r}"
            )
        object.__setattr__(self, "y0", solve_y0_q(self.p0, self.q))


@dataclass
class RunRecord:
    """Everything observable about one completed run."""

    objective_name: str
    q: float
    seed: int
    backend: str
    iterations: int
    termination: str
    best_score: float
    best_position: np.ndarray
    diversity_trace: np.ndarray
    gbest_trace: np.ndarray
    final_positions: np.ndarray
    w_max: float
    containment_violations: int
    history: list | None = None


# ---------------------------------------------------------------------------
# elementary swarm operations (shared by the engine and the test suite)
# ---------------------------------------------------------------------------


def beta_schedule(t: int, y0: float, amplitude: float, omega: float) -> float:
    """Oscillating length scale beta(t) = y0 (1 + amplitude |sin(omega t)|)."""
    return y0 * (1.0 + amplitude * abs(math.sin(omega * t)))


def effective_width(
    t: int, g: float, amplitude: float, omega: float, w_cap: float
) -> float:
    """Jump width g beta(t)/y0, clamped at w_cap.

    The y0 factor cancels, so the width is g (1 + amplitude |sin(omega t)|)
    independent of the jump law.
    """
    w = g * (1.0 + amplitude * abs(math.sin(omega * t)))
    return w if w < w_cap else w_cap


def local_attractor(lbest, gbest, r: float):
    """Convex mix r * lbest + (1 - r) * gbest (scalars or arrays)."""
    return r * lbest + (1.0 - r) * gbest


def jump_position(
    attractor: float,
    width: float,
    mean_j: float,
    current: float,
    deviate: float,
    z: float,
) -> float:
    """One coordinate update: attractor +- width |mean - current| |deviate|.

    The sign is + when the uniform z is >= 1/2.
    """
    step = width * abs(mean_j - current) * abs(deviate)
    return attractor + step if z >= 0.5 else attractor - step


def mean_best(lbests) -> np.ndarray:
    """Per-coordinate mean of the local bests, accumulated in index order."""
    rows = [[float(v) for v in row] for row in lbests]
    n = len(rows)
    dim = len(rows[0])
    out = np.empty(dim, dtype=np.float64)
    for j in range(dim):
        acc = 0.0
        for i in range(n):
            acc += rows[i][j]
        out[j] = acc / n
    return out


def swarm_diversity(lbests, mean) -> float:
    """Mean Euclidean distance of the local bests from a reference point."""
    rows = [[float(v) for v in row] for row in lbests]
    center = [float(v) for v in mean]
    total = 0.0
    for row in rows:
        acc = 0.0
        for j, c in enumerate(center):
            d = row[j] - c
            acc += d * d
        total += math.sqrt(acc)
    return total / len(rows)


# ---------------------------------------------------------------------------
# pure-Python engine
# ---------------------------------------------------------------------------


def _run_python(
    objective: ObjectiveFunction,
    config: SwarmConfig,
    seed: int,
    record_history: bool,
) -> RunRecord:
    rng = Xoshiro256PlusPlus(seed)
    uniform = rng.uniform
    sqrt, log, cos, fabs = math.sqrt, math.log, math.cos, math.fabs
    fn = objective.fn
    n = config.particles
    dim = objective.dim
    lower = [float(v) for v in objective.lower]
    upper = [float(v) for v in objective.upper]
    q = config.q
    gaussian = q == 1.0
    if not gaussian:
        one_m = 1.0 - (1.0 + q) / (3.0 - q)
    g = config.g
    amplitude = config.amplitude
    omega = config.omega
    w_cap = config.w_cap
    tol = config.diversity_tol
    max_iter = config.max_iterations
    per_particle_r = config.attractor_r_mode == "per_particle"
    clamp = config.bounds_mode == "clamp"

    # --- initial swarm: particle-major, dimension-minor uniforms
    positions = []
    for _ in range(n):
        row = []
        for j in range(dim):
            lo = lower[j]
            row.append(lo + uniform() * (upper[j] - lo))
        positions.append(row)
    lbest = [row[:] for row in positions]
    lbest_scores = []
    for i in range(n):
        score = fn(positions[i])
        if not math.isfinite(score):
            raise RuntimeError(
                f"objective {objective.name!r} returned a non-finite value "
                f"({score}) at initialization of particle {i}"
            )
        lbest_scores.append(score)

    gi = 0
    for i in range(1, n):
        if lbest_scores[i] < lbest_scores[gi]:
            gi = i
    gbest = lbest[gi][:]
    gbest_score = lbest_scores[gi]
    mean = [0.0] * dim
    for j in range(dim):
        acc = 0.0
        for i in range(n):
            acc += lbest[i][j]
        mean[j] = acc / n
    div_total = 0.0
    for i in range(n):
        acc = 0.0
        row = lbest[i]
        for j in range(dim):
            d = row[j] - mean[j]
            acc += d * d
        div_total += sqrt(acc)
    diversity = div_total / n

    div_trace = [diversity]
    gbest_trace = [gbest_score]
    history = [] if record_history else None
    w_max = 0.0
    violations = 0
    t = 0

    while diversity >= tol and t < max_iter:
        w = g * (1.0 + amplitude * fabs(math.sin(omega * t)))
        if w > w_cap:
            w = w_cap
        if w > w_max:
            w_max = w
        for i in range(n):
            row = positions[i]
            lb = lbest[i]
            if per_particle_r:
                r = uniform()
            for j in range(dim):
                if not per_particle_r:
                    r = uniform()
                lj = lb[j]
                gj = gbest[j]
                p = r * lj + (1.0 - r) * gj
                if lj <= gj:
                    lo_a, hi_a = lj, gj
                else:
                    lo_a, hi_a = gj, lj
                slack = 1e-12 * (1.0 + fabs(lo_a) + fabs(hi_a))
                if p < lo_a - slack or p > hi_a + slack:
                    violations += 1
                u1 = uniform()
                while u1 == 0.0:
                    u1 = uniform()
                u2 = uniform()
                if gaussian:
                    radius = sqrt(-2.0 * log(u1))
                else:
                    radius = sqrt(-2.0 * ((u1**one_m - 1.0) / one_m))
                deviate = radius * cos(_TWO_PI * u2)
                z = uniform()
                step = w * fabs(mean[j] - row[j]) * fabs(deviate)
                x = p + step if z >= 0.5 else p - step
                if clamp:
                    lo = lower[j]
                    hi = upper[j]
                    x = lo if x < lo else (hi if x > hi else x)
                row[j] = x
            score = fn(row)
            if not math.isfinite(score):
                raise RuntimeError(
                    f"objective {objective.name!r} returned a non-finite "
                    f"value ({score}) for particle {i} at iteration {t}"
                )
            if score < lbest_scores[i]:
                lbest_scores[i] = score
                lb[:] = row

        # synchronous refresh after the full sweep
        gi = 0
        for i in range(1, n):
            if lbest_scores[i] < lbest_scores[gi]:
                gi = i
        gbest = lbest[gi][:]
        gbest_score = lbest_scores[gi]
        for j in range(dim):
            acc = 0.0
            for i in range(n):
                acc += lbest[i][j]
            mean[j] = acc / n
        div_total = 0.0
        for i in range(n):
            acc = 0.0
            row = lbest[i]
            for j in range(dim):
                d = row[j] - mean[j]
                acc += d * d
            div_total += sqrt(acc)
        diversity = div_total / n
        t += 1
        div_trace.append(diversity)
        gbest_trace.append(gbest_score)
        if record_history:
            history.append(np.array(positions, dtype=np.float64))

    return RunRecord(
        objective_name=objective.name,
        q=q,
        seed=seed,
        backend="python",
        iterations=t,
        termination="diversity" if diversity < tol else "cap",
        best_score=gbest_score,
        best_position=np.array(gbest, dtype=np.float64),
        diversity_trace=np.array(div_trace, dtype=np.float64),
        gbest_trace=np.array(gbest_trace, dtype=np.float64),
        final_positions=np.array(positions, dtype=np.float64),
        w_max=w_max,
        containment_violations=violations,
        history=history,
    )


# ---------------------------------------------------------------------------
# dispatch
# ---------------------------------------------------------------------------


def _run_compiled(
    objective: ObjectiveFunction, config: SwarmConfig, seed: int
) -> RunRecord:
    core = _backend.core()
    (
        term_code,
        iterations,
        best_score,
        best_position,
        div_trace,
        gbest_trace,
        final_positions,
        w_max,
        violations,
        abort_particle,
        abort_iteration,
    ) = core.run_swarm(
        _backend.KERNEL_CODES[objective.name],
        np.ascontiguousarray(objective.lower),
        np.ascontiguousarray(objective.upper),
        config.particles,
        config.q,
        config.g,
        config.amplitude,
        config.omega,
        config.w_cap,
        config.diversity_tol,
        config.max_iterations,
        1 if config.attractor_r_mode == "per_particle" else 0,
        1 if config.bounds_mode == "clamp" else 0,
        seed & 0xFFFFFFFFFFFFFFFF,
    )
    if term_code == 2:
        raise RuntimeError(
            f"objective {objective.name!r} returned a non-finite value for "
            f"particle {abort_particle} at iteration {abort_iteration}"
        )
    return RunRecord(
        objective_name=objective.name,
        q=config.q,
        seed=seed,
        backend="compiled",
        iterations=iterations,
        termination="diversity" if term_code == 0 else "cap",
        best_score=best_score,
        best_position=best_position,
        diversity_trace=div_trace,
        gbest_trace=gbest_trace,
        final_positions=final_positions,
        w_max=w_max,
        containment_violations=violations,
        history=None,
    )


def run(
    objective: ObjectiveFunction,
    config: SwarmConfig,
    seed: int,
    backend: str = "auto",
    record_history: bool = False,
) -> RunRecord:
    """Minimize the objective once; deterministic in (config, seed).

    backend "auto" uses the compiled engine when it is importable, the
    objective is a built-in, and no history is requested; "python" forces
    the pure-Python engine; "compiled" requires the extension.  Both
    engines give bit-identical results.
    """
    if backend not in ("auto", "python", "compiled"):
        raise ValueError(
            f"backend must be 'auto', 'python', or 'compiled', got {backend!r}"
        )
    kernel_known = objective.name in _backend.KERNEL_CODES
    if backend == "compiled":
        if not kernel_known:
            raise ValueError(
                f"objective {objective.name!r} has no compiled kernel; "
                f"use backend='python'"
            )
        if record_history:
            raise ValueError("record_history requires the python backend")
        _backend.core()  # raises when unavailable
        return _run_compiled(objective, config, seed)
    if backend == "auto":
        if (
            kernel_known
            and not record_history
            and _backend.compiled_active()
        ):
            return _run_compiled(objective, config, seed)
    return _run_python(objective, config, seed, record_history)
