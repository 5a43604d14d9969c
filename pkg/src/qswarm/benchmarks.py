"""Benchmark objective functions for global minimization.

Provides the classic multimodal test functions (Griewank, Rastrigin,
Ackley) plus the convex sphere and a constant zero objective, each with
its search box and known global minimum.  All three multimodal functions
have their global minimum value 0 at the origin, and the default search
box is [-6 pi, 6 pi] per coordinate.

Evaluation is deliberately written as plain sequential scalar loops using
the C math library (via the math module): the compiled engine evaluates
the same functions with the same operation order, so both engines produce
bit-identical objective values.  Do not vectorize these loops.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

_TWO_PI = 2.0 * math.pi
DEFAULT_BOX_HALF_WIDTH = 6.0 * math.pi


def sphere(x: Sequence[float]) -> float:
    """Sum of squares; convex, minimum 0 at the origin."""
    acc = 0.0
    for v in x:
        acc += v * v
    return acc


def griewank(x: Sequence[float]) -> float:
    """Quadratic bowl modulated by an oscillatory product.

    f(x) = (1/400) sum_i x_i^2 - prod_i cos(x_i / sqrt(i)) + 1, i 1-based.
    Minimum 0 at the origin; the product term creates a lattice of local
    minima whose depth decays slowly with dimension.
    """
    acc = 0.0
    prod = 1.0
    i = 0
    for v in x:
        i += 1
        acc += v * v
        prod *= math.cos(v / math.sqrt(i))
    return acc / 400.0 - prod + 1.0


def rastrigin(x: Sequence[float]) -> float:
    """Separable cosine-rippled paraboloid.

    f(x) = sum_i [10 + x_i^2 - 10 cos(2 pi x_i)], minimum 0 at the origin,
    with local minima on the integer lattice.
    """
    acc = 0.0
    for v in x:
        acc += 10.0 + v * v - 10.0 * math.cos(_TWO_PI * v)
    return acc


def ackley(x: Sequence[float]) -> float:
    """Exponential well with a cosine-textured floor.

    f(x) = -20 exp(-0.2 sqrt(mean(x^2))) - exp(mean(cos(2 pi x))) + 20 + e,
    minimum 0 at the origin.
    """
    acc_sq = 0.0
    acc_cos = 0.0
    count = 0
    for v in x:
        count += 1
        acc_sq += v * v
        acc_cos += math.cos(_TWO_PI * v)
    inv = 1.0 / count
    return (
        -20.0 * math.exp(-0.2 * math.sqrt(acc_sq * inv))
        - math.exp(acc_cos * inv)
        + 20.0
        + math.e
    )


def zero(x: Sequence[float]) -> float:
    """Constant 0; useful for exercising swarm kinematics in isolation."""
    return 0.0


@dataclass(frozen=True)
class ObjectiveFunction:
    """An objective with its search box and known optimum.

    lower/upper are per-coordinate arrays of length dim; minimum_value is
    the known global minimum (0 for every built-in) and minimizer the
    point attaining it (the origin for every built-in).
    """

    name: str
    fn: Callable[[Sequence[float]], float]
    dim: int
    lower: np.ndarray
    upper: np.ndarray
    minimum_value: float = 0.0
    minimizer: np.ndarray = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError(f"dim must be >= 1, got {self.dim}")
        lower = np.asarray(self.lower, dtype=np.float64)
        upper = np.asarray(self.upper, dtype=np.float64)
        if lower.shape != (self.dim,) or upper.shape != (self.dim,):
            raise ValueError(
                f"bounds must have shape ({self.dim},), got {lower.shape} "
                f"and {upper.shape}"
            )
        if not np.all(lower < upper):
            raise ValueError("every lower bound must be below its upper bound")
        minimizer = self.minimizer
        if minimizer is None:
            minimizer = np.zeros(self.dim, dtype=np.float64)
        else:
            minimizer = np.asarray(minimizer, dtype=np.float64)
            if minimizer.shape != (self.dim,):
                raise ValueError(f"minimizer must have shape ({self.dim},)")
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)
        object.__setattr__(self, "minimizer", minimizer)

    def __call__(self, x: Sequence[float]) -> float:
        return self.fn(x)


_FUNCTIONS: dict[str, Callable[[Sequence[float]], float]] = {
    "sphere": sphere,
    "griewank": griewank,
    "rastrigin": rastrigin,
    "ackley": ackley,
    "zero": zero,
}


def objective_names() -> tuple[str, ...]:
    """Names accepted by make_objective, in registration order."""
    return tuple(_FUNCTIONS)


def make_objective(
    name: str,
    dim: int,
    lower: Sequence[float] | float | None = None,
    upper: Sequence[float] | float | None = None,
) -> ObjectiveFunction:
    """Build a registered objective over a box.

    lower/upper may be scalars (replicated to every coordinate), full
    arrays, or omitted for the default [-6 pi, 6 pi] box.
    """
    try:
        fn = _FUNCTIONS[name]
    except KeyError:
        known = ", ".join(sorted(_FUNCTIONS))
        raise ValueError(f"unknown objective {name!r}; expected one of: {known}")
    if lower is None:
        lower = -DEFAULT_BOX_HALF_WIDTH
    if upper is None:
        upper = DEFAULT_BOX_HALF_WIDTH
    lower_arr = np.broadcast_to(np.asarray(lower, dtype=np.float64), (dim,)).copy()
    upper_arr = np.broadcast_to(np.asarray(upper, dtype=np.float64), (dim,)).copy()
    return ObjectiveFunction(
        name=name, fn=fn, dim=dim, lower=lower_arr, upper=upper_arr
    )
