"""qswarm: quantum-behaved swarm minimization with q-Gaussian jumps."""

from .rng import Xoshiro256PlusPlus, derive_seed
from .qmath import (
    QGaussianParams,
    SolverSettings,
    erf,
    log_gamma,
    q_exponential,
    q_gaussian_pdf,
    q_gaussian_cdf_half,
    transition_probability,
    transition_probability_hyp2f1,
    solve_y0_gaussian,
    solve_y0_q,
    sample_q_gaussian,
    sample_q_gaussian_batch,
)
from ._backend import backend_name, compiled_active, compiled_available
from .benchmarks import ObjectiveFunction, make_objective, objective_names
from .optimizer import RunRecord, SwarmConfig, run
from .harness import (
    CellSummary,
    ExperimentResult,
    ExperimentSpec,
    RunRow,
    audit_result,
    execute,
    q_critical,
    run_cpu_bench,
    run_diversity_trace,
    run_experiment,
)

__version__ = "0.1.0"

__all__ = [
    "Xoshiro256PlusPlus",
    "derive_seed",
    "QGaussianParams",
    "SolverSettings",
    "erf",
    "log_gamma",
    "q_exponential",
    "q_gaussian_pdf",
    "q_gaussian_cdf_half",
    "transition_probability",
    "transition_probability_hyp2f1",
    "solve_y0_gaussian",
    "solve_y0_q",
    "sample_q_gaussian",
    "sample_q_gaussian_batch",
    "backend_name",
    "compiled_active",
    "compiled_available",
    "ObjectiveFunction",
    "make_objective",
    "objective_names",
    "RunRecord",
    "SwarmConfig",
    "run",
    "CellSummary",
    "ExperimentResult",
    "ExperimentSpec",
    "RunRow",
    "audit_result",
    "execute",
    "q_critical",
    "run_cpu_bench",
    "run_diversity_trace",
    "run_experiment",
    "__version__",
]
