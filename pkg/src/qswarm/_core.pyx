# cython: language_level=3
"""Compiled twin of the pure-Python swarm engine.

Every formula here mirrors qswarm.optimizer._run_python and
qswarm.qmath.sample_q_gaussian operation for operation: the same libm
calls (the math module binds the same C library in-process), the same
expression shapes, and the same sequential accumulation order, so both
engines are bit-identical for any seed.  The build disables FP contraction
(-ffp-contract=off) because a fused multiply-add would round differently
from the Python interpreter.

Objective kernel codes match qswarm._backend.KERNEL_CODES:
0 zero, 1 sphere, 2 griewank, 3 rastrigin, 4 ackley.
"""

from libc.stdint cimport uint64_t
from libc.math cimport M_E, M_PI, cos, exp, fabs, isfinite, log, pow, sin, sqrt

import numpy as np

cdef double TWO_PI = 2.0 * M_PI
cdef double INV_2_53 = 1.0 / 9007199254740992.0
cdef uint64_t GOLDEN = <uint64_t>0x9E3779B97F4A7C15


# ---------------------------------------------------------------------------
# xoshiro256++ with splitmix64 seeding (twin of qswarm.rng)
# ---------------------------------------------------------------------------

cdef struct XoState:
    uint64_t s0
    uint64_t s1
    uint64_t s2
    uint64_t s3


cdef inline uint64_t mix64(uint64_t z) noexcept nogil:
    z = (z ^ (z >> 30)) * <uint64_t>0xBF58476D1CE4E5B9
    z = (z ^ (z >> 27)) * <uint64_t>0x94D049BB133111EB
    return z ^ (z >> 31)


cdef inline void xo_seed(XoState* st, uint64_t seed) noexcept nogil:
    cdef uint64_t state = seed
    state += GOLDEN
    st.s0 = mix64(state)
    state += GOLDEN
    st.s1 = mix64(state)
    state += GOLDEN
    st.s2 = mix64(state)
    state += GOLDEN
    st.s3 = mix64(state)


cdef inline uint64_t xo_next(XoState* st) noexcept nogil:
    cdef uint64_t tmp = st.s0 + st.s3
    cdef uint64_t result = ((tmp << 23) | (tmp >> 41)) + st.s0
    cdef uint64_t t = st.s1 << 17
    st.s2 ^= st.s0
    st.s3 ^= st.s1
    st.s1 ^= st.s2
    st.s0 ^= st.s3
    st.s2 ^= t
    st.s3 = (st.s3 << 45) | (st.s3 >> 19)
    return result


cdef inline double xo_uniform(XoState* st) noexcept nogil:
    return <double>(xo_next(st) >> 11) * INV_2_53


cdef inline double draw_deviate(
    XoState* st, bint gaussian, double one_m
) noexcept nogil:
    """Generalized Box-Muller deviate, twin of qmath.sample_q_gaussian."""
    cdef double u1 = xo_uniform(st)
    cdef double u2
    cdef double radius
    while u1 == 0.0:
        u1 = xo_uniform(st)
    u2 = xo_uniform(st)
    if gaussian:
        radius = sqrt(-2.0 * log(u1))
    else:
        radius = sqrt(-2.0 * ((pow(u1, one_m) - 1.0) / one_m))
    return radius * cos(TWO_PI * u2)


# ---------------------------------------------------------------------------
# objective kernels (twins of qswarm.benchmarks)
# ---------------------------------------------------------------------------

cdef double eval_kernel(int code, double* x, int dim) noexcept nogil:
    cdef double acc = 0.0
    cdef double prod = 1.0
    cdef double acc2 = 0.0
    cdef double v
    cdef double inv
    cdef int i
    if code == 0:  # zero
        return 0.0
    elif code == 1:  # sphere
        for i in range(dim):
            v = x[i]
            acc += v * v
        return acc
    elif code == 2:  # griewank
        for i in range(dim):
            v = x[i]
            acc += v * v
            prod *= cos(v / sqrt(<double>(i + 1)))
        return acc / 400.0 - prod + 1.0
    elif code == 3:  # rastrigin
        for i in range(dim):
            v = x[i]
            acc += 10.0 + v * v - 10.0 * cos(TWO_PI * v)
        return acc
    else:  # 4: ackley
        for i in range(dim):
            v = x[i]
            acc += v * v
            acc2 += cos(TWO_PI * v)
        inv = 1.0 / <double>dim
        return -20.0 * exp(-0.2 * sqrt(acc * inv)) - exp(acc2 * inv) + 20.0 + M_E


# ---------------------------------------------------------------------------
# public entry points
# ---------------------------------------------------------------------------


def kernel_value(int code, double[::1] x):
    """Evaluate a built-in objective kernel at x (for parity tests)."""
    if not 0 <= code <= 4:
        raise ValueError(f"unknown kernel code {code}")
    if x.shape[0] < 1:
        raise ValueError("x must have at least one element")
    return eval_kernel(code, &x[0], x.shape[0])


def uint64_stream(unsigned long long seed, Py_ssize_t count):
    """First `count` raw generator words for a seed (for parity tests)."""
    out = np.empty(count, dtype=np.uint64)
    cdef uint64_t[::1] mv = out
    cdef XoState st
    cdef Py_ssize_t i
    xo_seed(&st, seed)
    for i in range(count):
        mv[i] = xo_next(&st)
    return out


def uniform_stream(unsigned long long seed, Py_ssize_t count):
    """First `count` uniforms for a seed (for parity tests)."""
    out = np.empty(count, dtype=np.float64)
    cdef double[::1] mv = out
    cdef XoState st
    cdef Py_ssize_t i
    xo_seed(&st, seed)
    for i in range(count):
        mv[i] = xo_uniform(&st)
    return out


def sample_q_batch(unsigned long long seed, double q, Py_ssize_t count):
    """Deviate batch, bit-identical to repeated qmath.sample_q_gaussian."""
    if not 1.0 <= q < 3.0:
        raise ValueError(f"q must satisfy 1 <= q < 3, got {q}")
    if count < 0:
        raise ValueError("count must be non-negative")
    out = np.empty(count, dtype=np.float64)
    cdef double[::1] mv = out
    cdef XoState st
    cdef bint gaussian = q == 1.0
    cdef double one_m = 0.0
    cdef Py_ssize_t i
    if not gaussian:
        one_m = 1.0 - (1.0 + q) / (3.0 - q)
    xo_seed(&st, seed)
    for i in range(count):
        mv[i] = draw_deviate(&st, gaussian, one_m)
    return out


def run_swarm(
    int kernel_code,
    double[::1] lower,
    double[::1] upper,
    int particles,
    double q,
    double g,
    double amplitude,
    double omega,
    double w_cap,
    double diversity_tol,
    int max_iterations,
    int per_particle_r,
    int clamp,
    unsigned long long seed,
):
    """One full swarm run; returns the same observables as the Python engine.

    Returns (term_code, iterations, best_score, best_position,
    diversity_trace, gbest_trace, final_positions, w_max, violations,
    abort_particle, abort_iteration) where term_code is 0 for diversity
    convergence, 1 for the iteration cap, and 2 for a non-finite objective
    value (abort_particle/abort_iteration say where; -1 otherwise, with
    -1 also marking an initialization abort's iteration).
    """
    cdef int n = particles
    cdef int dim = lower.shape[0]
    cdef bint gaussian = q == 1.0
    cdef double one_m = 0.0
    if not gaussian:
        one_m = 1.0 - (1.0 + q) / (3.0 - q)

    positions_arr = np.empty((n, dim), dtype=np.float64)
    lbest_arr = np.empty((n, dim), dtype=np.float64)
    cdef double[:, ::1] positions = positions_arr
    cdef double[:, ::1] lbest = lbest_arr
    scores_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] lbest_scores = scores_arr
    gbest_arr = np.empty(dim, dtype=np.float64)
    cdef double[::1] gbest = gbest_arr
    mean_arr = np.empty(dim, dtype=np.float64)
    cdef double[::1] mean = mean_arr
    div_trace_arr = np.empty(max_iterations + 1, dtype=np.float64)
    gbest_trace_arr = np.empty(max_iterations + 1, dtype=np.float64)
    cdef double[::1] div_trace = div_trace_arr
    cdef double[::1] gbest_trace = gbest_trace_arr

    cdef XoState st
    cdef int i, j, gi, t
    cdef double lo, hi, u1, u2, r, p, w, x, v, d
    cdef double lo_a, hi_a, slack, radius, deviate, z, step, score
    cdef double acc, div_total, diversity, gbest_score
    cdef double w_max = 0.0
    cdef long violations = 0

    xo_seed(&st, seed)

    # --- initial swarm: particle-major, dimension-minor uniforms
    for i in range(n):
        for j in range(dim):
            lo = lower[j]
            positions[i, j] = lo + xo_uniform(&st) * (upper[j] - lo)
    for i in range(n):
        for j in range(dim):
            lbest[i, j] = positions[i, j]
    for i in range(n):
        score = eval_kernel(kernel_code, &positions[i, 0], dim)
        if not isfinite(score):
            return (2, 0, 0.0, gbest_arr[:0].copy(), div_trace_arr[:0].copy(),
                    gbest_trace_arr[:0].copy(), positions_arr, 0.0, 0, i, -1)
        lbest_scores[i] = score

    gi = 0
    for i in range(1, n):
        if lbest_scores[i] < lbest_scores[gi]:
            gi = i
    for j in range(dim):
        gbest[j] = lbest[gi, j]
    gbest_score = lbest_scores[gi]
    for j in range(dim):
        acc = 0.0
        for i in range(n):
            acc += lbest[i, j]
        mean[j] = acc / n
    div_total = 0.0
    for i in range(n):
        acc = 0.0
        for j in range(dim):
            d = lbest[i, j] - mean[j]
            acc += d * d
        div_total += sqrt(acc)
    diversity = div_total / n

    div_trace[0] = diversity
    gbest_trace[0] = gbest_score
    t = 0

    while diversity >= diversity_tol and t < max_iterations:
        w = g * (1.0 + amplitude * fabs(sin(omega * t)))
        if w > w_cap:
            w = w_cap
        if w > w_max:
            w_max = w
        for i in range(n):
            if per_particle_r:
                r = xo_uniform(&st)
            for j in range(dim):
                if not per_particle_r:
                    r = xo_uniform(&st)
                lo_a = lbest[i, j]
                hi_a = gbest[j]
                p = r * lo_a + (1.0 - r) * hi_a
                if lo_a > hi_a:
                    lo_a, hi_a = hi_a, lo_a
                slack = 1e-12 * (1.0 + fabs(lo_a) + fabs(hi_a))
                if p < lo_a - slack or p > hi_a + slack:
                    violations += 1
                deviate = draw_deviate(&st, gaussian, one_m)
                z = xo_uniform(&st)
                step = w * fabs(mean[j] - positions[i, j]) * fabs(deviate)
                if z >= 0.5:
                    x = p + step
                else:
                    x = p - step
                if clamp:
                    lo = lower[j]
                    hi = upper[j]
                    if x < lo:
                        x = lo
                    elif x > hi:
                        x = hi
                positions[i, j] = x
            score = eval_kernel(kernel_code, &positions[i, 0], dim)
            if not isfinite(score):
                return (2, t, 0.0, gbest_arr[:0].copy(),
                        div_trace_arr[:0].copy(), gbest_trace_arr[:0].copy(),
                        positions_arr, w_max, violations, i, t)
            if score < lbest_scores[i]:
                lbest_scores[i] = score
                for j in range(dim):
                    lbest[i, j] = positions[i, j]

        # synchronous refresh after the full sweep
        gi = 0
        for i in range(1, n):
            if lbest_scores[i] < lbest_scores[gi]:
                gi = i
        for j in range(dim):
            gbest[j] = lbest[gi, j]
        gbest_score = lbest_scores[gi]
        for j in range(dim):
            acc = 0.0
            for i in range(n):
                acc += lbest[i, j]
            mean[j] = acc / n
        div_total = 0.0
        for i in range(n):
            acc = 0.0
            for j in range(dim):
                d = lbest[i, j] - mean[j]
                acc += d * d
            div_total += sqrt(acc)
        diversity = div_total / n
        t += 1
        div_trace[t] = diversity
        gbest_trace[t] = gbest_score

    cdef int term_code = 0 if diversity < diversity_tol else 1
    return (
        term_code,
        t,
        gbest_score,
        gbest_arr.copy(),
        div_trace_arr[: t + 1].copy(),
        gbest_trace_arr[: t + 1].copy(),
        positions_arr,
        w_max,
        violations,
        -1,
        -1,
    )
