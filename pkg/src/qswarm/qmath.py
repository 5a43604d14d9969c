"""Special functions and q-Gaussian machinery.

Implements the Tsallis q-Gaussian family restricted to 1 <= q < 3 (the
normalizable, infinite-support branch, with q = 1 the ordinary Gaussian),
the numerical half-line CDF and the transition probability built on it,
the root solves that fix the characteristic length y0 for a target
transition probability, and the generalized Box-Muller deviate generator.

Everything here is self-contained scalar math: erf and log-gamma are
implemented from scratch (series and Lanczos approximation), integration
is adaptive Simpson over geometric panels, and root finding is bracketed
bisection.  No scipy at runtime; library quadrature is used only as an
independent oracle in the test suite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .rng import Xoshiro256PlusPlus

_SQRT_PI = math.sqrt(math.pi)
_TWO_PI = 2.0 * math.pi

# Improper integrals of the density are truncated where the remaining tail
# mass is provably below this bound; see _tail_cutoff.
_TAIL_MASS = 1e-12


@dataclass(frozen=True)
class SolverSettings:
    """Tolerances shared by the quadrature and root-finding routines."""

    abs_tol: float = 1e-10
    quad_rel_tol: float = 1e-10
    max_iterations: int = 200

    def __post_init__(self):
        if not (self.abs_tol > 0.0 and self.quad_rel_tol > 0.0):
            raise ValueError("tolerances must be strictly positive")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")


_DEFAULT_SETTINGS = SolverSettings()


# ---------------------------------------------------------------------------
# scalar special functions
# ---------------------------------------------------------------------------

# Lanczos approximation, g = 7, 9 coefficients.  Relative accuracy of the
# resulting gamma values is ~1e-14 over the arguments used here.
_LANCZOS_G = 7.0
_LANCZOS_COEF = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
_HALF_LOG_TWO_PI = 0.5 * math.log(2.0 * math.pi)


def log_gamma(x: float) -> float:
    """Natural log of Gamma(x) for x > 0, via the Lanczos approximation.

    Working in log space keeps the normalization constant of the
    q-Gaussian finite as q -> 1+, where the gamma arguments grow like
    1/(q-1) and Gamma itself overflows.
    """
    if x <= 0.0:
        raise ValueError(f"log_gamma requires x > 0, got {x}")
    if x < 0.5:
        # Shift into the Lanczos domain: Gamma(x) = Gamma(x+1)/x.
        return log_gamma(x + 1.0) - math.log(x)
    z = x - 1.0
    acc = _LANCZOS_COEF[0]
    for i in range(1, len(_LANCZOS_COEF)):
        acc += _LANCZOS_COEF[i] / (z + i)
    t = z + _LANCZOS_G + 0.5
    return _HALF_LOG_TWO_PI + (z + 0.5) * math.log(t) - t + math.log(acc)


def erf(x: float) -> float:
    """Error function, accurate to better than 1e-12 absolute.

    Uses the cancellation-free confluent series

        erf(x) = (2x/sqrt(pi)) * exp(-x^2) * sum_n (2x^2)^n / (2n+1)!!

    whose terms are all positive, and saturates to +-1 for |x| >= 6 where
    the complement is below 1e-16.
    """
    if x == 0.0:
        return 0.0
    ax = abs(x)
    if ax >= 6.0:
        return math.copysign(1.0, x)
    xx = x * x
    term = 1.0
    total = 1.0
    n = 0
    while True:
        n += 1
        term *= 2.0 * xx / (2.0 * n + 1.0)
        total += term
        if term <= total * 1e-17:
            break
    value = min(2.0 * ax / _SQRT_PI * math.exp(-xx) * total, 1.0)
    return math.copysign(value, x)


# ---------------------------------------------------------------------------
# q-Gaussian density
# ---------------------------------------------------------------------------


def q_exponential(x: float, q: float) -> float:
    """Tsallis q-exponential [1 + (1-q)x]^(1/(1-q)), with e_1(x) = exp(x).

    The bracket going non-positive maps to 0, the convention that gives the
    q-Gaussian density its cutoff.  Only 1 <= q < 3 is supported.
    """
    if not 1.0 <= q < 3.0:
        raise ValueError(f"q must satisfy 1 <= q < 3, got {q}")
    if q == 1.0:
        return math.exp(x)
    bracket = 1.0 + (1.0 - q) * x
    if bracket <= 0.0:
        return 0.0
    return bracket ** (1.0 / (1.0 - q))


@dataclass(frozen=True)
class QGaussianParams:
    """A q-Gaussian density f(x) = a0 * [1 - (1-q) alpha^2 x^2]^(1/(1-q)).

    The normalization constant a0 is derived at construction:

        a0 = alpha/sqrt(pi) * sqrt(q-1) * Gamma(1/(q-1)) / Gamma((3-q)/(2(q-1)))

    for q > 1, reducing to alpha/sqrt(pi) at q = 1 (plain Gaussian).
    """

    q: float
    alpha: float
    a0: float = field(init=False)

    def __post_init__(self):
        if not 1.0 <= self.q < 3.0:
            raise ValueError(f"q must satisfy 1 <= q < 3, got {self.q}")
        if not self.alpha > 0.0:
            raise ValueError(f"alpha must be positive, got {self.alpha}")
        if self.q == 1.0:
            a0 = self.alpha / _SQRT_PI
        else:
            n = 1.0 / (self.q - 1.0)
            half_n = (3.0 - self.q) / (2.0 * (self.q - 1.0))
            # Gamma ratio via log space: the arguments blow up as q -> 1.
            a0 = (
                self.alpha
                / _SQRT_PI
                * math.sqrt(self.q - 1.0)
                * math.exp(log_gamma(n) - log_gamma(half_n))
            )
        object.__setattr__(self, "a0", a0)


def q_gaussian_pdf(x: float, params: QGaussianParams) -> float:
    """Density of the q-Gaussian at x (even in x, zero where cut off)."""
    ax = params.alpha * x
    return params.a0 * q_exponential(-ax * ax, params.q)


def _tail_cutoff(params: QGaussianParams) -> float:
    """Abscissa X beyond which the remaining tail mass is below _TAIL_MASS.

    For q > 1 the density is bounded by its power-law envelope
    a0 * [ (q-1) (alpha x)^2 ]^(-1/(q-1)), whose tail integral can be
    inverted in closed (log-space) form.  The bound is loose near q = 1
    but only costs a handful of extra quadrature panels there.
    """
    qm1 = params.q - 1.0
    n = 1.0 / qm1
    two_n_m1 = 2.0 * n - 1.0  # > 0 for q < 3
    log_x = (
        math.log(params.a0)
        - n * math.log(qm1)
        - 2.0 * n * math.log(params.alpha)
        - math.log(two_n_m1)
        - math.log(_TAIL_MASS)
    ) / two_n_m1
    return math.exp(log_x)


# ---------------------------------------------------------------------------
# adaptive quadrature
# ---------------------------------------------------------------------------


def _simpson_recurse(f, a, b, fa, fm, fb, whole, eps, depth):
    m = 0.5 * (a + b)
    lm = 0.5 * (a + m)
    rm = 0.5 * (m + b)
    flm = f(lm)
    frm = f(rm)
    left = (m - a) / 6.0 * (fa + 4.0 * flm + fm)
    right = (b - m) / 6.0 * (fm + 4.0 * frm + fb)
    if depth <= 0 or abs(left + right - whole) <= 15.0 * eps:
        return left + right + (left + right - whole) / 15.0
    return _simpson_recurse(
        f, a, m, fa, flm, fm, left, 0.5 * eps, depth - 1
    ) + _simpson_recurse(f, m, b, fm, frm, fb, right, 0.5 * eps, depth - 1)


def _adaptive_simpson(f, a: float, b: float, rel_tol: float) -> float:
    """Adaptive Simpson on [a, b] with error relative to the panel value."""
    if b <= a:
        return 0.0
    m = 0.5 * (a + b)
    fa, fm, fb = f(a), f(m), f(b)
    whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    eps = rel_tol * max(abs(whole), 1e-300)
    return _simpson_recurse(f, a, b, fa, fm, fb, whole, eps, 50)


def _integrate_pdf(params: QGaussianParams, a: float, b: float, rel_tol: float) -> float:
    """Integral of the density over [a, b] (0 <= a <= b).

    The interval is split into geometrically widening panels scaled by the
    characteristic length 1/alpha, so a huge upper limit costs only
    O(log(b * alpha)) adaptive panels and each panel's tolerance is
    relative to its own (positive) contribution.
    """
    if b <= a:
        return 0.0
    pdf = lambda x: q_gaussian_pdf(x, params)
    scale = 1.0 / params.alpha
    total = 0.0
    lo = a
    width = scale
    while lo < b:
        hi = min(lo + width, b)
        total += _adaptive_simpson(pdf, lo, hi, rel_tol)
        lo = hi
        width *= 2.0
    return total


def q_gaussian_cdf_half(
    r: float,
    params: QGaussianParams,
    settings: SolverSettings = _DEFAULT_SETTINGS,
) -> float:
    """Half-line CDF: integral of the density from 0 to r, in [0, 1/2].

    The q = 1 branch is evaluated exactly as erf(alpha r)/2; for q > 1 the
    integral is done by adaptive quadrature, truncated where the neglected
    tail mass is provably below 1e-12.  r may be math.inf.
    """
    if r < 0.0:
        raise ValueError(f"r must be non-negative, got {r}")
    if r == 0.0:
        return 0.0
    if params.q == 1.0:
        return 0.5 * erf(params.alpha * r)
    upper = min(r, _tail_cutoff(params))
    return _integrate_pdf(params, 0.0, upper, settings.quad_rel_tol)


def transition_probability(
    r: float,
    params: QGaussianParams,
    settings: SolverSettings = _DEFAULT_SETTINGS,
) -> float:
    """Probability mass of the density below |r|: 1/2 + cdf_half(r).

    This is the chance that the next jump lands within the current
    distance scale; its lower bound is what pins the width parameter of
    both optimizers.
    """
    return 0.5 + q_gaussian_cdf_half(r, params, settings)


def hyp2f1_series(a: float, b: float, c: float, z: float) -> float:
    """Gauss hypergeometric 2F1 by direct series; requires |z| < 1."""
    if abs(z) >= 1.0:
        raise ValueError(f"series requires |z| < 1, got z = {z}")
    term = 1.0
    total = 1.0
    for n in range(1000):
        term *= (a + n) * (b + n) / ((c + n) * (n + 1.0)) * z
        total += term
        if abs(term) <= abs(total) * 1e-17:
            return total
    raise ValueError(f"2F1 series did not converge for z = {z}")


def transition_probability_hyp2f1(r: float, params: QGaussianParams) -> float:
    """Closed-form transition probability via 2F1, as a cross-check.

    Uses the antiderivative identity

        integral_0^r f(x) dx = a0 r 2F1(1/2, 1/(q-1); 3/2; -(q-1)(alpha r)^2)

    evaluated through the Pfaff transform, which maps the (negative)
    argument into [0, 1) so the series always converges.  Accuracy decays
    as (q-1)(alpha r)^2 grows; it is intended for (q-1)(alpha r)^2 <~ 10.
    The quadrature route in transition_probability is authoritative and
    this must agree with it on that domain.
    """
    if r < 0.0:
        raise ValueError(f"r must be non-negative, got {r}")
    if params.q == 1.0:
        raise ValueError("closed form applies to q > 1; use the erf branch")
    y = params.alpha * r
    z = -(params.q - 1.0) * y * y
    n = 1.0 / (params.q - 1.0)
    # Pfaff: 2F1(a, b; c; z) = (1-z)^(-a) 2F1(a, c-b; c; z/(z-1))
    w = z / (z - 1.0) if z != 0.0 else 0.0
    f21 = hyp2f1_series(0.5, 1.5 - n, 1.5, w) / math.sqrt(1.0 - z)
    return 0.5 + params.a0 * r * f21


# ---------------------------------------------------------------------------
# root solves for the characteristic length
# ---------------------------------------------------------------------------


def _bisect(f, lo: float, hi: float, settings: SolverSettings) -> float:
    flo = f(lo)
    for _ in range(settings.max_iterations):
        if hi - lo <= settings.abs_tol:
            break
        mid = 0.5 * (lo + hi)
        fmid = f(mid)
        if (flo < 0.0) == (fmid < 0.0):
            lo, flo = mid, fmid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _validate_p0(p0: float) -> None:
    if not 0.5 < p0 < 1.0:
        raise ValueError(
            f"p0 must lie strictly between 0.5 and 1 (got {p0}): at 0.5 the "
            "root degenerates to zero width, at 1 there is no finite root"
        )


def solve_y0_gaussian(p0: float, settings: SolverSettings = _DEFAULT_SETTINGS) -> float:
    """Root y0 > 0 of erf(y) = 2 p0 - 1, by bracketed bisection."""
    _validate_p0(p0)
    target = 2.0 * p0 - 1.0
    f = lambda y: erf(y) - target
    hi = 1.0
    while f(hi) < 0.0:
        hi *= 2.0
    return _bisect(f, 0.0, hi, settings)


def solve_y0_q(
    p0: float,
    q: float,
    settings: SolverSettings = _DEFAULT_SETTINGS,
) -> float:
    """Root y > 0 of cdf_half(y; q, alpha=1) = p0 - 1/2.

    For q = 1 this coincides exactly with solve_y0_gaussian.  The CDF is
    strictly increasing, so bracketing by doubling plus bisection always
    converges.
    """
    _validate_p0(p0)
    if not 1.0 <= q < 3.0:
        raise ValueError(f"q must satisfy 1 <= q < 3, got {q}")
    if q == 1.0:
        return solve_y0_gaussian(p0, settings)
    params = QGaussianParams(q=q, alpha=1.0)
    target = p0 - 0.5
    f = lambda y: q_gaussian_cdf_half(y, params, settings) - target
    hi = 1.0
    for _ in range(settings.max_iterations):
        if f(hi) > 0.0:
            break
        hi *= 2.0
    else:
        raise ValueError(f"failed to bracket y0 for p0={p0}, q={q}")
    return _bisect(f, 0.0, hi, settings)


# ---------------------------------------------------------------------------
# deviate generation (generalized Box-Muller)
# ---------------------------------------------------------------------------


def sample_q_gaussian(rng: Xoshiro256PlusPlus, q: float) -> float:
    """One q-Gaussian deviate via the generalized Box-Muller transform.

    Draws two uniforms u1, u2 and returns

        z = sqrt(-2 ln_q'(u1)) * cos(2 pi u2),   q' = (1 + q) / (3 - q)

    with ln_q the q-logarithm (x^(1-q) - 1)/(1-q).  At q = 1 this is the
    classical Box-Muller normal deviate, taken through an explicit branch.
    The output follows the q-Gaussian with alpha^2 = 1/(3-q) (unit-variance
    normal at q = 1).

    A u1 of exactly 0 is rejected and redrawn, so a call normally consumes
    two uniforms but may occasionally consume more; the count is still a
    pure function of the seed.
    """
    if not 1.0 <= q < 3.0:
        raise ValueError(f"q must satisfy 1 <= q < 3, got {q}")
    u1 = rng.uniform()
    while u1 == 0.0:
        u1 = rng.uniform()
    u2 = rng.uniform()
    if q == 1.0:
        radius = math.sqrt(-2.0 * math.log(u1))
    else:
        q_prime = (1.0 + q) / (3.0 - q)
        one_m = 1.0 - q_prime
        log_q = (u1**one_m - 1.0) / one_m
        radius = math.sqrt(-2.0 * log_q)
    return radius * math.cos(_TWO_PI * u2)


def sample_q_gaussian_batch(seed: int, q: float, count: int):
    """Array of deviates from a fresh stream; compiled kernel when available.

    Produces exactly the sequence of sample_q_gaussian calls against
    Xoshiro256PlusPlus(seed), whichever engine computes it.
    """
    import numpy as np

    from . import _backend

    if not 1.0 <= q < 3.0:
        raise ValueError(f"q must satisfy 1 <= q < 3, got {q}")
    if count < 0:
        raise ValueError("count must be non-negative")
    if _backend.compiled_active():
        return _backend.core().sample_q_batch(seed, q, count)
    rng = Xoshiro256PlusPlus(seed)
    out = np.empty(count, dtype=np.float64)
    for i in range(count):
        out[i] = sample_q_gaussian(rng, q)
    return out
