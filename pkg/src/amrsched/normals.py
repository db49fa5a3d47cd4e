"""Gaussian timing arithmetic for arrival-time propagation.

Every random time in the solver (travel legs, service durations, arrivals,
service starts) is carried as a normal distribution, i.e. a (mean, variance)
pair in seconds and seconds squared.  Two operations keep the propagation
closed under this family:

* sums of independent normals add their means and variances, and
* ``max_with_constant`` re-approximates max(A, e) - the service start after
  waiting for a window to open - by a normal with the exact first two moments
  of the clipped variable.

With ``Y = max(A, e)`` and ``A ~ N(mu, sigma^2)``, ``beta = (mu - e)/sigma``:

    E[Y]   = e + (mu - e) Phi(beta) + sigma phi(beta)
    E[Y^2] = e^2 + 2 e (E[Y] - e) + ((mu - e)^2 + sigma^2) Phi(beta)
             + (mu - e) sigma phi(beta)

and the matched variance is ``E[Y^2] - E[Y]^2``.  Degenerate inputs
(``sigma = 0``) bypass the formulas and use exact point-mass logic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

_SQRT2 = math.sqrt(2.0)
_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)

# Beyond this many sigmas the clipped tail is below double precision, so the
# exact limit is returned instead of the cancellation-prone formulas.
_CLIP_CUTOFF = 8.3


def std_cdf(z: float) -> float:
    """Standard normal CDF, accurate to well below 1e-9 absolute."""
    return 0.5 * (1.0 + math.erf(z / _SQRT2))


def std_pdf(z: float) -> float:
    """Standard normal density."""
    return _INV_SQRT_2PI * math.exp(-0.5 * z * z)


@dataclass(frozen=True)
class Gaussian:
    """A normal distribution stored as mean and variance.

    ``variance == 0`` is allowed and denotes a point mass, which is how the
    deterministic mode of the whole solver falls out of the general code.
    """

    mean: float
    variance: float = 0.0

    def __post_init__(self) -> None:
        if not (math.isfinite(self.mean) and math.isfinite(self.variance)):
            raise ValueError("Gaussian mean and variance must be finite")
        if self.variance < 0.0:
            raise ValueError(f"negative variance: {self.variance!r}")

    @property
    def std(self) -> float:
        return math.sqrt(self.variance)

    def __add__(self, other: "Gaussian") -> "Gaussian":
        return Gaussian(self.mean + other.mean, self.variance + other.variance)


def add(a: Gaussian, b: Gaussian) -> Gaussian:
    """Sum of independent normals: means add, variances add."""
    return a + b


def _clipped_max(mean: float, variance: float, bound: float) -> tuple[float, float]:
    """First two central moments of max(X, bound) as a (mean, variance) pair.

    Hot-path twin of :func:`max_with_constant` working on raw floats.  The
    computation runs in the frame shifted by ``bound`` so the second moment
    does not cancel catastrophically for large absolute times, and the
    results are clamped onto the mathematically guaranteed ranges
    ``mean' >= max(mean, bound)`` and ``0 <= variance' <= variance`` so those
    inequalities hold bit-exactly for downstream invariant checks.
    """
    if variance <= 0.0:
        return (mean if mean >= bound else bound), 0.0
    sigma = math.sqrt(variance)
    beta = (mean - bound) / sigma
    if beta >= _CLIP_CUTOFF:
        return mean, variance
    if beta <= -_CLIP_CUTOFF:
        return bound, 0.0
    cdf = std_cdf(beta)
    pdf = std_pdf(beta)
    delta = mean - bound
    lift = delta * cdf + sigma * pdf  # E[max(X - bound, 0)]
    second = (delta * delta + variance) * cdf + delta * sigma * pdf
    new_mean = bound + lift
    new_var = second - lift * lift
    if new_mean < mean:
        new_mean = mean
    if new_mean < bound:
        new_mean = bound
    if new_var < 0.0:
        new_var = 0.0
    elif new_var > variance:
        new_var = variance
    return new_mean, new_var


def max_with_constant(a: Gaussian, bound: float) -> Gaussian:
    """Moment-matched normal for max(A, bound).

    Models the service start of a visit whose arrival ``a`` may precede the
    window opening ``bound``: the robot waits, so the distribution is clipped
    from below and then re-approximated as a normal.
    """
    m, v = _clipped_max(a.mean, a.variance, bound)
    return Gaussian(m, v)


def _tail_probability(mean: float, variance: float, threshold: float) -> float:
    """P(X > threshold) for X ~ N(mean, variance); exact 0/1 step when degenerate."""
    if variance <= 0.0:
        return 1.0 if mean > threshold else 0.0
    z = (threshold - mean) / math.sqrt(variance)
    # 1 - Phi(z) via erfc keeps far tails accurate.
    return 0.5 * math.erfc(z / _SQRT2)


def exceed_probability(a: Gaussian, threshold: float) -> float:
    """Probability of landing strictly beyond ``threshold`` (deadline-miss chance)."""
    return _tail_probability(a.mean, a.variance, threshold)
