"""Small statistics helpers for the experiment suite.

Frequencies of rare events are reported with Wilson intervals, which stay
honest near 0 and 1 where the normal approximation collapses.
"""

from __future__ import annotations

import math

from .errors import InputError


def mean(values) -> float:
    values = list(values)
    if not values:
        raise InputError("mean of an empty sample")
    return sum(values) / len(values)


def sample_std(values) -> float:
    values = list(values)
    if len(values) < 2:
        return 0.0
    m = mean(values)
    return math.sqrt(sum((v - m) ** 2 for v in values) / (len(values) - 1))


def standard_error(values) -> float:
    values = list(values)
    return sample_std(values) / math.sqrt(len(values)) if values else 0.0


def normal_ci(values, z: float = 1.96) -> tuple[float, float]:
    m = mean(values)
    half = z * standard_error(values)
    return (m - half, m + half)


def median(values) -> float:
    ordered = sorted(values)
    if not ordered:
        raise InputError("median of an empty sample")
    k = len(ordered)
    mid = k // 2
    if k % 2:
        return float(ordered[mid])
    return (ordered[mid - 1] + ordered[mid]) / 2.0


def empirical_quantile(values, q: float):
    """Smallest value covering at least a q-fraction of the sample."""
    if not 0 < q <= 1:
        raise InputError("quantile level must lie in (0, 1]")
    ordered = sorted(values)
    if not ordered:
        raise InputError("quantile of an empty sample")
    index = math.ceil(q * len(ordered)) - 1
    return ordered[index]


def wilson_interval(successes: int, total: int, z: float) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion."""
    if total <= 0:
        raise InputError("Wilson interval needs a positive sample size")
    if not 0 <= successes <= total:
        raise InputError("success count outside [0, total]")
    phat = successes / total
    denom = 1.0 + z * z / total
    center = (phat + z * z / (2 * total)) / denom
    half = (
        z
        * math.sqrt(phat * (1 - phat) / total + z * z / (4 * total * total))
        / denom
    )
    return (center - half, center + half)


def least_squares_slope(xs, ys) -> float:
    """Slope of the ordinary least-squares line through (xs, ys)."""
    xs, ys = list(xs), list(ys)
    if len(xs) != len(ys) or len(xs) < 2:
        raise InputError("slope needs at least two paired points")
    mx, my = mean(xs), mean(ys)
    sxx = sum((x - mx) ** 2 for x in xs)
    if sxx == 0:
        raise InputError("slope undefined for constant x values")
    return sum((x - mx) * (y - my) for x, y in zip(xs, ys)) / sxx
