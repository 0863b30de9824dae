"""Order-independent summary statistics for Monte Carlo ensembles.

Sums use ``math.fsum`` over replicate-indexed arrays, so aggregates do
not depend on how the replicates were scheduled across workers.
"""

from __future__ import annotations

import math

import numpy as np


def fsum_mean(values) -> float:
    arr = np.asarray(values, dtype=np.float64)
    return math.fsum(arr) / arr.size


def mean_and_stderr(values) -> tuple[float, float]:
    """Sample mean and standard error of the mean."""
    arr = np.asarray(values, dtype=np.float64)
    n = arr.size
    mean = math.fsum(arr) / n
    if n < 2:
        return mean, float("inf")
    var = math.fsum((arr - mean) ** 2) / (n - 1)
    return mean, math.sqrt(var / n)


def wilson_upper(count: int, n: int, z: float = 3.0) -> float:
    """Upper Wilson score bound for a binomial proportion."""
    if n <= 0:
        return 1.0
    p = count / n
    denom = 1.0 + z**2 / n
    center = p + z**2 / (2.0 * n)
    radius = z * math.sqrt(p * (1.0 - p) / n + z**2 / (4.0 * n**2))
    return min(1.0, (center + radius) / denom)
