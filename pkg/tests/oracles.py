"""Independent brute-force oracles the test suite freezes values against.

Everything here is deliberately naive: dense grids, factorial
enumeration, direct formulas.  The point is that none of it shares code
paths with the package internals it checks.
"""

import itertools
import math

import numpy as np


def t2_objective_grid(horizon, K2, C_B, C1, eps1, eps2):
    """Vectorized log-objective on a meshgrid, +inf outside the triangle."""
    e1, e2 = np.meshgrid(eps1, eps2, indexing="ij")
    rest = 1.0 - e1 - e2
    ok = (e1 > 0.0) & (e2 > 0.0) & (rest > 0.0)
    k2p = max(K2, 0.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        log_obj = (
            math.log(C_B)
            - np.log(e1)
            - np.log(rest)
            + (e2 + C1**2) * k2p * horizon / (rest * e2)
        )
    return np.where(ok, log_obj, np.inf)


def t2_grid_oracle(horizon, K2, C_B, C1, n=1000):
    """Two-stage dense grid search: 10^6 coarse points, then a 10^6-point
    zoom around the coarse argmin.  Returns the best value found."""
    lo = 1e-9
    eps1 = np.linspace(lo, 1.0 - lo, n)
    eps2 = np.linspace(lo, 1.0 - lo, n)
    stage1 = t2_objective_grid(horizon, K2, C_B, C1, eps1, eps2)
    flat = int(np.argmin(stage1))
    i, j = flat // n, flat % n
    cell = eps1[1] - eps1[0]

    z1 = np.linspace(max(lo, eps1[i] - 2 * cell), min(1.0 - lo, eps1[i] + 2 * cell), n)
    z2 = np.linspace(max(lo, eps2[j] - 2 * cell), min(1.0 - lo, eps2[j] + 2 * cell), n)
    stage2 = t2_objective_grid(horizon, K2, C_B, C1, z1, z2)
    best = min(float(np.min(stage1)), float(np.min(stage2)))
    return math.exp(best)


def w2_factorial_oracle(a, b):
    """Exact W2 between equal-size clouds by enumerating all pairings."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.ndim == 1:
        a = a[:, None]
    if b.ndim == 1:
        b = b[:, None]
    n = a.shape[0]
    best = math.inf
    for perm in itertools.permutations(range(n)):
        pair_costs = np.sum((a - b[list(perm)]) ** 2, axis=1)
        best = min(best, float(np.mean(pair_costs)))
    return math.sqrt(best)
