"""Closed-form and optimized constants for the transportation inequalities.

The quadratic-cost constant is a genuine two-parameter infimum

    C(T, K2, C_B) = inf  C_B / (eps1 (1 - eps1 - eps2))
                    * exp((eps2 + C1^2) max(K2, 0) T / ((1 - eps1 - eps2) eps2))

over {eps1 > 0, eps2 > 0, eps1 + eps2 < 1}; everything else here is a
direct formula.  The optimizer is deterministic (boundary-weighted grid
plus golden-section coordinate descent), so repeated runs are bitwise
identical.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import InfeasibleError, ParameterError

_EPS_FLOOR = 1e-12
_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def t2_objective(eps1: float, eps2: float, horizon: float, K2: float,
                 C_B: float, C1: float = 2.0) -> float:
    """The quantity under the infimum; +inf outside the open triangle."""
    rem = 1.0 - eps1 - eps2
    if eps1 <= 0.0 or eps2 <= 0.0 or rem <= 0.0:
        return math.inf
    exponent = (eps2 + C1 * C1) * max(K2, 0.0) * horizon / (rem * eps2)
    if exponent > 709.0:
        return math.inf
    return C_B / (eps1 * rem) * math.exp(exponent)


def _log_objective(eps1: float, eps2: float, horizon: float, K2p: float,
                   log_cb: float, c1_sq: float) -> float:
    rem = 1.0 - eps1 - eps2
    if eps1 <= 0.0 or eps2 <= 0.0 or rem <= 0.0:
        return math.inf
    return (log_cb - math.log(eps1) - math.log(rem)
            + (eps2 + c1_sq) * K2p * horizon / (rem * eps2))


def _boundary_grid(n: int = 200) -> np.ndarray:
    # geometric clusters toward both endpoints of (0, 1)
    half = np.geomspace(1e-9, 0.5, n // 2)
    return np.unique(np.concatenate([half, 1.0 - half]))


def _golden_min(f, lo: float, hi: float, iters: int = 120) -> float:
    a, b = lo, hi
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(iters):
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = f(d)
    return c if fc <= fd else d


def t2_constant(horizon: float, K2: float, C_B: float, C1: float = 2.0) -> dict:
    """Evaluate the quadratic-cost constant and its argmin.

    K2 < 0 is clamped to zero in the exponential factor (the raw infimum
    would degenerate to zero, which is not a usable constant); the clamp
    is reported in ``warnings``.
    """
    if horizon <= 0.0:
        raise ParameterError("horizon must be positive")
    if C_B <= 0.0:
        raise ParameterError("C_B must be positive")
    if C1 <= 0.0:
        raise ParameterError("C1 must be positive")
    warnings = []
    k2p = max(K2, 0.0)
    if K2 < 0.0:
        warnings.append("K2 < 0 clamped to 0 in the exponential factor")

    log_cb = math.log(C_B)
    c1_sq = C1 * C1
    grid = _boundary_grid()
    e1 = grid[:, None]
    e2 = grid[None, :]
    rem = 1.0 - e1 - e2
    ok = rem > 0.0
    with np.errstate(divide="ignore", invalid="ignore"):
        logval = (log_cb - np.log(e1) - np.log(np.where(ok, rem, 1.0))
                  + (e2 + c1_sq) * k2p * horizon / (np.where(ok, rem, 1.0) * e2))
    logval = np.where(ok, logval, np.inf)
    flat = int(np.argmin(logval))
    best1 = float(grid[flat // grid.size])
    best2 = float(grid[flat % grid.size])

    def g(x1, x2):
        return _log_objective(x1, x2, horizon, k2p, log_cb, c1_sq)

    for _ in range(8):
        best1 = _golden_min(lambda x: g(x, best2),
                            _EPS_FLOOR, 1.0 - best2 - _EPS_FLOOR)
        best2 = _golden_min(lambda x: g(best1, x),
                            _EPS_FLOOR, 1.0 - best1 - _EPS_FLOOR)

    value = t2_objective(best1, best2, horizon, k2p, C_B, C1)
    return {
        "value": float(value),
        "argmin": {"eps1": best1, "eps2": best2},
        "horizon": float(horizon),
        "K2": float(K2),
        "C_B": float(C_B),
        "C1": float(C1),
        "warnings": warnings,
    }


def t1_constant(lambda0: float, c: float, theta: float,
                f_tilde_integral: float, mu_moment: float = 1.0) -> float:
    """exp(2 lambda0 f~ + 1) / (c lambda0 theta sqrt(pi)) * mu_moment^2."""
    if lambda0 <= 0.0:
        raise ParameterError("lambda0 must be positive")
    if not 0.0 < c < 1.0:
        raise ParameterError("c must lie in (0, 1)")
    if theta <= 0.0:
        raise ParameterError("theta must be positive")
    if f_tilde_integral < 0.0:
        raise ParameterError("f_tilde_integral must be nonnegative")
    if mu_moment < 1.0:
        raise ParameterError("mu_moment must be at least 1")
    return (math.exp(2.0 * lambda0 * f_tilde_integral + 1.0)
            / (c * lambda0 * theta * math.sqrt(math.pi)) * mu_moment**2)


def gaussian_moment_pair(c: float, lambda0: float, theta: float,
                         f_tilde_integral: float,
                         x0_h_norm_sq: float) -> tuple[float, float]:
    """(a, b) of the exponential moment bound E exp(a sup ||X||^2) <= b."""
    if lambda0 < 0.0:
        raise ParameterError("lambda0 must be nonnegative")
    if not 0.0 < c < 1.0:
        raise ParameterError("c must lie in (0, 1)")
    if theta <= 0.0:
        raise ParameterError("theta must be positive")
    if f_tilde_integral < 0.0:
        raise ParameterError("f_tilde_integral must be nonnegative")
    if x0_h_norm_sq < 0.0:
        raise ParameterError("x0_h_norm_sq must be nonnegative")
    a = c * lambda0 * theta
    b = math.exp(lambda0 * (f_tilde_integral + x0_h_norm_sq))
    return a, b


def ccr_constant(a: float, b: float) -> float:
    """Gaussian-concentration constant D = b^2 e / (2 a sqrt(pi))."""
    if a <= 0.0:
        raise ParameterError("a must be positive")
    if b < 1.0:
        raise ParameterError("b must be at least 1")
    return b * b * math.e / (2.0 * a * math.sqrt(math.pi))


def admissible_ranges(theta: float, eta: float, K3: float, C_B: float,
                      c: float = 0.5) -> dict:
    """Admissible c-interval and both lambda0 upper bounds.

    Two denominators are in play (2 C_B + theta eta for the moment lemma,
    2 C_B for the inequality itself); both are returned and downstream
    defaults take the smaller.
    """
    if theta <= 0.0 or eta <= 0.0:
        raise ParameterError("theta and eta must be positive")
    if K3 < 0.0:
        raise ParameterError("K3 must be nonnegative")
    if C_B <= 0.0:
        raise ParameterError("C_B must be positive")
    te = theta * eta
    if te - K3 <= 0.0:
        raise InfeasibleError(
            f"theta*eta = {te:.6g} does not exceed K3 = {K3:.6g}")
    c_max = 1.0 - K3 / te
    if not 0.0 < c < c_max:
        raise InfeasibleError(f"c = {c:.6g} must lie in (0, {c_max:.6g})")
    num = (1.0 - c) * te - K3
    return {
        "c": float(c),
        "c_max": float(c_max),
        "lambda0_max_lemma": float(num / (2.0 * C_B + te)),
        "lambda0_max_theorem": float(num / (2.0 * C_B)),
    }
