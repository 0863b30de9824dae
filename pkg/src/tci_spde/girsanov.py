"""Girsanov shifts and shared-noise couplings.

A deterministic shift h: [0, T] -> U tilts the driving Wiener process;
the shifted process X and the unshifted process Y are driven by the same
increments, which realizes a coupling of the shifted law Q and the base
law P.  The density of Q against P along the path is

    log M_T = sum_k <h(t_k), dW_k> - 1/2 int ||h||_U^2 dt,

where dW are increments of the original process; under the shifted
simulation these are the drawn increments plus h dt.  The relative
entropy is H(Q | P) = 1/2 int ||h||^2 dt, exactly, since h is
deterministic.  ``contraction_report`` checks the resulting squared-gap
bound   E_Q sup_t ||X - Y||_H^2 <= C(T, K2, C_B) int ||h||^2 dt.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import partial

import numpy as np

from ._stats import mean_and_stderr
from .errors import ParameterError
from .models import ModelSpec
from .noise import increment_table
from .parallel import parallel_map
from .solver import SolverConfig, Trajectory, solve


@dataclass(frozen=True)
class ShiftFunction:
    """Piecewise-constant Cameron-Martin shift sampled on the step grid.

    ``values[i]`` is h(t_i); the dynamics use the left endpoint of each
    step, the entropy uses the trapezoid rule over the grid samples.
    """

    values: np.ndarray
    dt: float

    def __post_init__(self):
        arr = np.asarray(self.values, dtype=np.float64)
        if arr.ndim != 2 or arr.shape[0] < 2:
            raise ParameterError("shift values must be (n_steps + 1, n_w)")
        if not np.all(np.isfinite(arr)):
            raise ParameterError("shift values must be finite")
        if self.dt <= 0.0:
            raise ParameterError("shift dt must be positive")
        object.__setattr__(self, "values", arr)

    @property
    def n_w(self) -> int:
        return self.values.shape[1]

    @property
    def horizon(self) -> float:
        return (self.values.shape[0] - 1) * self.dt

    def dynamic_rows(self) -> np.ndarray:
        return self.values[:-1]


def shift_from_descriptor(desc: dict, n_w: int, cfg: SolverConfig) -> ShiftFunction:
    """Build a shift from {"type", "mode_index", "amplitude"}.

    The direction is the U-coordinate ``mode_index`` (1-based).  ``constant``
    and ``mode`` hold the amplitude fixed; ``ramp`` scales it by t / T.
    """
    kind = desc.get("type", "constant")
    amplitude = float(desc.get("amplitude", 1.0))
    mode_index = int(desc.get("mode_index", 1))
    if kind not in ("constant", "ramp", "mode"):
        raise ParameterError(f"unknown shift type {kind!r}")
    if not 1 <= mode_index <= n_w:
        raise ParameterError(f"shift mode_index must lie in [1, {n_w}]")
    M = cfg.n_steps
    t = cfg.dt * np.arange(M + 1)
    profile = amplitude * (t / cfg.horizon) if kind == "ramp" \
        else np.full(M + 1, amplitude)
    values = np.zeros((M + 1, n_w))
    values[:, mode_index - 1] = profile
    return ShiftFunction(values=values, dt=cfg.dt)


def shift_entropy(h: ShiftFunction) -> float:
    """Relative entropy H(Q | P) = 1/2 int_0^T ||h(s)||_U^2 ds (trapezoid)."""
    s = np.sum(h.values**2, axis=1)
    integral = h.dt * (0.5 * s[0] + float(np.sum(s[1:-1])) + 0.5 * s[-1])
    return 0.5 * integral


@dataclass
class CoupledPair:
    """Shifted and unshifted trajectories driven by one increment table."""

    x: Trajectory
    y: Trajectory
    sup_gap_sq: float
    log_rn: float
    girsanov_cost: float
    experiment_seed: int
    replicate: int


def log_radon_nikodym(pair: CoupledPair) -> float:
    """log M_T accumulated along the shifted simulation."""
    return pair.log_rn


def _log_rn_parts(h: ShiftFunction, inc: np.ndarray) -> tuple[float, float, float]:
    rows = h.dynamic_rows()
    s = float(np.sum(rows * inc))
    i_left = h.dt * float(np.sum(rows**2))
    entropy = shift_entropy(h)
    return s, i_left, entropy


def coupled_solve(model: ModelSpec, cfg: SolverConfig, x0, h: ShiftFunction,
                  experiment_seed: int, replicate: int = 0) -> CoupledPair:
    """Drive the shifted and unshifted dynamics with shared increments."""
    if h.n_w != model.noise.n_w:
        raise ParameterError("shift dimension disagrees with the noise")
    if abs(h.horizon - cfg.horizon) > 1e-9 or abs(h.dt - cfg.dt) > 1e-15:
        raise ParameterError("shift grid disagrees with the solver grid")
    inc = increment_table(model.noise, cfg.dt, experiment_seed, replicate,
                          cfg.n_steps)
    x = solve(model, cfg, x0, experiment_seed, replicate,
              shift_values=h.dynamic_rows(), increments=inc)
    y = solve(model, cfg, x0, experiment_seed, replicate, increments=inc)
    diff = x.states - y.states
    if model.kind == "ns2d":
        gaps = np.sum(np.abs(diff) ** 2, axis=(1, 2, 3))
    else:
        gaps = np.sum(diff**2, axis=1)
    s, i_left, entropy = _log_rn_parts(h, inc)
    return CoupledPair(x=x, y=y, sup_gap_sq=float(np.max(gaps)),
                       log_rn=s + i_left - entropy,
                       girsanov_cost=2.0 * entropy,
                       experiment_seed=experiment_seed, replicate=replicate)


def _pair_worker(replicate: int, model, cfg, x0, h, experiment_seed,
                 functional=None):
    pair = coupled_solve(model, cfg, x0, h, experiment_seed, replicate)
    s, i_left, _ = _log_rn_parts(
        h, increment_table(model.noise, cfg.dt, experiment_seed, replicate,
                           cfg.n_steps))
    # log M_T with the draws read under the base measure; subtracting half
    # the left-rule integral (the variance of s) makes E exp(.) = 1 exactly.
    base_view = s - 0.5 * i_left
    if functional is None:
        fx = fy = math.nan
    else:
        fx = functional(pair.x)
        fy = functional(pair.y)
    return pair.sup_gap_sq, pair.log_rn, base_view, fx, fy


def coupled_ensemble(model: ModelSpec, cfg: SolverConfig, x0, h: ShiftFunction,
                     n_replicates: int, experiment_seed: int,
                     functional=None) -> dict:
    """Replicate arrays for the coupling checks.

    ``functional`` (optional) maps a Trajectory to a scalar; its values on
    the shifted and unshifted legs feed the distributional checks.
    """
    rows = parallel_map(
        partial(_pair_worker, model=model, cfg=cfg, x0=x0, h=h,
                experiment_seed=experiment_seed, functional=functional),
        range(n_replicates))
    out = np.asarray(rows, dtype=np.float64)
    return {
        "sup_gap_sq": out[:, 0],
        "log_rn": out[:, 1],
        "log_rn_base_view": out[:, 2],
        "functional_shifted": out[:, 3],
        "functional_unshifted": out[:, 4],
        "n_replicates": int(n_replicates),
        "experiment_seed": int(experiment_seed),
    }


def contraction_report(model: ModelSpec, cfg: SolverConfig, x0,
                       h: ShiftFunction, n_replicates: int = 256,
                       experiment_seed: int = 0, t2: dict | None = None,
                       ensemble: dict | None = None) -> dict:
    """Girsanov coupling audit: martingale normalization, entropy identity,
    and the squared-gap contraction bound.

    Verdicts are one-sided at three standard errors; the gap bound compares
    mean + 3 stderr against C(T, K2, C_B) int ||h||^2 dt.
    """
    from .constants import t2_constant

    if ensemble is None:
        ensemble = coupled_ensemble(model, cfg, x0, h, n_replicates,
                                    experiment_seed)
    n_replicates = ensemble["n_replicates"]
    entropy = shift_entropy(h)
    cost = 2.0 * entropy

    if t2 is None:
        t2 = t2_constant(horizon=cfg.horizon, K2=model.constants.K2,
                         C_B=model.noise.c_b, C1=model.constants.C1)
    bound = t2["value"] * cost

    gap_mean, gap_se = mean_and_stderr(ensemble["sup_gap_sq"])
    mart_mean, mart_se = mean_and_stderr(np.exp(ensemble["log_rn_base_view"]))
    ent_mean, ent_se = mean_and_stderr(ensemble["log_rn"])

    report = {
        "model": model.kind,
        "n_replicates": int(n_replicates),
        "experiment_seed": int(ensemble["experiment_seed"]),
        "shift_entropy": float(entropy),
        "girsanov_cost": float(cost),
        "martingale": {
            "mean": float(mart_mean),
            "stderr": float(mart_se),
            "expected": 1.0,
            "pass": bool(abs(mart_mean - 1.0) <= 3.0 * mart_se),
        },
        "entropy_identity": {
            "mean": float(ent_mean),
            "stderr": float(ent_se),
            "expected": float(entropy),
            "pass": bool(abs(ent_mean - entropy) <= 3.0 * ent_se),
        },
        "sup_gap_sq": {"mean": float(gap_mean), "stderr": float(gap_se)},
        "t2_constant": float(t2["value"]),
        "bound": float(bound),
        "margin": float(bound - (gap_mean + 3.0 * gap_se)),
        "pass": bool(gap_mean + 3.0 * gap_se <= bound),
    }
    return report
