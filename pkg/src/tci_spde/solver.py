"""Semi-implicit Euler-Maruyama stepping for the SPDE models.

Each step treats the (negative definite) linear part implicitly and
everything else explicitly:

    u_{n+1} = [u_n + dt F(t_n, u_n) + dt f(t_n)
               + B(t_n, u_n)(dW_n + h(t_n) dt)] / (1 + dt lambda_k)

applied mode by mode, where lambda_k are the spectral eigenvalues of the
implicit part and h is an optional Girsanov shift.  Trajectories carry
running integrals of the V-norm (trapezoid) and the running sup of the
H-norm; blow-up raises with the offending step index instead of
propagating NaNs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DivergenceError, ParameterError, InvalidFieldError
from .fields import Field1D, Field2D
from .models import (ModelSpec, explicit_drift, linear_eigenvalues,
                     taylor_green_field)
from .noise import increment_table, embed_2d


@dataclass(frozen=True)
class SolverConfig:
    """Time-stepping parameters; the horizon must be a whole number of steps.

    The resolution fields are optional cross-checks: when given they must
    agree with the model (the model owns its resolution, because the noise
    embedding depends on it).  ``dealias`` selects the anti-aliased product
    grid for the nonlinearities; switching it off evaluates products at the
    minimal collocation resolution.
    """

    dt: float
    horizon: float
    n_modes: int | None = None
    cutoff: int | None = None
    dealias: bool = True
    snapshot_stride: int = 1

    def __post_init__(self):
        if self.dt <= 0.0 or self.horizon <= 0.0:
            raise ParameterError("dt and horizon must be positive")
        n = round(self.horizon / self.dt)
        if n < 1 or abs(n * self.dt - self.horizon) > 1e-9 * max(self.horizon, 1.0):
            raise ParameterError(
                f"horizon {self.horizon} is not a whole number of steps of {self.dt}"
            )
        if self.snapshot_stride < 1:
            raise ParameterError("snapshot_stride must be at least 1")

    @property
    def n_steps(self) -> int:
        return round(self.horizon / self.dt)


def _check_resolution(model: ModelSpec, cfg: SolverConfig):
    if cfg.n_modes is not None and cfg.n_modes != model.n_modes:
        raise ParameterError("solver n_modes disagrees with the model")
    if cfg.cutoff is not None and cfg.cutoff != model.cutoff:
        raise ParameterError("solver cutoff disagrees with the model")


def _product_grid(model: ModelSpec, cfg: SolverConfig) -> int | None:
    if model.kind == "heat":
        return None
    if model.kind == "burgers":
        return 4 * model.n_modes if cfg.dealias else model.n_modes
    return (4 * model.cutoff + 4) if cfg.dealias else (3 * model.cutoff + 1)


@dataclass
class Trajectory:
    """One sample path on the uniform time grid.

    ``states[i]`` is the raw coefficient array at time ``times[i]``;
    ``field(i)`` wraps it.  ``v_energy[i]`` is the trapezoid value of
    int_0^{t_i} ||X_s||_V^2 ds and ``sup_h_norm[i]`` the running max of
    the H-norm, both including the initial state.
    """

    times: np.ndarray
    states: np.ndarray
    v_energy: np.ndarray
    sup_h_norm: np.ndarray
    kind: str

    def field(self, i: int):
        if self.kind == "1d":
            return Field1D(self.states[i])
        return Field2D(self.states[i])

    @property
    def terminal_field(self):
        return self.field(len(self.times) - 1)

    @property
    def v_energy_total(self) -> float:
        return float(self.v_energy[-1])

    @property
    def sup_h_total(self) -> float:
        return float(self.sup_h_norm[-1])


def _norm_pair(model: ModelSpec, state: np.ndarray, lam: np.ndarray):
    """(||u||_H^2, ||u||_V^2) on raw coefficients."""
    if model.kind == "ns2d":
        p = np.abs(state) ** 2
        h_sq = float(np.sum(p))
        v_sq = float(np.sum(lam * p)) / model.viscosity
        return h_sq, v_sq
    h_sq = float(np.dot(state, state))
    v_sq = float(np.dot(lam * state, state))
    return h_sq, v_sq


def _advance(model: ModelSpec, state: np.ndarray, expl, noise_term,
             inv_lin: np.ndarray, dt: float) -> np.ndarray:
    """One semi-implicit update on raw coefficients."""
    if expl is not None:
        tmp = state + dt * expl
    else:
        tmp = state.copy()
    if noise_term is not None:
        if model.kind == "ns2d":
            tmp += noise_term
        else:
            tmp[: noise_term.size] += noise_term
    tmp *= inv_lin
    return tmp


def step(model: ModelSpec, cfg: SolverConfig, v, t: float,
         dW: np.ndarray, shift_vec: np.ndarray | None = None):
    """Single public step; ``dW`` lives in U, ``shift_vec`` is h(t) or None."""
    _check_resolution(model, cfg)
    op = model.noise
    if model.kind == "ns2d":
        if not isinstance(v, Field2D):
            raise InvalidFieldError("ns2d step needs a Field2D state")
        state = v.spec
    else:
        if not isinstance(v, Field1D):
            raise InvalidFieldError(f"{model.kind} step needs a Field1D state")
        state = v.coeffs
    lam = linear_eigenvalues(model)
    inv_lin = 1.0 / (1.0 + cfg.dt * lam)
    w_eff = dW if shift_vec is None else dW + cfg.dt * shift_vec
    g = op.g(math.sqrt(_norm_pair(model, state, lam)[0]))
    if model.kind == "ns2d":
        noise_term = embed_2d(op, g * w_eff)
    else:
        noise_term = op.gains * (g * w_eff)
    expl = explicit_drift(model, t, state, _product_grid(model, cfg))
    out = _advance(model, state, expl, noise_term, inv_lin, cfg.dt)
    if not np.all(np.isfinite(out.view(np.float64) if out.dtype.kind == "c" else out)):
        raise DivergenceError(1, t + cfg.dt)
    return Field2D(out) if model.kind == "ns2d" else Field1D(out)


def solve(model: ModelSpec, cfg: SolverConfig, x0, experiment_seed: int,
          replicate: int = 0, shift_values: np.ndarray | None = None,
          increments: np.ndarray | None = None,
          zero_noise: bool = False) -> Trajectory:
    """Integrate one trajectory.

    The Wiener increments are addressed by (experiment_seed, replicate)
    and the step index, so replicates are reproducible independently of
    execution order.  ``shift_values`` holds h(t_k) rows for a Girsanov
    shift; ``increments`` overrides the generated ones (shared-noise
    couplings); ``zero_noise`` runs the deterministic skeleton.
    """
    _check_resolution(model, cfg)
    M = cfg.n_steps
    dt = cfg.dt
    op = model.noise

    if model.kind == "ns2d":
        if not isinstance(x0, Field2D) or x0.cutoff != model.cutoff:
            raise InvalidFieldError("initial condition must match the model cutoff")
        state = x0.spec.copy()
        states = np.empty((M + 1,) + state.shape, dtype=np.complex128)
    else:
        if not isinstance(x0, Field1D) or x0.n_modes != model.n_modes:
            raise InvalidFieldError("initial condition must match the model modes")
        state = x0.coeffs.copy()
        states = np.empty((M + 1, state.size))

    if zero_noise:
        inc = None
    elif increments is not None:
        if increments.shape != (M, op.n_w):
            raise ParameterError("increments must have shape (n_steps, n_w)")
        inc = increments
    else:
        inc = increment_table(op, dt, experiment_seed, replicate, M)

    if shift_values is not None and shift_values.shape != (M, op.n_w):
        raise ParameterError("shift values must have shape (n_steps, n_w)")

    lam = linear_eigenvalues(model)
    inv_lin = 1.0 / (1.0 + dt * lam)
    additive = op.clamp is None
    grid = _product_grid(model, cfg)

    times = dt * np.arange(M + 1)
    v_energy = np.empty(M + 1)
    sup_h = np.empty(M + 1)

    h_sq, v_sq = _norm_pair(model, state, lam)
    states[0] = state
    v_energy[0] = 0.0
    sup_h[0] = math.sqrt(h_sq)
    prev_v_sq = v_sq

    # Pre-embed the additive noise terms in one vectorized pass.
    noise_rows = None
    if inc is not None and additive:
        w_all = inc if shift_values is None else inc + dt * shift_values
        if model.kind == "ns2d":
            noise_rows = np.tensordot(w_all * op.gains, op._basis, axes=(1, 0))
        else:
            noise_rows = w_all * op.gains

    for k in range(M):
        expl = explicit_drift(model, k * dt, state, grid)
        if inc is None:
            noise_term = None
        elif additive:
            noise_term = noise_rows[k]
        else:
            w_eff = inc[k] if shift_values is None else inc[k] + dt * shift_values[k]
            g = op.g(math.sqrt(h_sq))
            if model.kind == "ns2d":
                noise_term = embed_2d(op, g * w_eff)
            else:
                noise_term = op.gains * (g * w_eff)
        state = _advance(model, state, expl, noise_term, inv_lin, dt)
        h_sq, v_sq = _norm_pair(model, state, lam)
        if not (h_sq < np.inf and v_sq < np.inf):
            raise DivergenceError(
                k + 1, (k + 1) * dt,
                f"trajectory diverged at step {k + 1} (t = {(k + 1) * dt:.6g}; "
                f"experiment_seed={experiment_seed}, replicate={replicate})")
        states[k + 1] = state
        v_energy[k + 1] = v_energy[k] + 0.5 * dt * (prev_v_sq + v_sq)
        sup_h[k + 1] = max(sup_h[k], math.sqrt(h_sq))
        prev_v_sq = v_sq

    return Trajectory(times=times, states=states, v_energy=v_energy,
                      sup_h_norm=sup_h, kind="2d" if model.kind == "ns2d" else "1d")


# ---------------------------------------------------------------------------
# deterministic solver oracles


def heat_convergence_report(n_modes: int = 32, horizon: float = 1.0,
                            dts=(4e-3, 2e-3, 1e-3, 5e-4, 2.5e-4)) -> dict:
    """Strong-order fit of the zero-noise heat step against e^{-pi^2 t}.

    The first sine mode decays exactly like (1 + pi^2 dt)^{-T/dt}; the
    fitted slope of log error against log dt should sit near one.
    """
    from .models import heat_model
    from .noise import noise_operator_1d, gains_single_mode

    op = noise_operator_1d(1, gains_single_mode(1, 1.0), 1.0)
    model = heat_model(n_modes, op)
    x0 = np.zeros(n_modes)
    x0[0] = 1.0 / math.sqrt(2.0)  # sin(pi x)
    exact = x0[0] * math.exp(-math.pi**2 * horizon)

    errors = []
    for dt in dts:
        cfg = SolverConfig(dt=dt, horizon=horizon)
        traj = solve(model, cfg, Field1D(x0), experiment_seed=0, zero_noise=True)
        errors.append(abs(traj.states[-1][0] - exact))
    slope = np.polyfit(np.log(np.asarray(dts)), np.log(np.asarray(errors)), 1)[0]
    return {
        "dts": [float(d) for d in dts],
        "errors": [float(e) for e in errors],
        "fitted_order": float(slope),
        "pass": bool(0.85 <= slope <= 1.15),
    }


def taylor_green_report(cutoff: int = 32, viscosity: float = 0.05,
                        dt: float = 1e-3, horizon: float = 0.5,
                        rate_tol: float = 0.01) -> dict:
    """Zero-noise Taylor-Green decay against the exact rate 8 pi^2 nu.

    The advection term of the Taylor-Green vortex is a pure gradient, so
    the Leray projection kills it and every mode decays with the Stokes
    rate; the report also records the largest projected nonlinearity seen.
    """
    from .models import ns2d_model, ns_advection
    from .noise import noise_operator_2d, gains_inverse_k

    op = noise_operator_2d(2, gains_inverse_k(2, 1e-4), 1e-4, cutoff)
    model = ns2d_model(cutoff, viscosity, op)
    x0 = taylor_green_field(cutoff)

    adv = ns_advection(x0.spec, cutoff)
    adv_linf = float(np.max(np.abs(adv)))

    cfg = SolverConfig(dt=dt, horizon=horizon)
    traj = solve(model, cfg, x0, experiment_seed=0, zero_noise=True)
    amp0 = abs(x0.spec[0, 1 + cutoff, 1 + cutoff])
    amp1 = abs(traj.states[-1][0, 1 + cutoff, 1 + cutoff])
    rate = -math.log(amp1 / amp0) / horizon
    exact = 8.0 * math.pi**2 * viscosity
    rel = abs(rate - exact) / exact
    return {
        "cutoff": int(cutoff),
        "viscosity": float(viscosity),
        "projected_nonlinearity_linf": adv_linf,
        "measured_rate": float(rate),
        "exact_rate": float(exact),
        "relative_error": float(rel),
        "pass": bool(adv_linf <= 1e-10 and rel <= rate_tol),
    }
