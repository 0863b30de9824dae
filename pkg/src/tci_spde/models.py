"""SPDE model definitions and hypothesis audits.

Three models share the variational skeleton dX = A(t, X) dt + B(t, X) dW:

* ``heat``     A(v) = Laplace(v)                        (monotone)
* ``burgers``  A(v) = Laplace(v) + v v_x                (locally monotone)
* ``ns2d``     A(v) = nu Laplace(v) - P[(v.grad)v] + f  (locally monotone)

Every model carries the structural constants of the variational framework
(coercivity theta, embedding eta, monotonicity and growth constants) plus
a noise operator.  ``audit_hypotheses`` probes the hypotheses numerically
on seeded random fields; violations become report entries, not errors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import InvalidFieldError, ParameterError
from . import fields as fs
from .fields import Field1D, Field2D
from .noise import NoiseOperator, hs_norm, generator, derived_replicate, LANE_FIELDS

ETA_1D = math.sqrt(math.pi**2 - 1.0)
ETA_2D = math.sqrt(2.0 * math.pi**2 - 1.0)


@dataclass(frozen=True)
class AssumptionConstants:
    """Constants appearing in the coercivity, monotonicity and growth bounds."""

    alpha: float
    theta: float
    eta: float
    K2: float = 0.0
    K3: float = 0.0
    K4: float = 0.0
    K2_tilde: float | None = None
    K4_tilde: float | None = None
    beta: float = 0.0
    C1: float = 2.0

    def __post_init__(self):
        if self.theta <= 0.0:
            raise ParameterError("theta must be positive")
        if self.eta <= 0.0:
            raise ParameterError("eta must be positive")
        if self.alpha <= 1.0:
            raise ParameterError("alpha must exceed 1")
        if self.C1 <= 0.0:
            raise ParameterError("the Burkholder constant C1 must be positive")


@dataclass(frozen=True)
class ModelSpec:
    """One concrete SPDE: drift family, resolution, constants, noise."""

    kind: str
    constants: AssumptionConstants
    noise: NoiseOperator
    n_modes: int | None = None
    cutoff: int | None = None
    viscosity: float | None = None
    forcing: Field2D | None = None
    f_tilde: float = 0.0
    local_rho: str | None = None
    rho_coefficient: float = 1.0

    def __post_init__(self):
        if self.kind not in ("heat", "burgers", "ns2d"):
            raise ParameterError(f"unknown model kind {self.kind!r}")
        if self.kind == "ns2d":
            if self.cutoff is None or self.viscosity is None:
                raise ParameterError("ns2d needs a cutoff and a viscosity")
            if self.viscosity <= 0.0:
                raise ParameterError("viscosity must be positive")
            if self.noise.kind != "2d" or self.noise.cutoff != self.cutoff:
                raise ParameterError("ns2d noise must match the field cutoff")
        else:
            if self.n_modes is None:
                raise ParameterError(f"{self.kind} needs n_modes")
            if self.noise.kind != "1d" or self.noise.n_w > self.n_modes:
                raise ParameterError("1-D noise must fit inside the mode count")
        if self.f_tilde < 0.0:
            raise ParameterError("f_tilde must be nonnegative")

    @property
    def locally_monotone(self) -> bool:
        return self.local_rho is not None


def heat_model(n_modes: int, noise: NoiseOperator, theta: float = 1.5,
               f_tilde: float | None = None) -> ModelSpec:
    """Stochastic heat equation on (0, 1) with Dirichlet boundary.

    Coercivity holds with any theta <= 2 and f_tilde = C_B; the default
    theta matches the locally monotone models so constants are comparable.
    With a clamped multiplicative noise the Lipschitz constant of B feeds
    the monotonicity constant K2 = C_B / clamp^2.
    """
    if not 0.0 < theta <= 2.0:
        raise ParameterError("heat coercivity needs 0 < theta <= 2")
    K2 = 0.0 if noise.clamp is None else noise.c_b / noise.clamp**2
    constants = AssumptionConstants(alpha=2.0, theta=theta, eta=ETA_1D,
                                    K2=K2, K3=0.0, K4=1.0)
    return ModelSpec(kind="heat", constants=constants, noise=noise,
                     n_modes=n_modes,
                     f_tilde=noise.c_b if f_tilde is None else f_tilde)


def burgers_model(n_modes: int, noise: NoiseOperator,
                  K2_tilde: float = 1.0, K4_tilde: float = 2.0,
                  f_tilde: float | None = None) -> ModelSpec:
    """Stochastic Burgers equation; locally monotone with rho(v) = ||v||_L4^4."""
    constants = AssumptionConstants(alpha=2.0, theta=1.5, eta=ETA_1D,
                                    K3=0.0, K2_tilde=K2_tilde,
                                    K4_tilde=K4_tilde, beta=2.0)
    return ModelSpec(kind="burgers", constants=constants, noise=noise,
                     n_modes=n_modes, local_rho="l4_fourth_power",
                     f_tilde=noise.c_b if f_tilde is None else f_tilde)


def ns2d_model(cutoff: int, viscosity: float, noise: NoiseOperator,
               forcing: Field2D | None = None,
               K2_tilde: float = 1.0, K4_tilde: float | None = None) -> ModelSpec:
    """2-D Navier-Stokes on the torus, mean-free and Leray projected.

    The coercivity schedule is f_tilde(t) = ||f_t||_{V*}^2 / nu + C_B.
    The local monotonicity weight keeps the shape ||v||_L4^4 but carries
    the coefficient 27/(32 nu^3) that the interpolation estimate for the
    advection term produces; the growth constant 8 covers the squared
    triangle bound on nu*Laplace + advection + forcing for nu <= 1/3.
    """
    if forcing is not None:
        if forcing.cutoff != cutoff:
            raise ParameterError("forcing cutoff must match the model cutoff")
        if fs.divergence_linf(forcing) > 1e-10:
            raise ParameterError("forcing must be divergence-free")
    f_norm_sq = fs.norm_vstar(forcing) ** 2 if forcing is not None else 0.0
    constants = AssumptionConstants(alpha=2.0, theta=viscosity, eta=ETA_2D,
                                    K3=0.0, K2_tilde=K2_tilde,
                                    K4_tilde=8.0 if K4_tilde is None else K4_tilde,
                                    beta=2.0)
    return ModelSpec(kind="ns2d", constants=constants, noise=noise,
                     cutoff=cutoff, viscosity=viscosity, forcing=forcing,
                     local_rho="l4_fourth_power",
                     rho_coefficient=27.0 / (32.0 * viscosity**3),
                     f_tilde=f_norm_sq / viscosity + noise.c_b)


def rho_local(model: ModelSpec, v) -> float:
    """Local monotonicity weight rho(v); zero for globally monotone models."""
    if not model.locally_monotone:
        return 0.0
    return model.rho_coefficient * fs.norm_l4(v) ** 4


# ---------------------------------------------------------------------------
# nonlinearities (raw coefficient arrays; shared with the solver)


@lru_cache(maxsize=16)
def _burgers_workspace(n_modes: int, n_grid: int):
    quad = fs.Quadrature(n_grid, "midpoint")
    x = quad.nodes()
    k = np.arange(1, n_modes + 1)
    eval_t = np.sqrt(2.0) * np.sin(np.pi * np.outer(x, k))
    deriv_t = np.sqrt(2.0) * (np.pi * k) * np.cos(np.pi * np.outer(x, k))
    proj_t = eval_t.T / n_grid
    return eval_t, deriv_t, proj_t


def burgers_nonlinearity(coeffs: np.ndarray, n_grid: int | None = None) -> np.ndarray:
    """Sine coefficients of v v_x, evaluated on an anti-aliased midpoint grid."""
    n_modes = coeffs.shape[0]
    if n_grid is None:
        n_grid = 4 * n_modes
    eval_t, deriv_t, proj_t = _burgers_workspace(n_modes, n_grid)
    vals = eval_t @ coeffs
    dvals = deriv_t @ coeffs
    return proj_t @ (vals * dvals)


@lru_cache(maxsize=16)
def _ns_workspace(cutoff: int, n_grid: int):
    idx = np.arange(-cutoff, cutoff + 1) % n_grid
    kf = np.fft.fftfreq(n_grid, d=1.0 / n_grid)
    ik1 = 2j * np.pi * kf[:, None]
    ik2 = 2j * np.pi * kf[None, :]
    k1, k2, ksq = fs._wavegrids(cutoff)
    ksq_safe = np.where(ksq == 0.0, 1.0, ksq)
    return idx, ik1, ik2, k1, k2, ksq_safe


def ns_advection(spec: np.ndarray, cutoff: int,
                 n_grid: int | None = None) -> np.ndarray:
    """Leray-projected advection -P[(u.grad)u] on the spectral block."""
    if n_grid is None:
        n_grid = fs.default_grid_2d(cutoff)
    if n_grid < 3 * cutoff + 1:
        from .errors import ResolutionError
        raise ResolutionError(
            f"grid {n_grid} aliases quadratic products at cutoff {cutoff}"
        )
    idx, ik1, ik2, k1, k2, ksq_safe = _ns_workspace(cutoff, n_grid)
    buf = np.zeros((2, n_grid, n_grid), dtype=np.complex128)
    buf[:, idx[:, None], idx[None, :]] = spec
    u = np.fft.ifft2(buf, axes=(1, 2)).real * n_grid**2
    adv = np.empty_like(u)
    for c in range(2):
        d1 = np.fft.ifft2(ik1 * buf[c]).real * n_grid**2
        d2 = np.fft.ifft2(ik2 * buf[c]).real * n_grid**2
        adv[c] = u[0] * d1 + u[1] * d2
    out = np.fft.fft2(adv, axes=(1, 2)) / n_grid**2
    out = out[:, idx[:, None], idx[None, :]]
    dot = (k1 * out[0] + k2 * out[1]) / ksq_safe
    out[0] -= k1 * dot
    out[1] -= k2 * dot
    out = fs.hermitian_symmetrize(-out)
    out[:, cutoff, cutoff] = 0.0
    return out


def linear_eigenvalues(model: ModelSpec) -> np.ndarray:
    """Spectral eigenvalues of the implicit (linear) drift part."""
    if model.kind == "ns2d":
        _, _, ksq = fs._wavegrids(model.cutoff)
        return model.viscosity * (2.0 * np.pi) ** 2 * ksq
    k = np.arange(1, model.n_modes + 1, dtype=np.float64)
    return (np.pi * k) ** 2


def explicit_drift(model: ModelSpec, t: float, state: np.ndarray,
                   n_grid: int | None = None) -> np.ndarray | None:
    """Non-implicit drift terms (nonlinearity and forcing) on raw coefficients."""
    if model.kind == "heat":
        return None
    if model.kind == "burgers":
        return burgers_nonlinearity(state, n_grid)
    out = ns_advection(state, model.cutoff, n_grid)
    if model.forcing is not None:
        out = out + model.forcing.spec
    return out


def drift_eval(model: ModelSpec, t: float, v):
    """Full drift A(t, v) as a field in the dual (spectral) representation."""
    lam = linear_eigenvalues(model)
    if model.kind == "ns2d":
        if not isinstance(v, Field2D) or v.cutoff != model.cutoff:
            raise InvalidFieldError("ns2d drift needs a matching 2-D field")
        spec = -lam * v.spec + explicit_drift(model, t, v.spec)
        return Field2D(spec)
    if not isinstance(v, Field1D) or v.n_modes != model.n_modes:
        raise InvalidFieldError(f"{model.kind} drift needs a matching 1-D field")
    coeffs = -lam * v.coeffs
    extra = explicit_drift(model, t, v.coeffs)
    if extra is not None:
        coeffs = coeffs + extra
    return Field1D(coeffs)


def nonlinearity_energy(model: ModelSpec, v) -> float:
    """<F(v), v> for the non-dissipative drift part; zero analytically."""
    if model.kind == "heat":
        return 0.0
    if model.kind == "burgers":
        return float(np.dot(burgers_nonlinearity(v.coeffs), v.coeffs))
    adv = ns_advection(v.spec, model.cutoff)
    return float(np.real(np.sum(np.conj(adv) * v.spec)))


def taylor_green_field(cutoff: int, amplitude: float = 1.0) -> Field2D:
    """u = A (sin 2pix cos 2piy, -cos 2pix sin 2piy); divergence-free eigenfield."""
    if cutoff < 1:
        raise ParameterError("Taylor-Green needs cutoff >= 1")
    n = 2 * cutoff + 1
    spec = np.zeros((2, n, n), dtype=np.complex128)
    q = amplitude * 0.25j
    for s1 in (1, -1):
        for s2 in (1, -1):
            spec[0, s1 + cutoff, s2 + cutoff] = -q * s1
            spec[1, s1 + cutoff, s2 + cutoff] = q * s2
    return Field2D(spec)


# ---------------------------------------------------------------------------
# hypothesis audits


def _sample_field(model: ModelSpec, rng: np.random.Generator, scale: float = 1.0):
    if model.kind == "ns2d":
        return fs.random_field_2d(model.cutoff, rng, scale=scale)
    return fs.random_field_1d(model.n_modes, rng, scale=scale)


def _pair_lhs(model: ModelSpec, t: float, v1, v2) -> float:
    """2 <A(v1) - A(v2), v1 - v2> + ||B(v1) - B(v2)||_HS^2."""
    a1 = drift_eval(model, t, v1)
    a2 = drift_eval(model, t, v2)
    if model.kind == "ns2d":
        dv = Field2D(v1.spec - v2.spec)
        da = Field2D(a1.spec - a2.spec)
    else:
        dv = Field1D(v1.coeffs - v2.coeffs)
        da = Field1D(a1.coeffs - a2.coeffs)
    b_gap = hs_norm(model.noise, v1) - hs_norm(model.noise, v2)
    return 2.0 * fs.inner_h(da, dv) + b_gap**2


def _hemicontinuity_entry(model: ModelSpec, rng: np.random.Generator,
                          n_triples: int) -> dict:
    """Continuity of s -> <A(v1 + s v2), v3> on [-1, 1].

    Jumps are separated from smooth curvature by grid refinement: the
    midpoint interpolation residual of a C^2 curve drops by about 4x when
    the spacing halves, while a jump keeps it constant.  The absolute
    floor keeps roundoff from flagging flat curves.
    """
    floor = 1e-6
    worst_ratio = 0.0
    worst_fine = 0.0
    passed = True
    grid = np.linspace(-1.0, 1.0, 401)
    for _ in range(n_triples):
        v1 = _sample_field(model, rng)
        v2 = _sample_field(model, rng)
        v3 = _sample_field(model, rng)
        vals = np.empty(grid.size)
        for i, s in enumerate(grid):
            if model.kind == "ns2d":
                probe = Field2D(v1.spec + s * v2.spec)
            else:
                probe = Field1D(v1.coeffs + s * v2.coeffs)
            vals[i] = fs.inner_h(drift_eval(model, 0.0, probe), v3)
        scale = 1.0 + np.max(np.abs(vals))
        coarse = vals[::4]
        mid_c = vals[2::4]
        res_c = np.max(np.abs(mid_c - 0.5 * (coarse[:-1] + coarse[1:])))
        fine = vals[::2]
        mid_f = vals[1::2]
        res_f = np.max(np.abs(mid_f - 0.5 * (fine[:-1] + fine[1:])))
        ok = res_f <= max(res_c / 3.0, floor * scale)
        passed = passed and ok
        worst_fine = max(worst_fine, res_f / scale)
        if res_c > 0.0:
            worst_ratio = max(worst_ratio, res_f / res_c)
    return {
        "pass": bool(passed),
        "worst_refinement_ratio": float(worst_ratio),
        "worst_residual": float(worst_fine),
        "n_triples": int(n_triples),
    }


def audit_hypotheses(model: ModelSpec, n_samples: int = 64,
                     experiment_seed: int = 0, t: float = 0.0) -> dict:
    """Numerical audit of the variational hypotheses on random fields.

    Fields are drawn with a k^-1.5 spectral envelope; every fourth pair is
    made nearly parallel to stress the monotonicity denominators.  The
    report is JSON-serializable; failed checks set ``pass`` to False.
    """
    rng = generator(experiment_seed, derived_replicate(LANE_FIELDS, 0))
    cst = model.constants
    tol = 1e-9

    h1 = _hemicontinuity_entry(model, rng, n_triples=max(4, n_samples // 16))

    mono_slack = np.inf
    mono_required = -np.inf
    mono_witness = -1
    coercivity_slack = np.inf
    coercivity_witness = -1
    growth_slack = np.inf
    growth_witness = -1
    hs_worst = 0.0

    for i in range(n_samples):
        v1 = _sample_field(model, rng)
        if i % 4 == 3:
            v2 = _perturb(model, v1, rng, 1e-4)
        else:
            v2 = _sample_field(model, rng)

        gap_sq = _gap_norm_sq(model, v1, v2)
        lhs = _pair_lhs(model, t, v1, v2)
        if model.locally_monotone:
            required = lhs / gap_sq - rho_local(model, v2)
            if required > mono_required:
                mono_required = required
                mono_witness = i
        else:
            slack = cst.K2 * gap_sq - lhs
            if slack < mono_slack:
                mono_slack = slack
                mono_witness = i

        a1 = drift_eval(model, t, v1)
        h_sq = fs.norm_h(v1) ** 2
        v_sq = fs.norm_v(v1) ** 2
        b_sq = hs_norm(model.noise, v1) ** 2
        lhs3 = 2.0 * fs.inner_h(a1, v1) + b_sq
        slack3 = (model.f_tilde - cst.theta * v_sq + cst.K3 * h_sq) - lhs3
        if slack3 < coercivity_slack:
            coercivity_slack = slack3
            coercivity_witness = i

        dual = fs.norm_vstar(a1)
        if model.locally_monotone:
            rhs4 = (model.f_tilde + cst.K4_tilde * v_sq) * (1.0 + h_sq ** (cst.beta / 2.0))
            slack4 = rhs4 - dual**2
        else:
            slack4 = (math.sqrt(model.f_tilde) + cst.K4 * math.sqrt(v_sq)) - dual
        if slack4 < growth_slack:
            growth_slack = slack4
            growth_witness = i

        hs_worst = max(hs_worst, b_sq)

    if model.locally_monotone:
        monotonicity = {
            "pass": bool(mono_required <= cst.K2_tilde + tol),
            "empirical_K2_tilde": float(mono_required),
            "declared_K2_tilde": float(cst.K2_tilde),
            "witness": int(mono_witness),
            "rho": model.local_rho,
            "rho_coefficient": float(model.rho_coefficient),
        }
    else:
        monotonicity = {
            "pass": bool(mono_slack >= -tol),
            "worst_slack": float(mono_slack),
            "declared_K2": float(cst.K2),
            "witness": int(mono_witness),
        }

    report = {
        "model": model.kind,
        "n_samples": int(n_samples),
        "experiment_seed": int(experiment_seed),
        "hemicontinuity": h1,
        "monotonicity": monotonicity,
        "coercivity": {
            "pass": bool(coercivity_slack >= -tol),
            "worst_slack": float(coercivity_slack),
            "theta": float(cst.theta),
            "f_tilde": float(model.f_tilde),
            "witness": int(coercivity_witness),
        },
        "growth": {
            "pass": bool(growth_slack >= -tol),
            "worst_slack": float(growth_slack),
            "witness": int(growth_witness),
        },
        "noise_bound": {
            "pass": bool(hs_worst <= model.noise.c_b * (1.0 + 1e-12)),
            "worst_hs_norm_sq": float(hs_worst),
            "C_B": float(model.noise.c_b),
        },
    }
    report["pass"] = all(
        report[k]["pass"]
        for k in ("hemicontinuity", "monotonicity", "coercivity", "growth",
                  "noise_bound")
    )
    return report


def _perturb(model: ModelSpec, v, rng: np.random.Generator, eps: float):
    w = _sample_field(model, rng, scale=eps)
    if model.kind == "ns2d":
        return Field2D(v.spec + w.spec)
    return Field1D(v.coeffs + w.coeffs)


def _gap_norm_sq(model: ModelSpec, v1, v2) -> float:
    if model.kind == "ns2d":
        return fs.norm_h(Field2D(v1.spec - v2.spec)) ** 2
    return fs.norm_h(Field1D(v1.coeffs - v2.coeffs)) ** 2


def nonlinearity_energy_suite(model: ModelSpec, n_fields: int,
                              experiment_seed: int = 0,
                              tol: float = 1e-10) -> dict:
    """|<F(u), u>| over seeded random fields; the drift's non-dissipative
    part is energy-neutral for every model here."""
    rng = generator(experiment_seed, derived_replicate(LANE_FIELDS, 1))
    worst = 0.0
    violations = 0
    for _ in range(n_fields):
        u = _sample_field(model, rng)
        e = abs(nonlinearity_energy(model, u))
        worst = max(worst, e)
        violations += e > tol
    return {
        "model": model.kind,
        "n_fields": int(n_fields),
        "violations": int(violations),
        "worst_energy": float(worst),
        "tolerance": float(tol),
    }


def t1_feasibility(model: ModelSpec) -> dict:
    """Structural checks behind the transport-inequality constants.

    Verifies theta * eta > K3, alpha = 2 and a nonnegative coercivity
    schedule, and reports the admissible interval for the convexity
    parameter c.
    """
    cst = model.constants
    reasons = []
    margin = cst.theta * cst.eta - cst.K3
    if margin <= 0.0:
        reasons.append(
            f"theta * eta = {cst.theta * cst.eta:.6g} does not exceed "
            f"K3 = {cst.K3:.6g}"
        )
    if cst.alpha != 2.0:
        reasons.append(f"alpha = {cst.alpha:.6g} (the constants need alpha = 2)")
    if model.f_tilde < 0.0:
        reasons.append("f_tilde is negative")
    c_max = 1.0 - cst.K3 / (cst.theta * cst.eta) if margin > 0.0 else 0.0
    return {
        "feasible": not reasons,
        "reasons": reasons,
        "theta_eta_minus_K3": float(margin),
        "c_interval": [0.0, float(c_max)],
        "model": model.kind,
    }
