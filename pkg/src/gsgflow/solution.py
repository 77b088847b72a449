"""Exact solution fields for start-up rotation of a generalized second
grade fluid in an annulus: velocity, shear stress, the beta = 1 closed
forms, the Newtonian limit and the inner-cylinder-at-rest case.

The velocity is a steady t-linear profile minus pi * sum over radial
modes, each mode weighted by a wall cross-product and a time kernel.
Kernels can be evaluated three ways (double power series, G-function
series, numerical Laplace inversion); they agree where they all converge
and the series routes refuse loudly where double precision cannot carry
the cancellation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .controls import SeriesControls, Strategy
from .eigenvalues import EigenvalueSet
from .errors import ContractError, DomainError, GeometryError, NonConvergenceError, ModeEvaluationError
from .laplace import ModeTransform, invert_mode_stress_kernel, invert_mode_velocity_kernel
from .special import (
    CANCELLATION_LIMIT,
    GFunctionArgs,
    SignedLogAccumulator,
    cross_b,
    cross_b1,
    g_function,
)

_DEFAULT_CONTROLS = SeriesControls()

# AUTO switches from the power series to Laplace inversion above this order:
# as beta -> 1 the series parameter a = 1 - beta degenerates.
_AUTO_SERIES_BETA_MAX = 0.9


@dataclass(frozen=True)
class FluidParams:
    """Material constants; nu and alpha are always derived, never stored."""

    mu: float
    alpha1: float
    rho: float
    beta: float

    def __post_init__(self):
        if self.mu <= 0.0:
            raise ValueError("mu must be > 0")
        if self.rho <= 0.0:
            raise ValueError("rho must be > 0")
        if self.alpha1 < 0.0:
            raise ValueError("alpha1 must be >= 0")
        if not 0.0 < self.beta <= 1.0:
            raise ValueError("beta must lie in (0, 1]")

    @property
    def nu(self) -> float:
        return self.mu / self.rho

    @property
    def alpha(self) -> float:
        return self.alpha1 / self.rho


@dataclass(frozen=True)
class AnnulusGeometry:
    """Radii and angular accelerations; counter-rotation is allowed."""

    R1: float
    R2: float
    Omega1: float
    Omega2: float

    def __post_init__(self):
        if not (0.0 < self.R1 < self.R2):
            raise GeometryError(f"need 0 < R1 < R2, got R1={self.R1!r}, R2={self.R2!r}")


@dataclass(frozen=True)
class FieldSample:
    """One evaluated point of the flow field."""

    r: float
    t: float
    omega: float
    tau: Optional[float]
    strategy_used: str
    modes_used: int


def _check_point(geometry: AnnulusGeometry, r: float, t: float) -> None:
    if not geometry.R1 <= r <= geometry.R2:
        raise DomainError(f"r={r!r} outside annulus [{geometry.R1}, {geometry.R2}]")
    if t < 0.0:
        raise DomainError("t must be >= 0")


def _check_eigenvalues(geometry: AnnulusGeometry, eigenvalues: EigenvalueSet, n_modes: int) -> None:
    if not eigenvalues.matches(geometry.R1, geometry.R2):
        raise GeometryError(
            "eigenvalue set was computed for "
            f"(R1={eigenvalues.R1}, R2={eigenvalues.R2}) but the geometry is "
            f"(R1={geometry.R1}, R2={geometry.R2})"
        )
    if n_modes > len(eigenvalues):
        raise ValueError(
            f"controls request {n_modes} modes but only {len(eigenvalues)} "
            "eigenvalues were computed"
        )


def steady_part(geometry: AnnulusGeometry, r: float, t: float) -> float:
    """The t-linear large-time profile (first term of the velocity field)."""
    _check_point(geometry, r, t)
    R1, R2 = geometry.R1, geometry.R2
    num = geometry.Omega1 * R1**2 * (R2**2 - r**2) + geometry.Omega2 * R2**2 * (r**2 - R1**2)
    return num / ((R2**2 - R1**2) * r) * t


def mode_coefficients(geometry: AnnulusGeometry, eigenvalues: EigenvalueSet) -> np.ndarray:
    """C_n = J1(R1 r_n) [R2 Om2 J1(R1 r_n) - R1 Om1 J1(R2 r_n)]
    / [J1^2(R1 r_n) - J1^2(R2 r_n)] for every computed mode."""
    from scipy.special import j1

    rn = eigenvalues.roots
    j1a = j1(geometry.R1 * rn)
    j1b = j1(geometry.R2 * rn)
    return j1a * (geometry.R2 * geometry.Omega2 * j1a - geometry.R1 * geometry.Omega1 * j1b) / (
        j1a**2 - j1b**2
    )


# ---------------------------------------------------------------------------
# per-mode time kernels


def _velocity_kernel_beta1_series(nu_rn2: float, alpha_rn2: float, t: float,
                                  controls: SeriesControls) -> float:
    # At beta = 1 the inner j-series is geometric with ratio -alpha_rn2 and
    # diverges beyond |ratio| = 1; its binomial resummation (1+alpha_rn2)^-(k+1)
    # is exact, leaving a fast alternating k-series.
    log_nu = math.log(nu_rn2)
    log_ap1 = math.log1p(alpha_rn2)
    lt = math.log(t)
    log_tol = math.log(controls.tol_rel)
    acc = SignedLogAccumulator()
    quiet = 0
    for k in range(controls.max_terms):
        log_term = k * log_nu + (k + 1.0) * lt - math.lgamma(k + 2.0) - (k + 1.0) * log_ap1
        acc.add(log_term, 1 if k % 2 == 0 else -1)
        if log_term < acc.estimate_log() + log_tol:
            quiet += 1
            if quiet >= 3:
                break
        else:
            quiet = 0
    else:
        raise NonConvergenceError(
            "beta=1 kernel series did not converge", terms_used=len(acc)
        )
    return acc.total().to_float()


def _stress_kernel_beta1_series(nu_rn2: float, alpha_rn2: float, mu: float, alpha1: float,
                                t: float, controls: SeriesControls) -> float:
    mu_part = mu * _velocity_kernel_beta1_series(nu_rn2, alpha_rn2, t, controls)
    log_nu = math.log(nu_rn2)
    log_ap1 = math.log1p(alpha_rn2)
    lt = math.log(t)
    log_tol = math.log(controls.tol_rel)
    acc = SignedLogAccumulator()
    quiet = 0
    for k in range(controls.max_terms):
        log_term = k * log_nu + k * lt - math.lgamma(k + 1.0) - (k + 1.0) * log_ap1
        acc.add(log_term, 1 if k % 2 == 0 else -1)
        if log_term < acc.estimate_log() + log_tol:
            quiet += 1
            if quiet >= 3:
                break
        else:
            quiet = 0
    else:
        raise NonConvergenceError(
            "beta=1 kernel series did not converge", terms_used=len(acc)
        )
    return mu_part + alpha1 * acc.total().to_float()


def _series_refusal_check(alpha_rn2: float, beta: float, t: float) -> None:
    # a-priori guard: peak log term of the j-direction is ~ |d|^(1/a) * t
    a = 1.0 - beta
    if alpha_rn2 <= 1.0:
        return
    log_u = math.log(alpha_rn2) / a + math.log(t)
    if log_u > math.log(math.log(CANCELLATION_LIMIT) + 5.0 + abs(math.log(t))):
        raise NonConvergenceError(
            f"double series for alpha*rn^2={alpha_rn2:g}, beta={beta:g}, t={t:g} "
            "exceeds the double-precision cancellation budget"
        )


def _double_series_kernel(nu_rn2: float, alpha_rn2: float, beta: float, t: float,
                          controls: SeriesControls, stress: bool = False,
                          mu: float = 0.0, alpha1: float = 0.0) -> float:
    """Diagonal (by j+k) signed log-space sum of the (j,k) double series.

    Velocity terms carry t^E / Gamma(E+1) with E = (1-beta) j + k + 1; the
    stress variant replaces that factor by the two-part bracket
    mu t^E/Gamma(E+1) + alpha1 t^(E-beta)/Gamma(E+1-beta).
    """
    if beta == 1.0:
        if stress:
            return _stress_kernel_beta1_series(nu_rn2, alpha_rn2, mu, alpha1, t, controls)
        return _velocity_kernel_beta1_series(nu_rn2, alpha_rn2, t, controls)
    if alpha_rn2 > 0.0:
        _series_refusal_check(alpha_rn2, beta, t)

    a = 1.0 - beta
    log_nu = math.log(nu_rn2)
    log_al = math.log(alpha_rn2) if alpha_rn2 > 0.0 else None
    lt = math.log(t)
    log_tol = math.log(controls.tol_rel)
    log_mu = math.log(mu) if mu > 0.0 else None
    log_a1 = math.log(alpha1) if alpha1 > 0.0 else None

    acc = SignedLogAccumulator()
    quiet = 0
    terms = 0
    s = 0
    while True:
        lgs = math.lgamma(s + 1.0)
        diag_max = -math.inf
        sign = 1 if s % 2 == 0 else -1
        j_range = range(0, s + 1) if log_al is not None else (0,)
        for j in j_range:
            k = s - j
            e = a * j + k + 1.0
            log_coef = (
                k * log_nu
                + (j * log_al if j else 0.0)
                + lgs
                - math.lgamma(k + 1.0)
                - math.lgamma(j + 1.0)
            )
            if not stress:
                log_term = log_coef + e * lt - math.lgamma(e + 1.0)
                acc.add(log_term, sign)
                diag_max = max(diag_max, log_term)
            else:
                if log_mu is not None:
                    log_term = log_mu + log_coef + e * lt - math.lgamma(e + 1.0)
                    acc.add(log_term, sign)
                    diag_max = max(diag_max, log_term)
                if log_a1 is not None:
                    log_term = log_a1 + log_coef + (e - beta) * lt - math.lgamma(e + 1.0 - beta)
                    acc.add(log_term, sign)
                    diag_max = max(diag_max, log_term)
            terms += 1
        if diag_max < acc.estimate_log() + log_tol:
            quiet += 1
            if quiet >= 3:
                break
        else:
            quiet = 0
        s += 1
        if terms > controls.max_terms:
            raise NonConvergenceError(
                f"double series exceeded {controls.max_terms} terms",
                terms_used=terms,
            )
    total = acc.total()
    if acc.condition() > CANCELLATION_LIMIT:
        raise NonConvergenceError(
            "double series cancellation exceeds double precision "
            f"(condition ~ {acc.condition():.2e})",
            partial_sum=total.to_float() if total.log_magnitude < 700 else math.inf,
            terms_used=terms,
        )
    return total.to_float()


def _gseries_kernel(nu_rn2: float, alpha_rn2: float, beta: float, t: float,
                    controls: SeriesControls, stress: bool = False,
                    mu: float = 0.0, alpha1: float = 0.0) -> float:
    """Outer sum over k of (-nu_rn2)^k G-function values.

    Velocity uses G_{1-b, -1-b-kb, k+1}(-alpha_rn2, t); the stress bracket
    adds alpha1 * G_{1-b, -1-kb, k+1} for the fractional-derivative part.
    """
    a = 1.0 - beta
    log_tol = math.log(controls.tol_rel)
    acc = SignedLogAccumulator()
    quiet = 0
    sign = 1
    log_nu = math.log(nu_rn2)
    for k in range(controls.max_terms):
        g_vel = g_function(
            GFunctionArgs(a=a, b=-1.0 - beta - k * beta, c=k + 1.0, d=-alpha_rn2, t=t),
            controls,
        )
        if not stress:
            term = g_vel
        else:
            g_str = g_function(
                GFunctionArgs(a=a, b=-1.0 - k * beta, c=k + 1.0, d=-alpha_rn2, t=t),
                controls,
            )
            term = mu * g_vel + alpha1 * g_str
        if term != 0.0:
            acc.add(k * log_nu + math.log(abs(term)), sign if term > 0 else -sign)
        log_term = -math.inf if term == 0.0 else k * log_nu + math.log(abs(term))
        sign = -sign
        if log_term < acc.estimate_log() + log_tol:
            quiet += 1
            if quiet >= 3:
                break
        else:
            quiet = 0
    else:
        raise NonConvergenceError(
            f"G-series mode sum exceeded {controls.max_terms} outer terms",
            terms_used=len(acc),
        )
    total = acc.total()
    if acc.condition() > CANCELLATION_LIMIT:
        raise NonConvergenceError(
            "G-series cancellation exceeds double precision "
            f"(condition ~ {acc.condition():.2e})",
            partial_sum=total.to_float() if total.log_magnitude < 700 else math.inf,
            terms_used=len(acc),
        )
    return total.to_float()


def _mode_kernels(params: FluidParams, eigenvalues: EigenvalueSet, t: float,
                  controls: SeriesControls, stress: bool) -> tuple:
    """Evaluate the per-mode time kernels for all requested modes.

    Returns (kernels, strategy_tag). Explicit strategies raise
    ModeEvaluationError on any refusing mode; AUTO falls back per mode to
    Laplace inversion.
    """
    nu, alpha, beta = params.nu, params.alpha, params.beta
    rn2 = eigenvalues.roots[: controls.n_modes] ** 2
    kernels = np.empty(controls.n_modes)

    def laplace_one(x2):
        mt = ModeTransform(nu=nu, alpha=alpha, beta=beta, rn2=x2)
        if stress:
            return invert_mode_stress_kernel(mt, params.mu, params.alpha1, t)
        return invert_mode_velocity_kernel(mt, t)

    def series_one(x2):
        return _double_series_kernel(
            nu * x2, alpha * x2, beta, t, controls,
            stress=stress, mu=params.mu, alpha1=params.alpha1,
        )

    def gseries_one(x2):
        return _gseries_kernel(
            nu * x2, alpha * x2, beta, t, controls,
            stress=stress, mu=params.mu, alpha1=params.alpha1,
        )

    strategy = controls.strategy
    if strategy == Strategy.MODE_LAPLACE:
        for i, x2 in enumerate(rn2):
            kernels[i] = laplace_one(x2)
        return kernels, "laplace"

    if strategy in (Strategy.DOUBLE_SERIES, Strategy.G_SERIES):
        one = series_one if strategy == Strategy.DOUBLE_SERIES else gseries_one
        tag = "double-series" if strategy == Strategy.DOUBLE_SERIES else "g-series"
        for i, x2 in enumerate(rn2):
            try:
                kernels[i] = one(x2)
            except NonConvergenceError as exc:
                raise ModeEvaluationError(
                    f"mode {i + 1} ({tag}): {exc}", mode=i + 1, strategy=tag
                ) from exc
        return kernels, tag

    # AUTO
    if beta > _AUTO_SERIES_BETA_MAX:
        for i, x2 in enumerate(rn2):
            kernels[i] = laplace_one(x2)
        return kernels, "auto:laplace"
    fallbacks = 0
    for i, x2 in enumerate(rn2):
        try:
            kernels[i] = series_one(x2)
        except NonConvergenceError:
            kernels[i] = laplace_one(x2)
            fallbacks += 1
    tag = "auto:double-series" if fallbacks == 0 else "auto:double-series+laplace"
    return kernels, tag


# ---------------------------------------------------------------------------
# field evaluation


def velocity(params: FluidParams, geometry: AnnulusGeometry, eigenvalues: EigenvalueSet,
             r: float, t: float, controls: SeriesControls = _DEFAULT_CONTROLS) -> FieldSample:
    """Azimuthal velocity at one point, by the selected kernel strategy.

    t = 0 short-circuits to the exact initial condition omega = 0.
    """
    _check_point(geometry, r, t)
    _check_eigenvalues(geometry, eigenvalues, controls.n_modes)
    if t == 0.0:
        return FieldSample(r=r, t=t, omega=0.0, tau=None, strategy_used="zero-time", modes_used=0)
    kernels, tag = _mode_kernels(params, eigenvalues, t, controls, stress=False)
    omega = _assemble_velocity(geometry, eigenvalues, r, t, kernels)
    return FieldSample(r=r, t=t, omega=omega, tau=None, strategy_used=tag,
                       modes_used=controls.n_modes)


def _assemble_velocity(geometry, eigenvalues, r, t, kernels) -> float:
    n = len(kernels)
    rn = eigenvalues.roots[:n]
    coeffs = mode_coefficients(geometry, eigenvalues)[:n]
    b1 = np.array([cross_b1(r, x, geometry.R2) for x in rn])
    series = math.fsum(coeffs[i] * b1[i] * kernels[i] for i in range(n))
    return steady_part(geometry, r, t) - math.pi * series


def velocity_sg_closed(params: FluidParams, geometry: AnnulusGeometry,
                       eigenvalues: EigenvalueSet, r: float, t: float,
                       controls: SeriesControls = _DEFAULT_CONTROLS) -> FieldSample:
    """beta = 1 velocity by the closed exponential kernel.

    With alpha1 = 0 this is the Newtonian start-up solution.
    """
    if params.beta != 1.0:
        raise ContractError("velocity_sg_closed requires beta == 1")
    _check_point(geometry, r, t)
    _check_eigenvalues(geometry, eigenvalues, controls.n_modes)
    if t == 0.0:
        return FieldSample(r=r, t=t, omega=0.0, tau=None, strategy_used="closed-sg", modes_used=0)
    nu, alpha = params.nu, params.alpha
    rn2 = eigenvalues.roots[: controls.n_modes] ** 2
    kernels = np.array([-math.expm1(-nu * x2 * t / (1.0 + alpha * x2)) / (nu * x2) for x2 in rn2])
    omega = _assemble_velocity(geometry, eigenvalues, r, t, kernels)
    return FieldSample(r=r, t=t, omega=omega, tau=None, strategy_used="closed-sg",
                       modes_used=controls.n_modes)


def velocity_inner_rest(params: FluidParams, geometry: AnnulusGeometry,
                        eigenvalues: EigenvalueSet, r: float, t: float,
                        controls: SeriesControls = _DEFAULT_CONTROLS) -> FieldSample:
    """Velocity with the inner cylinder at rest (Omega1 must be 0)."""
    if geometry.Omega1 != 0.0:
        raise ContractError("velocity_inner_rest requires geometry.Omega1 == 0")
    return velocity(params, geometry, eigenvalues, r, t, controls)


def _stress_first_term(params: FluidParams, geometry: AnnulusGeometry, r: float, t: float) -> float:
    R1, R2 = geometry.R1, geometry.R2
    lead = 2.0 * R1**2 * R2**2 * (geometry.Omega2 - geometry.Omega1) / ((R2**2 - R1**2) * r**2)
    beta = params.beta
    if beta == 1.0:
        bracket = params.mu * t + params.alpha1
    else:
        bracket = params.mu * t + params.alpha1 * t ** (1.0 - beta) / math.gamma(2.0 - beta)
    return lead * bracket


def _stress_geometry_factor(geometry: AnnulusGeometry, eigenvalues: EigenvalueSet,
                            r: float, n: int) -> np.ndarray:
    rn = eigenvalues.roots[:n]
    return np.array(
        [2.0 * cross_b1(r, x, geometry.R2) / r - x * cross_b(r, x, geometry.R2) for x in rn]
    )


def shear_stress(params: FluidParams, geometry: AnnulusGeometry, eigenvalues: EigenvalueSet,
                 r: float, t: float, controls: SeriesControls = _DEFAULT_CONTROLS) -> FieldSample:
    """Shear stress tau(r, t).

    Requires t > 0 for beta < 1; at beta = 1 the t = 0 stress is finite and
    is returned through the closed exponential route.
    """
    _check_point(geometry, r, t)
    _check_eigenvalues(geometry, eigenvalues, controls.n_modes)
    if t == 0.0:
        if params.beta != 1.0:
            raise DomainError("shear stress requires t > 0 for beta < 1")
        return shear_stress_sg_closed(params, geometry, eigenvalues, r, t, controls)
    kernels, tag = _mode_kernels(params, eigenvalues, t, controls, stress=True)
    geom = _stress_geometry_factor(geometry, eigenvalues, r, controls.n_modes)
    coeffs = mode_coefficients(geometry, eigenvalues)[: controls.n_modes]
    series = math.fsum(geom[i] * coeffs[i] * kernels[i] for i in range(controls.n_modes))
    tau = _stress_first_term(params, geometry, r, t) + math.pi * series
    return FieldSample(r=r, t=t, omega=math.nan, tau=tau, strategy_used=tag,
                       modes_used=controls.n_modes)


def shear_stress_sg_closed(params: FluidParams, geometry: AnnulusGeometry,
                           eigenvalues: EigenvalueSet, r: float, t: float,
                           controls: SeriesControls = _DEFAULT_CONTROLS) -> FieldSample:
    """beta = 1 shear stress by the closed exponential kernel."""
    if params.beta != 1.0:
        raise ContractError("shear_stress_sg_closed requires beta == 1")
    _check_point(geometry, r, t)
    _check_eigenvalues(geometry, eigenvalues, controls.n_modes)
    nu, alpha = params.nu, params.alpha
    rn2 = eigenvalues.roots[: controls.n_modes] ** 2
    z = nu * rn2 * t / (1.0 + alpha * rn2)
    kernels = params.mu * (-np.expm1(-z)) / (nu * rn2) + params.alpha1 * np.exp(-z) / (1.0 + alpha * rn2)
    geom = _stress_geometry_factor(geometry, eigenvalues, r, controls.n_modes)
    coeffs = mode_coefficients(geometry, eigenvalues)[: controls.n_modes]
    series = math.fsum(geom[i] * coeffs[i] * kernels[i] for i in range(controls.n_modes))
    tau = _stress_first_term(params, geometry, r, t) + math.pi * series
    return FieldSample(r=r, t=t, omega=math.nan, tau=tau, strategy_used="closed-sg",
                       modes_used=controls.n_modes)
