"""Radon-Nikodym weight of the transported Gaussian measure and its oracles.

For the truncated flow the density of the transported cutoff measure is

    f_N(t, u0) = chi(||u0|| <= R) * exp(-int_0^t e(u_N(-r, u0)) dr),
    e(u) = Re( i P_N(|u|^2 u), D^{2 alpha} u )_{L^2}.

Because the linear part is orthogonal to ``D^{2 alpha} u``, the exponent also
equals ``(||u0||^2_{H^alpha} - ||u_N(-t,u0)||^2_{H^alpha}) / 2``.  Both values are
computed here, alongside the Jacobian-determinant form of the change of
variables and the nonresonant quadrilinear form F.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable

import numpy as np

from nlsflow import kernels
from nlsflow.fourier import (
    FourierState,
    analyze_array,
    bessel_weight,
    dispersion,
    modes_of,
    pad_coeffs,
    project_array,
    sobolev_norm_sq_array,
    synthesize_array,
    wavenumbers,
)
from nlsflow.measures import log_gaussian_density_rel
from nlsflow.solver import (
    ModelParams,
    _Stepper,
    cubic_array,
    default_grid_size,
    evolve_array,
    resolve_substeps,
    step_count,
    vector_field_array,
)

MAX_JACOBIAN_N = 8
MAX_ORACLE_N = 4
MAX_DIRECT_N = 32


# -- quadrature ---------------------------------------------------------------


def simpson(y: np.ndarray, dx: float) -> np.ndarray:
    """Composite Simpson along axis 0.  An odd interval count closes with the 3/8 rule."""
    y = np.asarray(y)
    n = y.shape[0] - 1
    if n == 0:
        return np.zeros(y.shape[1:])
    if n == 1:
        return 0.5 * dx * (y[0] + y[1])
    head = n if n % 2 == 0 else n - 3
    total = np.zeros(y.shape[1:], dtype=y.dtype)
    if head > 0:
        total = (dx / 3.0) * (y[0] + y[head] + 4.0 * y[1:head:2].sum(axis=0) + 2.0 * y[2:head:2].sum(axis=0))
    if head != n:
        a = y[head:]
        total = total + (3.0 * dx / 8.0) * (a[0] + 3.0 * a[1] + 3.0 * a[2] + a[3])
    return total


# -- integrand ----------------------------------------------------------------


def _energy_from_cubic(coeffs: np.ndarray, cubic: np.ndarray, alpha: float) -> np.ndarray:
    w = bessel_weight(wavenumbers(modes_of(coeffs)), 2.0 * alpha)
    # Re(i z) = -Im(z)
    return -np.imag(np.sum(cubic * w * np.conj(coeffs), axis=-1))


def energy_transfer_array(coeffs: np.ndarray, alpha: float, grid_size: int | None = None) -> np.ndarray:
    N = modes_of(coeffs)
    M = default_grid_size(N) if grid_size is None else grid_size
    return _energy_from_cubic(coeffs, cubic_array(coeffs, M), alpha)


def energy_transfer_integrand(state: FourierState, alpha: float, grid_size: int | None = None) -> float:
    """``e(u) = Re(i P_N(|u|^2 u), D^{2 alpha} u)``."""
    return float(energy_transfer_array(state.coeffs, alpha, grid_size))


def _backward_march(
    coeffs: np.ndarray,
    t: float,
    params: ModelParams,
    observe: Callable[[np.ndarray, np.ndarray, float], np.ndarray],
):
    """Walk u_N(-r, u0) for r from 0 to t on the integrator grid.

    ``observe(c, cubic, r)`` is evaluated at every node; returns the stacked
    observations, the final state and the signed node spacing in r.
    """
    n = step_count(t, params.step)
    m = resolve_substeps(params)
    c = project_array(np.asarray(coeffs, dtype=complex), params.N)
    if modes_of(c) < params.N:
        c = pad_coeffs(c, params.N)
    if n == 0:
        cub = cubic_array(c, params.grid_size)
        return np.asarray([observe(c, cub, 0.0)]), c, 0.0
    dr = math.copysign(params.step, t) / m
    stepper = _Stepper(params, -dr)
    values = []
    for j in range(n * m + 1):
        cub = cubic_array(c, params.grid_size) if params.nonlinear else np.zeros_like(c)
        values.append(observe(c, cub, j * dr))
        if j == n * m:
            break
        c = stepper(c, -1j * cub)
        if not np.all(np.isfinite(c)):
            raise FloatingPointError("non-finite state on the backward trajectory")
    return np.asarray(values), c, dr


# -- the weight ---------------------------------------------------------------


@dataclass(frozen=True)
class WeightResult:
    log_weight_quadrature: float
    log_weight_endpoint: float
    discrepancy: float
    cutoff_pass: bool
    t: float
    alpha: float

    @property
    def weight(self) -> float:
        """``f_N = chi * exp(log weight)`` using the quadrature value."""
        return math.exp(self.log_weight_quadrature) if self.cutoff_pass else 0.0


def log_weight_array(coeffs: np.ndarray, t: float, alpha: float, params: ModelParams):
    """Quadrature and endpoint log-weights for a batch ``(..., 2N+1)``.

    Returns ``(quadrature, endpoint, u_N(-t))``.
    """
    n = step_count(t, params.step)
    if n % 2:
        raise ValueError(f"t/step = {n} must be even for Simpson quadrature")
    es, final, dr = _backward_march(
        coeffs, t, params, lambda c, cub, r: _energy_from_cubic(c, cub, alpha)
    )
    quad = -simpson(es, dr)
    c0 = project_array(np.asarray(coeffs, dtype=complex), params.N)
    endpoint = 0.5 * (sobolev_norm_sq_array(c0, alpha) - sobolev_norm_sq_array(final, alpha))
    return quad, endpoint, final


def log_weight(
    u0: FourierState, t: float, alpha: float, params: ModelParams, R: float = math.inf
) -> WeightResult:
    quad, endpoint, _ = log_weight_array(u0.coeffs, t, alpha, params)
    quad, endpoint = float(quad), float(endpoint)
    if not (math.isfinite(quad) and math.isfinite(endpoint)):
        raise FloatingPointError("non-finite log weight")
    c0 = project_array(u0.coeffs, params.N)
    inside = bool(np.sqrt(sobolev_norm_sq_array(c0, 0.0)) <= R)
    return WeightResult(quad, endpoint, abs(quad - endpoint), inside, t, alpha)


def transport_equation_residual(u0: FourierState, t: float, alpha: float, params: ModelParams) -> float:
    """``|d/dt log f_N(t) + e(u_N(-t))|`` with d/dt from differences over one step.

    Centered over ``t -/+ step`` for ``t > 0``; forward (one-sided) at ``t = 0``.
    The log weight is the running quadrature on the integrator grid.
    """
    h = params.step
    n = step_count(t, h)
    m = resolve_substeps(params)
    es, _, dr = _backward_march(
        u0.coeffs, t + h, params, lambda c, cub, r: _energy_from_cubic(c, cub, alpha)
    )
    node = n * m  # index of r = t

    def logf(j):
        return -float(simpson(es[: j + 1], dr))

    if n == 0:
        deriv = (logf(m) - logf(0)) / h
    else:
        deriv = (logf(node + m) - logf(node - m)) / (2.0 * h)
    return abs(deriv + float(es[node]))


# -- the nonresonant quadrilinear form ------------------------------------------


def _resonant_part(coeffs: np.ndarray) -> np.ndarray:
    """Contribution of the planes k1=k2 and k2=k3 to the cubic coefficients."""
    mass = sobolev_norm_sq_array(coeffs, 0.0)[..., None]
    return (2.0 * mass * coeffs - np.abs(coeffs) ** 2 * coeffs) / (2.0 * np.pi)


def nonresonant_integrand_fft(coeffs: np.ndarray, cubic: np.ndarray, alpha: float) -> np.ndarray:
    w = bessel_weight(wavenumbers(modes_of(coeffs)), 2.0 * alpha)
    return np.imag(np.sum((cubic - _resonant_part(coeffs)) * w * np.conj(coeffs), axis=-1))


def nonresonant_integrand_direct(coeffs: np.ndarray, r: float, alpha: float, beta: float) -> float:
    """Direct sum at ``u_N(-r)`` in interaction variables ``v = exp(i s w) u`` (s = -r)."""
    N = modes_of(coeffs)
    v = np.ascontiguousarray(coeffs * np.exp(-1j * r * dispersion(wavenumbers(N), beta)))
    return float(np.imag(kernels.nonresonant_sum(v, N, alpha, beta, r)))


def nonresonant_form(
    u0: FourierState, T: float, alpha: float, params: ModelParams, method: str = "direct"
) -> float:
    """F(u_N): time integral over [0, T] of the nonresonant quadrilinear sum.

    ``direct`` enumerates the nonresonant triples with the phases exp(-i r Phi);
    ``fft`` takes the full cubic term and removes the resonant planes.
    """
    if method == "direct":
        if params.N > MAX_DIRECT_N:
            raise ValueError(f"direct evaluation limited to N <= {MAX_DIRECT_N}")
        if params.N == 0:
            return 0.0

        def observe(c, cub, r):
            return nonresonant_integrand_direct(c, r, alpha, params.beta)

    elif method == "fft":

        def observe(c, cub, r):
            return nonresonant_integrand_fft(c, cub, alpha)

    else:
        raise ValueError(f"unknown method {method!r}")
    vals, _, dr = _backward_march(u0.coeffs, T, params, observe)
    return float(simpson(vals, dr))


def resonance_removal_residual(state: FourierState, alpha: float, grid_size: int | None = None) -> float:
    """``|Im(|u|^2 u, D^{2a} u) - Im((|u|^2 - ||u||^2/pi) u, D^{2a} u)|`` on the grid."""
    c = state.coeffs
    N = state.max_mode
    M = default_grid_size(N) if grid_size is None else grid_size
    u = synthesize_array(c, M)
    wc = c * bessel_weight(state.k, 2.0 * alpha)
    mass = float(sobolev_norm_sq_array(c, 0.0))
    full = np.imag(np.vdot(wc, analyze_array(np.abs(u) ** 2 * u, N)))
    removed = np.imag(np.vdot(wc, analyze_array((np.abs(u) ** 2 - mass / np.pi) * u, N)))
    return float(abs(full - removed))


def linear_orthogonality_residual(state: FourierState, alpha: float, beta: float = 0.0) -> float:
    """``|Re(D^{2a} u, -i(i d^3 + beta d^2) u)|`` in modal form."""
    c = state.coeffs
    lin = -1j * dispersion(state.k, beta) * c
    return float(abs(np.real(np.vdot(lin, bessel_weight(state.k, 2.0 * alpha) * c))))


# -- Jacobians and divergence ---------------------------------------------------


@dataclass
class JacobianReport:
    dimension: int
    det: float
    max_div_residual: float
    method: str
    matrix: np.ndarray

    def __repr__(self):
        return (
            f"JacobianReport(dimension={self.dimension}, det={self.det!r}, "
            f"max_div_residual={self.max_div_residual!r}, method={self.method!r})"
        )


def to_real(coeffs: np.ndarray) -> np.ndarray:
    """Real coordinates ``(Re c, Im c)`` along the last axis."""
    return np.concatenate([coeffs.real, coeffs.imag], axis=-1)


def from_real(x: np.ndarray) -> np.ndarray:
    d = x.shape[-1] // 2
    return x[..., :d] + 1j * x[..., d:]


def _real_basis(N: int) -> np.ndarray:
    d = 2 * N + 1
    return from_real(np.eye(2 * d))


def _tangent_rhs(params: ModelParams):
    N, M = params.N, params.grid_size

    def rhs(X):
        U = synthesize_array(X[0], M)
        W = synthesize_array(X[1:], M)
        out = np.empty_like(X)
        a2 = np.abs(U) ** 2
        out[0] = -1j * analyze_array(a2 * U, N)
        out[1:] = -1j * analyze_array(2.0 * a2 * W + U**2 * np.conj(W), N)
        return out

    return rhs


def _variational_jacobian(c0: np.ndarray, t: float, params: ModelParams) -> np.ndarray:
    n = step_count(t, params.step)
    m = resolve_substeps(params)
    X = np.vstack([c0[None, :], _real_basis(params.N)])
    if n:
        h = math.copysign(params.step, t) / m
        rhs = _tangent_rhs(params) if params.nonlinear else (lambda X: np.zeros_like(X))
        stepper = _Stepper(params, h, rhs=rhs)
        for _ in range(n * m):
            X = stepper(X)
    return to_real(X[1:]).T


def _fd_jacobian(c0: np.ndarray, t: float, params: ModelParams, eps: float) -> np.ndarray:
    x0 = to_real(c0)
    D = x0.size
    plus = from_real(x0[None, :] + eps * np.eye(D))
    minus = from_real(x0[None, :] - eps * np.eye(D))
    fp = to_real(evolve_array(plus, t, params))
    fm = to_real(evolve_array(minus, t, params))
    return ((fp - fm) / (2.0 * eps)).T


def flow_jacobian(
    u0: FourierState, t: float, params: ModelParams, method: str = "variational", eps: float = 1e-5
) -> JacobianReport:
    """Jacobian of ``u0 -> u_N(t, u0)`` in real coordinates ``(Re c, Im c)``."""
    if params.N > MAX_JACOBIAN_N:
        raise ValueError(f"dense Jacobians limited to N <= {MAX_JACOBIAN_N}")
    c0 = project_array(u0.coeffs, params.N)
    c0 = pad_coeffs(c0, params.N) if modes_of(c0) < params.N else c0
    if method == "variational":
        J = _variational_jacobian(c0, t, params)
    elif method == "finite_difference":
        J = _fd_jacobian(c0, t, params, eps)
    else:
        raise ValueError(f"unknown method {method!r}")
    sign, logdet = np.linalg.slogdet(J)
    det = float(sign * math.exp(logdet))
    div = divergence_residual(FourierState(params.N, c0), params)
    return JacobianReport(J.shape[0], det, div, method, J)


def divergence_residual(u0: FourierState, params: ModelParams, increment: float = 1e-5) -> float:
    """Central-difference divergence of the full vector field in real coordinates."""
    if params.N > MAX_JACOBIAN_N:
        raise ValueError(f"divergence limited to N <= {MAX_JACOBIAN_N}")
    c0 = project_array(u0.coeffs, params.N)
    c0 = pad_coeffs(c0, params.N) if modes_of(c0) < params.N else c0
    x0 = to_real(c0)
    D = x0.size
    eye = np.eye(D)
    bp = to_real(vector_field_array(from_real(x0 + increment * eye), params))
    bm = to_real(vector_field_array(from_real(x0 - increment * eye), params))
    div = np.sum(np.diag(bp - bm)) / (2.0 * increment)
    return float(abs(div))


# -- change of variables --------------------------------------------------------


@dataclass
class ChangeOfVariablesReport:
    log_quadrature: float
    log_endpoint: float
    log_jacobian_density: float
    det: float
    max_gap: float


def change_of_variables_oracle(
    u0: FourierState, t: float, alpha: float, params: ModelParams
) -> ChangeOfVariablesReport:
    """Compare the weight formulas with ``|det DPhi_t|^{-1} G(Phi_t^{-1} u0) / G(u0)``.

    ``Phi_t^{-1} u0 = u_N(-t, u0)``; the determinant is taken at that point.
    """
    if params.N > MAX_ORACLE_N:
        raise ValueError(f"change-of-variables oracle limited to N <= {MAX_ORACLE_N}")
    w = log_weight(u0, t, alpha, params)
    c0 = pad_coeffs(project_array(u0.coeffs, params.N), params.N)
    back = evolve_array(c0, -t, params)
    jac = flow_jacobian(FourierState(params.N, back), t, params, method="variational")
    log_cov = (
        -math.log(abs(jac.det))
        + log_gaussian_density_rel(FourierState(params.N, back), alpha)
        - log_gaussian_density_rel(FourierState(params.N, c0), alpha)
    )
    logs = [w.log_weight_quadrature, w.log_weight_endpoint, log_cov]
    gap = max(abs(a - b) for a in logs for b in logs)
    return ChangeOfVariablesReport(logs[0], logs[1], logs[2], jac.det, gap)


# -- convergence in N -------------------------------------------------------------


@dataclass
class FormConvergenceRow:
    N: int
    F: float
    difference: float  # |F(u_N) - F(u_{N_prev})|, nan for the first row


def form_convergence_study(
    u0: FourierState,
    T: float,
    alpha: float,
    N_list,
    params: ModelParams,
    method: str = "fft",
) -> list[FormConvergenceRow]:
    """F(u_N) for ascending N; ``params`` supplies beta and the step."""
    N_list = list(N_list)
    if N_list != sorted(N_list):
        raise ValueError("N_list must be ascending")
    rows = []
    prev = None
    for N in N_list:
        p = replace(params, N=N, grid_size=None)
        data = u0.padded(max(N, u0.max_mode))
        F = nonresonant_form(data, T, alpha, p, method=method)
        diff = float("nan") if prev is None else abs(F - prev)
        rows.append(FormConvergenceRow(N, F, diff))
        prev = F
    return rows


def smoothing_ratios(
    coeffs: np.ndarray, T: float, alpha: float, params: ModelParams, s: float
) -> np.ndarray:
    """``|F(u_N)| / ||P_N u0||_{H^s}^3`` for a batch of initial data."""
    c0 = pad_coeffs(project_array(coeffs, params.N), params.N)
    vals, _, dr = _backward_march(
        c0, T, params, lambda c, cub, r: nonresonant_integrand_fft(c, cub, alpha)
    )
    F = simpson(vals, dr)
    return np.abs(F) / np.sqrt(sobolev_norm_sq_array(c0, s)) ** 3
