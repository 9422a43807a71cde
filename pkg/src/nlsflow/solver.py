"""Galerkin-truncated cubic NLS with third-order dispersion.

    d/dt u = -i (i d_x^3 + beta d_x^2) u - i P_N(|u|^2 u)

The linear part acts on mode k as ``exp(-i (k^3 - beta k^2) t)`` and is
integrated exactly; the cubic term is advanced with a fourth-order
integrating-factor Runge-Kutta scheme (Lawson RK4).  Array routines accept
coefficient arrays of shape ``(..., 2N+1)`` so independent samples can be
stepped together.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Iterator

import numpy as np

from nlsflow.fourier import (
    FourierState,
    analyze_array,
    dispersion,
    max_phase,
    modes_of,
    pad_coeffs,
    project_array,
    sobolev_norm_sq_array,
    synthesize_array,
    wavenumbers,
)

# Largest |h_sub * Phi| allowed by the automatic substep rule.
PHASE_CFL = 0.25


def min_alias_free_grid(N: int) -> int:
    return 4 * N + 2


def default_grid_size(N: int) -> int:
    return 4 * N + 2


@dataclass(frozen=True)
class ModelParams:
    """Dynamical system parameters.

    ``step`` is the output/quadrature spacing h.  Each step of size h is taken
    as ``substeps`` equal Lawson-RK4 stages; ``None`` picks the smallest count
    with ``(h / substeps) * max|Phi| <= PHASE_CFL``.  ``nonlinear=False``
    switches the cubic term off (linear flow only).
    """

    beta: float
    N: int
    step: float
    grid_size: int | None = None
    substeps: int | None = None
    nonlinear: bool = True

    def __post_init__(self):
        if self.N < 0:
            raise ValueError(f"N must be >= 0, got {self.N}")
        if not (self.step > 0 and math.isfinite(self.step)):
            raise ValueError(f"step must be positive and finite, got {self.step}")
        if not math.isfinite(self.beta):
            raise ValueError("beta must be finite")
        if self.grid_size is None:
            object.__setattr__(self, "grid_size", default_grid_size(self.N))
        if self.grid_size < min_alias_free_grid(self.N):
            raise ValueError(
                f"grid_size={self.grid_size} aliases the cubic term for N={self.N}; "
                f"need >= {min_alias_free_grid(self.N)}"
            )
        if self.substeps is not None and self.substeps < 1:
            raise ValueError("substeps must be >= 1")

    def with_N(self, N: int) -> "ModelParams":
        return replace(self, N=N, grid_size=None)


def resolve_substeps(params: ModelParams, h: float | None = None) -> int:
    if params.substeps is not None:
        return params.substeps
    h = params.step if h is None else h
    if not params.nonlinear:
        return 1
    return max(1, math.ceil(abs(h) * max_phase(params.N, params.beta) / PHASE_CFL))


# -- vector field -------------------------------------------------------------


def cubic_array(coeffs: np.ndarray, grid_size: int) -> np.ndarray:
    """``P_N(|u|^2 u)`` by zero-padded FFT on ``grid_size`` points."""
    N = modes_of(coeffs)
    u = synthesize_array(coeffs, grid_size)
    return analyze_array(np.abs(u) ** 2 * u, N)


def nonlinearity_array(coeffs: np.ndarray, params: ModelParams) -> np.ndarray:
    if not params.nonlinear:
        return np.zeros_like(coeffs)
    return -1j * cubic_array(coeffs, params.grid_size)


def nonlinearity(state: FourierState, params: ModelParams) -> FourierState:
    """``-i P_N(|u|^2 u)``, computed alias-free."""
    if state.max_mode != params.N:
        raise ValueError(f"state has N={state.max_mode}, params have N={params.N}")
    return FourierState(params.N, nonlinearity_array(state.coeffs, params))


def vector_field_array(coeffs: np.ndarray, params: ModelParams) -> np.ndarray:
    w = dispersion(wavenumbers(params.N), params.beta)
    return -1j * w * coeffs + nonlinearity_array(coeffs, params)


def linear_propagator_array(coeffs: np.ndarray, t: float, beta: float) -> np.ndarray:
    k = wavenumbers(modes_of(coeffs))
    return coeffs * np.exp(-1j * dispersion(k, beta) * t)


def linear_propagator(state: FourierState, t: float, beta: float) -> FourierState:
    """Exact linear flow: mode k times ``exp(-i (k^3 - beta k^2) t)``."""
    return FourierState(state.max_mode, linear_propagator_array(state.coeffs, t, beta))


# -- Lawson RK4 ----------------------------------------------------------------


class _Stepper:
    """Lawson RK4 with precomputed phase factors for a fixed substep."""

    def __init__(self, params: ModelParams, h: float, rhs=None):
        self.params = params
        self.h = h
        w = dispersion(wavenumbers(params.N), params.beta)
        self.half = np.exp(-0.5j * w * h)
        self.full = self.half * self.half
        self.rhs = rhs if rhs is not None else (lambda c: nonlinearity_array(c, params))

    def __call__(self, c: np.ndarray, a: np.ndarray | None = None) -> np.ndarray:
        h, E2, E = self.h, self.half, self.full
        f = self.rhs
        if a is None:
            a = f(c)
        b = f(E2 * (c + 0.5 * h * a))
        cc = f(E2 * c + 0.5 * h * b)
        d = f(E * c + h * E2 * cc)
        return E * c + (h / 6.0) * (E * a + 2.0 * E2 * (b + cc) + d)


def _check_finite(c: np.ndarray) -> None:
    if not np.all(np.isfinite(c)):
        raise FloatingPointError("non-finite state encountered during integration")


def step_array(coeffs: np.ndarray, h: float, params: ModelParams) -> np.ndarray:
    """One Lawson-RK4 step of size h (no substepping)."""
    if h == 0 or not math.isfinite(h):
        raise ValueError("step size must be nonzero and finite")
    _check_finite(coeffs)
    return _Stepper(params, h)(coeffs)


def step(state: FourierState, h: float, params: ModelParams) -> FourierState:
    """One Lawson-RK4 step in the interaction variable; h may be negative."""
    if state.max_mode != params.N:
        raise ValueError(f"state has N={state.max_mode}, params have N={params.N}")
    return FourierState(params.N, step_array(state.coeffs, h, params))


def step_count(t: float, h: float) -> int:
    """Number of steps of size h in t; raises unless h divides t."""
    n = t / h
    m = round(n)
    if abs(n - m) > 1e-9 * max(1.0, abs(n)):
        raise ValueError(f"step {h} does not divide t={t}")
    return int(abs(m))


def march(coeffs: np.ndarray, t: float, params: ModelParams) -> Iterator[np.ndarray]:
    """Yield the state after every integrator substep from 0 to t (sign of t honoured).

    The first yielded value is the initial state; in total
    ``step_count(t, step) * substeps + 1`` arrays are produced.
    """
    n = step_count(t, params.step)
    m = resolve_substeps(params)
    c = np.asarray(coeffs, dtype=complex)
    yield c
    if n == 0:
        return
    h = math.copysign(params.step, t) / m
    stepper = _Stepper(params, h)
    for _ in range(n * m):
        c = stepper(c)
        _check_finite(c)
        yield c


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray
    states: list = field(repr=False)
    params: ModelParams = None

    @property
    def last(self) -> FourierState:
        return self.states[-1]

    def norms(self, s: float = 0.0) -> np.ndarray:
        return np.array([np.sqrt(sobolev_norm_sq_array(u.coeffs, s)) for u in self.states])


def evolve_array(coeffs: np.ndarray, t: float, params: ModelParams, record: bool = False):
    """Final state (and, if ``record``, the list of states every ``step``)."""
    c0 = project_array(np.asarray(coeffs, dtype=complex), params.N)
    if modes_of(c0) < params.N:
        c0 = pad_coeffs(c0, params.N)
    m = resolve_substeps(params)
    kept = []
    c = c0
    for i, c in enumerate(march(c0, t, params)):
        if record and i % m == 0:
            kept.append(c)
    return (c, kept) if record else c


def evolve(u0: FourierState, t: float, params: ModelParams, record: bool = False) -> Trajectory:
    """Integrate from 0 to t (t may be negative); the initial state is P_N u0.

    Without ``record`` the trajectory holds only the initial and final states.
    """
    n = step_count(t, params.step)
    h = math.copysign(params.step, t) if n else params.step
    if record:
        _, kept = evolve_array(u0.coeffs, t, params, record=True)
        times = h * np.arange(len(kept))
    else:
        first = evolve_array(u0.coeffs, 0.0, params)
        kept = [first, evolve_array(u0.coeffs, t, params)] if n else [first]
        times = np.array([0.0, h * n]) if n else np.array([0.0])
    states = [FourierState(params.N, c) for c in kept]
    return Trajectory(times=times, states=states, params=params)


def exact_single_mode(c: complex, k: int, t: float, beta: float, N: int | None = None) -> FourierState:
    """Closed-form solution for data supported on one mode k.

    The cubic term of a single mode is ``|c|^2/(2 pi) * c``, a pure phase rotation.
    """
    N = abs(k) if N is None else N
    phase = (k**3 - beta * k**2 + abs(c) ** 2 / (2.0 * np.pi)) * t
    return FourierState.from_modes({k: c * np.exp(-1j * phase)}, N)


# -- convergence diagnostics -------------------------------------------------


@dataclass
class ConvergenceReport:
    h: float
    t: float
    s: float
    substeps: int
    time_errors: list[float]  # ||u_h - u_{h/2}||, ||u_{h/2} - u_{h/4}||
    observed_order: float
    N_values: list[int]
    N_errors: list[float]  # ||u_{2N} - u_N||_{H^s} per consecutive pair


def self_convergence_report(
    u0: FourierState,
    t: float,
    params: ModelParams,
    s: float = 0.0,
    N_values: tuple[int, ...] | None = None,
) -> ConvergenceReport:
    """Step-halving and band-limit-doubling errors in H^s.

    Time errors use a fixed substep count so the integrator step truly halves.
    """
    m = resolve_substeps(params)
    base = replace(params, substeps=m)
    sols = []
    for factor in (1, 2, 4):
        p = replace(base, step=params.step / factor)
        sols.append(evolve_array(u0.coeffs, t, p))
    e1 = float(np.sqrt(sobolev_norm_sq_array(sols[0] - sols[1], s)))
    e2 = float(np.sqrt(sobolev_norm_sq_array(sols[1] - sols[2], s)))
    if e1 > 0 and e2 > 0:
        order = math.log2(e1 / e2)
    else:
        order = float("nan")

    N_values = list(N_values) if N_values else [params.N, 2 * params.N, 4 * params.N]
    finals = []
    for n in N_values:
        p = replace(params, N=n, grid_size=None)
        finals.append(evolve_array(u0.padded(max(n, u0.max_mode)).coeffs, t, p))
    N_errors = []
    for a, b in zip(finals, finals[1:]):
        nb = modes_of(b)
        N_errors.append(float(np.sqrt(sobolev_norm_sq_array(b - pad_coeffs(a, nb), s))))
    return ConvergenceReport(
        h=params.step,
        t=t,
        s=s,
        substeps=m,
        time_errors=[e1, e2],
        observed_order=order,
        N_values=N_values,
        N_errors=N_errors,
    )
