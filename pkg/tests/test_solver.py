import math
from dataclasses import replace

import numpy as np
import pytest

from conftest import random_state
from nlsflow.fourier import FourierState, max_phase, sobolev_norm
from nlsflow.solver import (
    PHASE_CFL,
    ModelParams,
    evolve,
    evolve_array,
    exact_single_mode,
    linear_propagator,
    nonlinearity,
    resolve_substeps,
    self_convergence_report,
    step,
    step_count,
)


def test_params_validation():
    with pytest.raises(ValueError):
        ModelParams(0.5, 4, 0.0)
    with pytest.raises(ValueError):
        ModelParams(0.5, 4, 1e-3, grid_size=17)
    with pytest.raises(ValueError):
        ModelParams(0.5, 4, 1e-3, substeps=0)
    assert ModelParams(0.5, 4, 1e-3).grid_size == 18


def test_step_count():
    assert step_count(0.5, 1e-3) == 500
    assert step_count(-0.3, 0.01) == 30
    with pytest.raises(ValueError):
        step_count(0.5, 0.3)


def test_auto_substeps_respect_phase_bound():
    p = ModelParams(0.5, 16, 5e-4)
    m = resolve_substeps(p)
    assert (p.step / m) * max_phase(16, 0.5) <= PHASE_CFL
    assert (p.step / (m - 1)) * max_phase(16, 0.5) > PHASE_CFL if m > 1 else True
    assert resolve_substeps(replace(p, substeps=3)) == 3
    assert resolve_substeps(replace(p, nonlinear=False)) == 1


def test_zero_state_is_fixed():
    p = ModelParams(0.5, 4, 0.01)
    u = FourierState.zeros(4)
    assert evolve(u, 0.2, p).last == u
    assert np.all(step(u, 0.01, p).coeffs == 0)


def test_linear_flow_is_exact_and_unitary(rng):
    u = random_state(rng, 6)
    p = ModelParams(0.5, 6, 0.01, nonlinear=False)
    out = evolve(u, 0.3, p).last
    ref = linear_propagator(u, 0.3, 0.5)
    assert np.max(np.abs(out.coeffs - ref.coeffs)) < 1e-13
    assert sobolev_norm(ref, 0) == pytest.approx(sobolev_norm(u, 0), rel=1e-14)


@pytest.mark.parametrize("k", [0, 1, -3])
def test_single_mode_exact(k):
    c = 0.7 * np.exp(0.3j)
    p = ModelParams(0.5, 8, 1e-3)
    u0 = FourierState.from_modes({k: c}, 8)
    out = evolve(u0, 1.0, p).last
    ref = exact_single_mode(c, k, 1.0, 0.5, N=8)
    assert np.max(np.abs(out.coeffs - ref.coeffs)) < 1e-8


def test_nonlinearity_is_tangent_to_sphere(rng):
    # Re(-i P_N |u|^2 u, u) = 0
    u = random_state(rng, 7)
    p = ModelParams(0.2, 7, 0.01)
    n = nonlinearity(u, p)
    assert abs(np.real(np.vdot(u.coeffs, n.coeffs))) < 1e-13


def test_time_reversibility(rng):
    u = random_state(rng, 6)
    p = ModelParams(0.5, 6, 2e-3)
    fwd = evolve(u, 0.2, p).last
    back = evolve(fwd, -0.2, p).last
    assert np.max(np.abs(back.coeffs - u.coeffs)) < 1e-9


def test_fourth_order_in_time(rng):
    u = random_state(rng, 4)
    p = ModelParams(0.5, 4, 0.02, substeps=4)
    rep = self_convergence_report(u, 0.4, p)
    assert 3.6 < rep.observed_order < 4.4


def test_band_limit_doubling_decreases(rng):
    u = FourierState.from_array(
        [np.exp(-abs(k)) * (1 + 0.5j) for k in range(-32, 33)]
    )
    p = ModelParams(0.5, 8, 5e-3)
    rep = self_convergence_report(u, 0.1, p, N_values=[8, 16, 32])
    assert rep.N_errors[1] < rep.N_errors[0]


def test_record_and_batch(rng):
    u = random_state(rng, 3)
    v = random_state(rng, 3)
    p = ModelParams(0.5, 3, 0.01)
    traj = evolve(u, 0.1, p, record=True)
    assert len(traj.states) == 11
    assert traj.times[-1] == pytest.approx(0.1)
    batch = evolve_array(np.stack([u.coeffs, v.coeffs]), 0.1, p)
    assert np.allclose(batch[0], traj.last.coeffs, atol=1e-15)
    assert np.allclose(batch[1], evolve(v, 0.1, p).last.coeffs, atol=1e-15)


def test_projection_of_input(rng):
    u = random_state(rng, 10)
    p = ModelParams(0.5, 4, 0.01)
    assert evolve(u, 0.0, p).last.max_mode == 4


def test_conservation_short(rng):
    u = random_state(rng, 8, decay=0.8)
    p = ModelParams(0.5, 8, 1e-3)
    norms = evolve(u, 0.2, p, record=True).norms()
    assert np.max(np.abs(norms - norms[0])) / norms[0] < 1e-10


def test_nonfinite_step_rejected(rng):
    p = ModelParams(0.5, 2, 0.01)
    with pytest.raises(ValueError):
        step(random_state(rng, 2), math.inf, p)
