"""Pseudospectral lab for the truncated cubic NLS with third-order dispersion.

Gaussian measures, flow transport of their densities, and the oracles used to
check them.
"""

from nlsflow.fourier import (
    FourierState,
    PhaseTriple,
    analyze,
    besov_norm,
    check_nonresonance,
    lp_norm,
    phase_function,
    project,
    real_inner,
    sobolev_norm,
    synthesize,
)
from nlsflow.kernels import BACKEND
from nlsflow.measures import MCReport, MeasureSpec, cutoff_indicator, sample_mu_alpha
from nlsflow.solver import ModelParams, Trajectory, evolve, exact_single_mode, linear_propagator, nonlinearity, step
from nlsflow.transport import (
    change_of_variables_oracle,
    divergence_residual,
    energy_transfer_integrand,
    flow_jacobian,
    log_weight,
    nonresonant_form,
    transport_equation_residual,
)

__version__ = "0.1.0"
