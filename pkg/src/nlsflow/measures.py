"""Gaussian measures mu_alpha and their (2N+1)-mode marginals.

A sample has coefficients ``g_k / <k>**alpha`` with Re g_k, Im g_k independent
N(0, 1), so ``E|c_k|^2 = 2 <k>**(-2 alpha)``.  This matches the density
``exp(-||u||_{H^alpha}^2 / 2)`` against Lebesgue measure on the modes.

Each sample is a pure function of ``(seed, index)``: its normal draws come from
``SeedSequence(seed, spawn_key=(index,))``.  Modes are filled in the order
0, 1, -1, 2, -2, ... so a sample at band limit N is the projection of the
sample with the same (seed, index) at any larger band limit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from nlsflow.fourier import (
    FourierState,
    bessel_weight,
    sobolev_norm,
    sobolev_norm_sq_array,
    wavenumbers,
)


@dataclass(frozen=True)
class MeasureSpec:
    alpha: float
    N: int
    R: float = math.inf
    seed: int = 0

    def __post_init__(self):
        if not self.alpha > 0.5:
            raise ValueError(f"alpha must exceed 1/2, got {self.alpha}")
        if not self.R > 0:
            raise ValueError(f"cutoff radius must be positive, got {self.R}")
        if self.N < 0:
            raise ValueError("N must be >= 0")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be an unsigned 64-bit integer")


@dataclass(frozen=True)
class MCReport:
    estimate: float
    std_error: float
    n_samples: int
    seed: int
    rejected_fraction: float = 0.0

    def __post_init__(self):
        if self.std_error < 0:
            raise ValueError("std_error must be >= 0")
        if not 0.0 <= self.rejected_fraction <= 1.0:
            raise ValueError("rejected_fraction must lie in [0, 1]")


def _fill_order(N: int) -> np.ndarray:
    """Array positions (k + N) in the order k = 0, 1, -1, 2, -2, ..."""
    order = [N]
    for k in range(1, N + 1):
        order += [N + k, N - k]
    return np.array(order)


def _sample_generator(seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(index,)))


def standard_complex_normals(seed: int, index: int, N: int) -> np.ndarray:
    """The g_k of sample ``index``, array order k = -N..N."""
    z = _sample_generator(seed, index).standard_normal(2 * (2 * N + 1))
    g = np.empty(2 * N + 1, dtype=complex)
    g[_fill_order(N)] = z[0::2] + 1j * z[1::2]
    return g


def sample_coeffs(spec: MeasureSpec, indices) -> np.ndarray:
    """Stacked samples, shape ``(len(indices), 2N+1)``."""
    indices = np.atleast_1d(np.asarray(indices, dtype=np.int64))
    scale = bessel_weight(wavenumbers(spec.N), -spec.alpha)
    out = np.empty((indices.size, 2 * spec.N + 1), dtype=complex)
    for row, index in enumerate(indices):
        out[row] = standard_complex_normals(spec.seed, int(index), spec.N)
    return out * scale


def sample_mu_alpha(spec: MeasureSpec, index: int) -> FourierState:
    return FourierState(spec.N, sample_coeffs(spec, [index])[0])


def cutoff_indicator(state: FourierState, R: float) -> bool:
    return sobolev_norm(state, 0.0) <= R


def cutoff_mask(coeffs: np.ndarray, R: float) -> np.ndarray:
    return np.sqrt(sobolev_norm_sq_array(coeffs, 0.0)) <= R


def log_gaussian_density_rel(state: FourierState, alpha: float) -> float:
    """``-||u||_{H^alpha}^2 / 2`` (normalisation constant dropped)."""
    return -0.5 * float(sobolev_norm_sq_array(state.coeffs, alpha))


@dataclass
class CovarianceReport:
    modes: np.ndarray
    expected: np.ndarray
    reports: list[MCReport]
    z_scores: np.ndarray
    flagged: list[int]
    threshold: float = 5.0

    @property
    def ok(self) -> bool:
        return not self.flagged


def empirical_covariance_report(
    spec: MeasureSpec, n: int, threshold: float = 5.0, batch: int = 20000
) -> CovarianceReport:
    """Per-mode Monte Carlo estimates of ``E|c_k|^2`` against ``2 <k>^(-2 alpha)``."""
    if n < 100:
        raise ValueError(f"need at least 100 samples, got {n}")
    k = wavenumbers(spec.N)
    total = np.zeros(k.size)
    total_sq = np.zeros(k.size)
    inside = 0
    for start in range(0, n, batch):
        c = sample_coeffs(spec, np.arange(start, min(n, start + batch)))
        m2 = np.abs(c) ** 2
        total += m2.sum(axis=0)
        total_sq += (m2**2).sum(axis=0)
        inside += int(cutoff_mask(c, spec.R).sum())
    mean = total / n
    var = (total_sq - n * mean**2) / (n - 1)
    se = np.sqrt(np.maximum(var, 0.0) / n)
    expected = 2.0 * bessel_weight(k, -2.0 * spec.alpha)
    z = (mean - expected) / se
    rejected = 1.0 - inside / n
    reports = [
        MCReport(float(mu), float(s), n, spec.seed, rejected) for mu, s in zip(mean, se)
    ]
    flagged = [int(kk) for kk, zz in zip(k, z) if abs(zz) > threshold]
    return CovarianceReport(k, expected, reports, z, flagged, threshold)
