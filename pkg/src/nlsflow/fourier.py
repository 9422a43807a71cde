"""Fourier-side representation of band-limited fields on the torus [0, 2*pi).

Convention: ``u(x) = (2*pi)**-0.5 * sum_k c[k] * exp(i*k*x)`` with ``|k| <= N``,
so that ``||u||_{L^2}^2 = sum_k |c[k]|^2`` without extra constants.
Coefficient arrays are stored in the order ``k = -N, ..., N``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

import numpy as np

SQRT_2PI = np.sqrt(2.0 * np.pi)


def wavenumbers(N: int) -> np.ndarray:
    return np.arange(-N, N + 1)


def bessel_weight(k, power: float) -> np.ndarray:
    """``<k>**power = (1 + k**2)**(power/2)``."""
    k = np.asarray(k, dtype=float)
    return (1.0 + k * k) ** (0.5 * power)


def modes_of(coeffs: np.ndarray) -> int:
    n = coeffs.shape[-1]
    if n % 2 != 1:
        raise ValueError(f"coefficient array must have odd length 2N+1, got {n}")
    return (n - 1) // 2


@dataclass(frozen=True, eq=False)
class FourierState:
    """Band-limited complex field, coefficients for ``k = -max_mode..max_mode``."""

    max_mode: int
    coeffs: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.max_mode < 0:
            raise ValueError("max_mode must be >= 0")
        c = np.array(self.coeffs, dtype=complex, copy=True).reshape(-1)
        if c.shape[0] != 2 * self.max_mode + 1:
            raise ValueError(
                f"expected {2 * self.max_mode + 1} coefficients for N={self.max_mode}, "
                f"got {c.shape[0]}"
            )
        if not np.all(np.isfinite(c)):
            raise ValueError("coefficients must be finite")
        c.flags.writeable = False
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def zeros(cls, N: int) -> "FourierState":
        return cls(N, np.zeros(2 * N + 1, dtype=complex))

    @classmethod
    def from_array(cls, coeffs) -> "FourierState":
        coeffs = np.asarray(coeffs, dtype=complex)
        return cls(modes_of(coeffs), coeffs)

    @classmethod
    def from_modes(cls, modes: Mapping[int, complex], N: int) -> "FourierState":
        c = np.zeros(2 * N + 1, dtype=complex)
        for k, value in modes.items():
            if abs(k) > N:
                raise ValueError(f"mode {k} outside band limit {N}")
            c[k + N] = value
        return cls(N, c)

    @property
    def k(self) -> np.ndarray:
        return wavenumbers(self.max_mode)

    def coeff(self, k: int) -> complex:
        if abs(k) > self.max_mode:
            return 0j
        return complex(self.coeffs[k + self.max_mode])

    def padded(self, N: int) -> "FourierState":
        """Same field viewed with band limit ``N >= max_mode`` (zero padding)."""
        if N < self.max_mode:
            raise ValueError("use project() to lower the band limit")
        return FourierState(N, pad_coeffs(self.coeffs, N))

    def __mul__(self, scalar) -> "FourierState":
        return FourierState(self.max_mode, self.coeffs * scalar)

    __rmul__ = __mul__

    def __add__(self, other: "FourierState") -> "FourierState":
        a, b = _common(self, other)
        return FourierState.from_array(a + b)

    def __sub__(self, other: "FourierState") -> "FourierState":
        a, b = _common(self, other)
        return FourierState.from_array(a - b)

    def __eq__(self, other) -> bool:
        if not isinstance(other, FourierState):
            return NotImplemented
        return self.max_mode == other.max_mode and np.array_equal(self.coeffs, other.coeffs)

    __hash__ = None


def pad_coeffs(coeffs: np.ndarray, N: int) -> np.ndarray:
    n0 = modes_of(coeffs)
    if N == n0:
        return np.array(coeffs, dtype=complex)
    out = np.zeros(coeffs.shape[:-1] + (2 * N + 1,), dtype=complex)
    out[..., N - n0 : N + n0 + 1] = coeffs
    return out


def _common(a: FourierState, b: FourierState):
    N = max(a.max_mode, b.max_mode)
    return pad_coeffs(a.coeffs, N), pad_coeffs(b.coeffs, N)


# -- transforms ---------------------------------------------------------------


def synthesize_array(coeffs: np.ndarray, grid_size: int) -> np.ndarray:
    """Grid samples for coefficient arrays of shape ``(..., 2N+1)``."""
    N = modes_of(coeffs)
    if grid_size < 2 * N + 1:
        raise ValueError(
            f"grid of {grid_size} points aliases band limit N={N}; need >= {2 * N + 1}"
        )
    k = wavenumbers(N)
    spectrum = np.zeros(coeffs.shape[:-1] + (grid_size,), dtype=complex)
    spectrum[..., k % grid_size] = coeffs
    return np.fft.ifft(spectrum, axis=-1) * (grid_size / SQRT_2PI)


def analyze_array(samples: np.ndarray, N: int) -> np.ndarray:
    M = samples.shape[-1]
    if M < 2 * N + 1:
        raise ValueError(f"{M} samples cannot resolve band limit N={N}")
    spectrum = np.fft.fft(samples, axis=-1) * (SQRT_2PI / M)
    return spectrum[..., wavenumbers(N) % M]


def synthesize(state: FourierState, grid_size: int) -> np.ndarray:
    """Samples ``u(2*pi*j/grid_size)``, ``j = 0..grid_size-1``."""
    return synthesize_array(state.coeffs, grid_size)


def analyze(samples, N: int | None = None) -> FourierState:
    """Forward transform; exact for samples of a field band-limited to N."""
    samples = np.asarray(samples, dtype=complex)
    if samples.ndim != 1:
        raise ValueError("expected a 1-d array of grid samples")
    M = samples.shape[0]
    if N is None:
        N = (M - 1) // 2
    return FourierState(N, analyze_array(samples, N))


def grid_points(grid_size: int) -> np.ndarray:
    return 2.0 * np.pi * np.arange(grid_size) / grid_size


# -- projections and multipliers ----------------------------------------------


def project_array(coeffs: np.ndarray, N: int) -> np.ndarray:
    n0 = modes_of(coeffs)
    if N >= n0:
        return np.array(coeffs, dtype=complex)
    return np.array(coeffs[..., n0 - N : n0 + N + 1], dtype=complex)


def project(state: FourierState, N: int) -> FourierState:
    """P_N: drop modes with ``|k| > N``.  The result keeps the smaller band limit."""
    if N < 0:
        raise ValueError("N must be >= 0")
    n = min(N, state.max_mode)
    return FourierState(n, project_array(state.coeffs, n))


def apply_bessel_power(state: FourierState, power: float) -> FourierState:
    return FourierState(state.max_mode, state.coeffs * bessel_weight(state.k, power))


def sobolev_norm_sq_array(coeffs: np.ndarray, s: float) -> np.ndarray:
    k = wavenumbers(modes_of(coeffs))
    return np.sum(bessel_weight(k, 2.0 * s) * np.abs(coeffs) ** 2, axis=-1)


def sobolev_norm(state: FourierState, s: float) -> float:
    return float(np.sqrt(sobolev_norm_sq_array(state.coeffs, s)))


def real_inner(a: FourierState, b: FourierState) -> float:
    """``Re (a, b)_{L^2}``; the smaller state is zero padded."""
    ca, cb = _common(a, b)
    return float(np.real(np.vdot(cb, ca)))


# -- L^p and Besov norms ------------------------------------------------------


def lp_norm_array(coeffs: np.ndarray, p: float, oversample: int = 4) -> np.ndarray:
    if p < 1:
        raise ValueError(f"L^p norm needs p >= 1, got {p}")
    if oversample < 1:
        raise ValueError("oversample must be >= 1")
    N = modes_of(coeffs)
    M = oversample * (2 * N + 1)
    u = synthesize_array(coeffs, M)
    # periodic trapezoidal rule
    integral = (2.0 * np.pi / M) * np.sum(np.abs(u) ** p, axis=-1)
    return integral ** (1.0 / p)


def lp_norm(state: FourierState, p: float, oversample: int = 4) -> float:
    return float(lp_norm_array(state.coeffs, p, oversample))


def dyadic_block_index(k) -> np.ndarray:
    """Block j of each wavenumber: j=0 for |k|<=1, else 2**(j-1) < |k| <= 2**j."""
    a = np.abs(np.asarray(k, dtype=np.int64))
    j = np.zeros(a.shape, dtype=int)
    big = a > 1
    # ceil(log2 a) == bit_length(a - 1), read off the binary exponent exactly
    j[big] = np.frexp((a[big] - 1).astype(float))[1]
    return j


def besov_norm_array(coeffs: np.ndarray, s: float, p: float, oversample: int = 4) -> np.ndarray:
    if p < 1:
        raise ValueError(f"Besov norm needs p >= 1, got {p}")
    N = modes_of(coeffs)
    blocks = dyadic_block_index(wavenumbers(N))
    total = np.zeros(coeffs.shape[:-1])
    for j in range(int(blocks.max()) + 1):
        part = np.where(blocks == j, coeffs, 0.0)
        total = total + 2.0 ** (j * s * p) * lp_norm_array(part, p, oversample) ** p
    return total ** (1.0 / p)


def besov_norm(state: FourierState, s: float, p: float, oversample: int = 4) -> float:
    """B^s_{p,p} norm with sharp dyadic Fourier blocks."""
    return float(besov_norm_array(state.coeffs, s, p, oversample))


# -- resonance algebra --------------------------------------------------------


@dataclass(frozen=True)
class PhaseTriple:
    k1: int
    k2: int
    k3: int

    @property
    def k(self) -> int:
        return self.k1 - self.k2 + self.k3

    @property
    def nonresonant(self) -> bool:
        return (self.k1 - self.k2) * (self.k3 - self.k2) != 0


def phase_function(triple: PhaseTriple, beta: float) -> float:
    """Factored resonance phase ``3 (k1-k2)(k3-k2)(k1+k3-2*beta/3)``."""
    k1, k2, k3 = triple.k1, triple.k2, triple.k3
    return 3.0 * (k1 - k2) * (k3 - k2) * (k1 + k3 - 2.0 * beta / 3.0)


def phase_function_expanded(triple: PhaseTriple, beta: float) -> float:
    """``w(k) - w(k1) + w(k2) - w(k3)`` with ``w(k) = k**3 - beta*k**2``."""
    k, k1, k2, k3 = triple.k, triple.k1, triple.k2, triple.k3
    cubic = k**3 - k1**3 + k2**3 - k3**3
    quad = k**2 - k1**2 + k2**2 - k3**2
    return float(cubic) - beta * float(quad)


def phase_times_six(triple: PhaseTriple, beta: Fraction) -> tuple[Fraction, Fraction]:
    """Exact ``6*Phi`` from the factored and the expanded forms."""
    beta = Fraction(beta)
    k, k1, k2, k3 = triple.k, triple.k1, triple.k2, triple.k3
    factored = 18 * (k1 - k2) * (k3 - k2) * (k1 + k3) - 12 * beta * (k1 - k2) * (k3 - k2)
    expanded = 6 * (k**3 - k1**3 + k2**3 - k3**3) - 6 * beta * (k**2 - k1**2 + k2**2 - k3**2)
    return Fraction(factored), Fraction(expanded)


def check_nonresonance(beta: float, tol: float = 1e-12) -> bool:
    """True unless ``2*beta/3`` is (within tol) a nonzero integer."""
    x = 2.0 * beta / 3.0
    n = round(x)
    return not (n != 0 and abs(x - n) <= tol)


def dispersion(k, beta: float) -> np.ndarray:
    """Linear frequency ``k**3 - beta*k**2``; the linear flow is ``exp(-i*w*t)``."""
    k = np.asarray(k, dtype=float)
    return k**3 - beta * k**2


def max_phase(N: int, beta: float) -> float:
    """``max |Phi|`` over triples with all of ``|k1|,|k2|,|k3|,|k| <= N``."""
    return _max_phase_cached(int(N), float(beta))


_PHASE_CACHE: dict[tuple[int, float], float] = {}


def _max_phase_cached(N: int, beta: float) -> float:
    key = (N, beta)
    if key in _PHASE_CACHE:
        return _PHASE_CACHE[key]
    if N == 0:
        value = 0.0
    elif N <= 96:
        k = wavenumbers(N)
        a = k[:, None, None] - k[None, :, None]  # k1 - k2
        b = k[None, None, :] - k[None, :, None]  # k3 - k2
        kk = a + k[None, None, :]
        c = k[:, None, None] + k[None, None, :] - 2.0 * beta / 3.0
        phi = np.abs(3.0 * a * b * c)
        value = float(np.max(np.where(np.abs(kk) <= N, phi, 0.0)))
    else:
        # crude bound: |k1-k2|, |k3-k2| <= 2N and |k1+k3-2b/3| <= 2N + |2b/3|
        value = 12.0 * N * N * (2.0 * N + abs(2.0 * beta / 3.0))
    _PHASE_CACHE[key] = value
    return value
