import numpy as np
import pytest

from conftest import random_state
from nlsflow import _kernels_py, kernels
from nlsflow.solver import cubic_array


def brute_cubic(c, N):
    out = np.zeros(2 * N + 1, dtype=complex)
    for k1 in range(-N, N + 1):
        for k2 in range(-N, N + 1):
            for k3 in range(-N, N + 1):
                k = k1 - k2 + k3
                if abs(k) <= N:
                    out[k + N] += c[k1 + N] * np.conj(c[k2 + N]) * c[k3 + N]
    return out / (2 * np.pi)


def test_python_fallback_matches_brute_force(rng):
    u = random_state(rng, 4)
    assert np.allclose(_kernels_py.direct_cubic(u.coeffs, 4), brute_cubic(u.coeffs, 4), atol=1e-14)


@pytest.mark.parametrize("N", [0, 1, 5, 12])
def test_fft_cubic_matches_direct(rng, N):
    u = random_state(rng, N)
    direct = kernels.direct_cubic(np.ascontiguousarray(u.coeffs), N)
    fft = cubic_array(u.coeffs, 4 * N + 2)
    assert np.max(np.abs(fft - direct)) <= 1e-12 * max(np.max(np.abs(direct)), 1e-300)


def test_aliased_grid_breaks_dual_path(rng):
    u = random_state(rng, 8, decay=0.0)
    direct = kernels.direct_cubic(np.ascontiguousarray(u.coeffs), 8)
    aliased = cubic_array(u.coeffs, 2 * 8 + 1)
    assert np.max(np.abs(aliased - direct)) > 1e-3 * np.max(np.abs(direct))


def test_backends_agree(rng):
    impls = kernels.backends()
    if "cython" not in impls:
        pytest.skip("compiled extension not built")
    u = random_state(rng, 6)
    c = np.ascontiguousarray(u.coeffs)
    a = impls["cython"].direct_cubic(c, 6)
    b = impls["python"].direct_cubic(c, 6)
    assert np.allclose(a, b, rtol=0, atol=1e-14)
    for r in (0.0, 0.37):
        x = impls["cython"].nonresonant_sum(c, 6, 0.8, 0.5, r)
        y = impls["python"].nonresonant_sum(c, 6, 0.8, 0.5, r)
        assert abs(x - y) <= 1e-12 * max(abs(y), 1e-300)


def test_backend_selection():
    assert kernels.BACKEND in ("cython", "python")
