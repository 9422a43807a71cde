"""Pure-Python (numpy) versions of the compiled kernels, same signatures."""

from functools import lru_cache

import numpy as np


@lru_cache(maxsize=32)
def _triples(N: int, nonresonant_only: bool):
    k = np.arange(-N, N + 1)
    k1, k2, k3 = (a.ravel() for a in np.meshgrid(k, k, k, indexing="ij"))
    kk = k1 - k2 + k3
    keep = np.abs(kk) <= N
    if nonresonant_only:
        keep &= (k1 != k2) & (k3 != k2)
    return k1[keep], k2[keep], k3[keep], kk[keep]


def direct_cubic(c, N):
    c = np.asarray(c, dtype=complex)
    if c.shape[0] != 2 * N + 1:
        raise ValueError("coefficient length does not match N")
    k1, k2, k3, kk = _triples(N, False)
    terms = c[k1 + N] * np.conj(c[k2 + N]) * c[k3 + N]
    out = np.zeros(2 * N + 1, dtype=complex)
    np.add.at(out, kk + N, terms)
    return out / (2.0 * np.pi)


def nonresonant_sum(v, N, alpha, beta, r):
    v = np.asarray(v, dtype=complex)
    if v.shape[0] != 2 * N + 1:
        raise ValueError("coefficient length does not match N")
    k1, k2, k3, kk = _triples(N, True)
    phi = 3.0 * (k1 - k2) * (k3 - k2) * (k1 + k3 - 2.0 * beta / 3.0)
    weight = (1.0 + kk.astype(float) ** 2) ** alpha
    terms = v[k1 + N] * np.conj(v[k2 + N]) * v[k3 + N] * np.conj(v[kk + N]) * weight
    return complex(np.sum(terms * np.exp(-1j * r * phi)) / (2.0 * np.pi))
