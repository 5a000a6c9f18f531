"""Floating-point LLL reduction on basis columns, with the unimodular transform."""

import numpy as np

from . import _kernels  # noqa: F401  (sets the threading layer before numba loads)
from numba import njit


@njit(cache=True)
def _gso(B, Bs, mu):
    m = B.shape[1]
    for i in range(m):
        Bs[:, i] = B[:, i]
        for j in range(i):
            mu[i, j] = (B[:, i] @ Bs[:, j]) / (Bs[:, j] @ Bs[:, j])
            Bs[:, i] -= mu[i, j] * Bs[:, j]


@njit(cache=True)
def _lll(B, U, delta):
    m = B.shape[1]
    Bs = np.zeros_like(B)
    mu = np.zeros((m, m))
    _gso(B, Bs, mu)
    k = 1
    while k < m:
        for j in range(k - 1, -1, -1):
            c = np.rint(mu[k, j])
            if c != 0.0:
                B[:, k] -= c * B[:, j]
                U[:, k] -= np.int64(c) * U[:, j]
                _gso(B, Bs, mu)
        if Bs[:, k] @ Bs[:, k] >= (delta - mu[k, k - 1] ** 2) * (Bs[:, k - 1] @ Bs[:, k - 1]):
            k += 1
        else:
            for r in range(B.shape[0]):
                B[r, k - 1], B[r, k] = B[r, k], B[r, k - 1]
            for r in range(m):
                U[r, k - 1], U[r, k] = U[r, k], U[r, k - 1]
            _gso(B, Bs, mu)
            k = max(k - 1, 1)


def lll(B, delta=0.99):
    """LLL on the columns of B. Returns (reduced, U) with reduced = B @ U."""
    B = np.array(B, dtype=float, order="F")
    U = np.eye(B.shape[1], dtype=np.int64)
    _lll(B, U, float(delta))
    return np.ascontiguousarray(B), U
