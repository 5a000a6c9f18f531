"""numba kernels for pair counting; pure functions over contiguous arrays."""

import os

os.environ.setdefault("NUMBA_THREADING_LAYER", "workqueue")

import numpy as np  # noqa: E402
from numba import njit, prange  # noqa: E402


@njit(cache=True)
def _first_above(c, w, lo, x0):
    # smallest integer m with c + w*m > lo, w > 0, starting near x0
    m = np.floor(x0) + 1.0
    while c + w * (m - 1.0) > lo:
        m -= 1.0
    while c + w * m <= lo:
        m += 1.0
    return m


@njit(cache=True)
def _last_below(c, w, hi, x0):
    # largest integer m with c + w*m < hi, w > 0
    m = np.ceil(x0) - 1.0
    while c + w * (m + 1.0) < hi:
        m += 1.0
    while c + w * m >= hi:
        m -= 1.0
    return m


@njit(cache=True)
def _count_progression(A, B, rho, N):
    # integers m in [A, B] with m == rho (mod N)
    if B < A:
        return 0
    hi = np.floor((B - rho) / N)
    lo = np.ceil((A - rho) / N)
    c = hi - lo + 1.0
    return int(c) if c > 0 else 0


@njit(parallel=True, cache=True)
def slab_pair_count(W, Q, Qidx, mmax, Qstart, rho, N, lo, hi, zero_in_class):
    """Count pairs (v1, v2) with lo < w(v1).v2 < hi.

    W[i] = M^T v1_i for each first vector. For every pivot p, the second vector
    ranges over (Qidx-ordered) points Q[Qstart[p]:Qstart[p+1]] of the other
    coordinates and an arithmetic progression rho[p] + N*Z in coordinate p with
    |m| <= mmax. The zero second vector is dropped when it lies in the class.
    """
    n1 = W.shape[0]
    d = W.shape[1]
    total = 0
    for i in prange(n1):
        p = 0
        best = 0.0
        for t in range(d):
            if abs(W[i, t]) > best:
                best = abs(W[i, t])
                p = t
        wp = W[i, p]
        r = rho[p]
        if wp < 0:
            wp = -wp
            r = -r
            sgn = -1.0
        else:
            sgn = 1.0
        sub = 0
        for s in range(Qstart[p], Qstart[p + 1]):
            c = 0.0
            for u in range(d - 1):
                c += W[i, Qidx[p, u]] * Q[s, u]
            A = _first_above(c, wp, lo, (lo - c) / wp)
            B = _last_below(c, wp, hi, (hi - c) / wp)
            mm = mmax[s]
            if A < -mm:
                A = -mm
            if B > mm:
                B = mm
            cnt = _count_progression(A, B, r, N)
            if zero_in_class and cnt > 0:
                allz = True
                for u in range(d - 1):
                    if Q[s, u] != 0.0:
                        allz = False
                        break
                if allz and A <= 0.0 and B >= 0.0 and lo < 0.0 < hi:
                    cnt -= 1
            sub += cnt
        total += sub
    return total


@njit(parallel=True, cache=True)
def explicit_pair_count(W, X, lo, hi):
    """Ordered pairs (i, j) of rows with lo < W[i].X[j] < hi, i == j included.

    Assumes the form is antisymmetric, so each unordered pair is evaluated once.
    """
    n = W.shape[0]
    d = W.shape[1]
    total = 0
    for i in prange(n):
        sub = 0
        for j in range(i + 1, n):
            v = 0.0
            for t in range(d):
                v += W[i, t] * X[j, t]
            if v > lo and v < hi:
                sub += 1
            if -v > lo and -v < hi:
                sub += 1
        total += sub
    if lo < 0.0 and hi > 0.0:
        total += n
    return total
