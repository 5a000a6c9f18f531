"""Counting integer k-tuples whose pairwise symplectic values fall in given intervals."""

from dataclasses import dataclass
from math import gcd
import math

import numpy as np

from .errors import CapacityError, DimensionError, FitError
from .forms import SymplecticForm

ENDPOINT_TOL = 1e-9
MAX_POINTS = 20_000_000


def ball_volume(d, r=1.0):
    return math.pi ** (d / 2) / math.gamma(d / 2 + 1) * r ** d


def growth_exponent(n, k):
    """Exponent Q = 2nk - k(k-1) of the main term T^Q."""
    return 2 * n * k - k * (k - 1)


def _check_class(dim, cls, v0, modulus):
    if cls not in ("all", "primitive", "congruence"):
        raise ValueError(f"unknown class {cls!r}")
    if cls == "congruence":
        if v0 is None or modulus is None:
            raise ValueError("congruence class needs v0 and modulus")
        v0 = [int(x) for x in v0]
        if len(v0) != dim:
            raise DimensionError("v0 has the wrong length")
        g = 0
        for x in v0:
            g = gcd(g, x)
        if gcd(g, int(modulus)) != 1:
            raise ValueError("need gcd(gcd(v0), N) = 1")
    return v0


def _progression_ball(dim, T, residues, N):
    """Integer points x with x_t == residues[t] (mod N) and |x| < T, lexicographic order."""
    T2 = float(T) * float(T)
    R = int(math.floor(T))
    pts = np.zeros((1, 0), dtype=np.int64)
    sq = np.zeros(1, dtype=np.int64)
    for t in range(dim):
        vals = np.arange(-R, R + 1, dtype=np.int64)
        vals = vals[(vals - residues[t]) % N == 0]
        new_sq = sq[:, None] + vals[None, :] ** 2
        keep = new_sq < T2
        idx_p, idx_v = np.nonzero(keep)
        pts = np.concatenate([pts[idx_p], vals[idx_v][:, None]], axis=1)
        sq = new_sq[idx_p, idx_v]
    return pts


def enum_ball(dim, T, cls="all", v0=None, modulus=None, include_zero=False, max_points=MAX_POINTS):
    """Integer vectors with |v| < T of the given class, lexicographic order.

    The zero vector is left out unless include_zero is set (it is never
    primitive and never in an admissible congruence class).
    """
    if dim < 1:
        raise DimensionError("dim must be >= 1")
    v0 = _check_class(dim, cls, v0, modulus)
    est = ball_volume(dim, T + math.sqrt(dim) / 2)
    if est > max_points:
        raise CapacityError(f"about {est:.3g} points exceed the cap {max_points}")
    if cls == "congruence":
        pts = _progression_ball(dim, T, v0, int(modulus))
        return pts
    pts = _progression_ball(dim, T, [0] * dim, 1)
    nz = np.any(pts != 0, axis=1)
    if cls == "primitive":
        g = np.gcd.reduce(np.abs(pts), axis=1)
        return pts[g == 1]
    return pts if include_zero else pts[nz]


def normalize_intervals(k, intervals):
    """Map of pair (i, j), i < j, 0-based, to an open interval (a, b)."""
    pairs = [(i, j) for i in range(k) for j in range(i + 1, k)]
    if isinstance(intervals, dict):
        out = {}
        for key, (a, b) in intervals.items():
            i, j = key
            if i > j:
                i, j, a, b = j, i, -b, -a
            out[(i, j)] = (float(a), float(b))
        missing = [p for p in pairs if p not in out]
        if missing:
            raise ValueError(f"no interval for pairs {missing}")
        iv = out
    else:
        a, b = intervals
        iv = {p: (float(a), float(b)) for p in pairs}
    for (a, b) in iv.values():
        if not a < b:
            raise ValueError("intervals must satisfy a < b")
    return iv


def _open_intervals(iv):
    """Shrink each (a, b) by a relative 1e-9 so values on an endpoint up to rounding stay outside.

    Exact zeros such as <v, 2v> come out of floating point as +-1e-16; without
    this they would leak into intervals with an endpoint at 0.
    """
    out = {}
    for key, (a, b) in iv.items():
        tol = ENDPOINT_TOL * max(1.0, abs(a), abs(b))
        out[key] = (a + tol, b - tol)
    return out


def _slab_count(form, T1, T2, lo, hi, residues, N, P1, threads=None):
    from . import _kernels

    if threads:
        import numba

        numba.set_num_threads(int(threads))
    d = form.dim
    if len(P1) == 0:
        return 0
    W = np.ascontiguousarray(P1.astype(float) @ form.gram)
    blocks, idx, mmax_all, starts = [], [], [], [0]
    T2sq = float(T2) ** 2
    for p in range(d):
        others = [t for t in range(d) if t != p]
        Q = _progression_ball(d - 1, T2, [residues[t] for t in others], N)
        r2 = (Q ** 2).sum(axis=1).astype(float)
        mm = np.floor(np.sqrt(np.maximum(T2sq - r2, 0.0)))
        # strict |v| < T2 on the pivot coordinate
        mm = np.where(mm * mm + r2 >= T2sq, mm - 1, mm)
        mm = np.where((mm + 1) ** 2 + r2 < T2sq, mm + 1, mm)
        blocks.append(Q.astype(float))
        idx.append(others)
        mmax_all.append(mm)
        starts.append(starts[-1] + len(Q))
    Qall = np.ascontiguousarray(np.concatenate(blocks, axis=0)) if d > 1 else np.zeros((0, 0))
    zero_in_class = all(r % N == 0 for r in residues)
    return int(_kernels.slab_pair_count(
        W, Qall, np.array(idx, dtype=np.int64).reshape(d, d - 1),
        np.concatenate(mmax_all), np.array(starts, dtype=np.int64),
        np.array(residues, dtype=np.float64), float(N), float(lo), float(hi), zero_in_class,
    ))


def _mobius_upto(m):
    mu = [1] * (m + 1)
    mu[0] = 0
    is_p = [True] * (m + 1)
    for p in range(2, m + 1):
        if is_p[p]:
            for q in range(p, m + 1, p):
                if q > p:
                    is_p[q] = False
                mu[q] = -mu[q]
            for q in range(p * p, m + 1, p * p):
                mu[q] = 0
    return mu


def _count_pairs(form, T, a, b, cls, v0, modulus, threads, max_points):
    d = form.dim
    if cls == "all":
        P = enum_ball(d, T, max_points=max_points)
        return _slab_count(form, T, T, a, b, [0] * d, 1, P, threads)
    if cls == "congruence":
        P = enum_ball(d, T, "congruence", v0, modulus, max_points=max_points)
        return _slab_count(form, T, T, a, b, list(v0), int(modulus), P, threads)
    # primitive pairs by Moebius inversion in both slots
    R = int(math.ceil(T))
    mu = _mobius_upto(R)
    total = 0
    for d1 in range(1, R + 1):
        if mu[d1] == 0 or T / d1 <= 1.0:
            continue
        P = enum_ball(d, T / d1, max_points=max_points)
        for d2 in range(1, R + 1):
            if mu[d2] == 0 or T / d2 <= 1.0:
                continue
            s = d1 * d2
            total += mu[d1] * mu[d2] * _slab_count(form, T / d1, T / d2, a / s, b / s, [0] * d, 1, P, threads)
    return total


def _dfs_count(P, M, k, iv):
    """Generic forward-checking count over an explicit point list."""
    Pf = np.ascontiguousarray(P, dtype=float)
    W = np.ascontiguousarray(Pf @ M)
    if k == 2:
        from . import _kernels

        (a, b), = iv.values()
        return int(_kernels.explicit_pair_count(W, Pf, a, b))
    total = 0

    def vals(i):
        return W[i] @ Pf.T  # <v_i, v_j> for all j

    def rec(level, cand):
        nonlocal total
        # cand[l] is the surviving index set for slot l >= level
        if level == k - 1:
            total += len(cand[level])
            return
        for i in cand[level]:
            row = vals(i)
            nxt = list(cand)
            ok = True
            for l in range(level + 1, k):
                a, b = iv[(level, l)]
                c = nxt[l]
                c = c[(row[c] > a) & (row[c] < b)]
                if len(c) == 0:
                    ok = False
                    break
                nxt[l] = c
            if ok:
                rec(level + 1, nxt)

    allidx = np.arange(len(P))
    rec(0, [allidx] * k)
    return total


def count_tuples(form, k, T, intervals, cls="all", v0=None, modulus=None,
                 include_zero=False, threads=None, max_points=MAX_POINTS):
    """Number of ordered k-tuples in the class with |v_i| < T and <v_i, v_j> in I_ij for i < j.

    Intervals are open, and a value within 1e-9 (relative) of an endpoint is
    treated as lying on it.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    d = form.dim
    v0 = _check_class(d, cls, v0, modulus)
    iv = _open_intervals(normalize_intervals(k, intervals))
    if k == 1:
        return len(enum_ball(d, T, cls, v0, modulus, include_zero, max_points))
    if k == 2 and not include_zero:
        (a, b), = iv.values()
        return _count_pairs(form, T, a, b, cls, v0, modulus, threads, max_points)
    P = enum_ball(d, T, cls, v0, modulus, include_zero, max_points)
    est = float(len(P)) ** 2
    if est > 50 * max_points:
        raise CapacityError(f"tuple search over {len(P)} points is beyond the cap")
    return _dfs_count(P, form.gram, k, iv)


def main_term(cg, k, intervals, T, n):
    """cg * prod(b - a) * T^Q."""
    iv = normalize_intervals(k, intervals)
    vol = 1.0
    for a, b in iv.values():
        vol *= b - a
    return cg * vol * float(T) ** growth_exponent(n, k)


def error_budget(n, k, T, S0, S):
    """S0 * T^(Q-(2n-k-1)) + sum_t S_t * T^(Q-2t), t = 1..k-1."""
    Q = growth_exponent(n, k)
    out = S0 * float(T) ** (Q - (2 * n - k - 1))
    for t, St in enumerate(S, start=1):
        out += St * float(T) ** (Q - 2 * t)
    return out


@dataclass(frozen=True)
class ExponentFit:
    slope: float
    intercept: float


def fit_exponent(T_list, counts):
    """Least-squares slope of log(count) against log(T)."""
    pts = [(float(t), float(c)) for t, c in zip(T_list, counts) if c > 0 and t > 0]
    if len(pts) < 3:
        raise FitError("need at least 3 positive counts")
    x = np.log([p[0] for p in pts])
    y = np.log([p[1] for p in pts])
    slope, intercept = np.polyfit(x, y, 1)
    return ExponentFit(float(slope), float(intercept))


def brute_force_count(form, k, T, intervals, cls="all", v0=None, modulus=None, include_zero=False):
    """Reference count from the full value matrix; only for small inputs."""
    iv = _open_intervals(normalize_intervals(k, intervals))
    P = enum_ball(form.dim, T, cls, v0, modulus, include_zero).astype(float)
    if k == 1:
        return len(P)
    V = P @ form.gram @ P.T
    V = 0.5 * (V - V.T)  # exact zeros such as <v, v> stay zero
    A = {key: ((V > a) & (V < b)).astype(np.int64) for key, (a, b) in iv.items()}
    if k == 2:
        return int(A[(0, 1)].sum())
    if k == 3:
        return int(np.einsum("ij,jk,ik->", A[(0, 1)], A[(1, 2)], A[(0, 2)]))
    raise ValueError("brute force supports k <= 3")
