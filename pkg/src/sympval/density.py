"""Constructing tuples with prescribed pairwise symplectic values.

real_solution builds real vectors v_1..v_k one at a time: v_{l+1} solves
L_l x = (xi_{1,l+1}, ..., xi_{l,l+1}) with rows v_i^T M, by least norm plus a
random kernel element so the prefix stays linearly independent.

integer_approx_search looks for integer vectors whose values are within eps of
the targets. Each level fixes the "free" coordinates of the next vector inside
a box and solves the remaining (pivot) coordinates from the linear
constraints, keeping the integer points near the real solution.
"""

from dataclasses import dataclass
from itertools import product
from fractions import Fraction
import math

import numpy as np
import scipy.linalg

from .errors import RangeError, SolveError
from .forms import pair_values, rationality_test
from .lll import lll


def check_range(n, k):
    if n < 2 or k < 2:
        raise RangeError("need n >= 2 and k >= 2")
    if n == 2 and k > 3:
        raise RangeError("for n = 2 only k in {2, 3} is covered")
    if n >= 3 and k > n + 2:
        raise RangeError(f"for n = {n} need k <= n + 2")


def target_matrix(k, targets):
    """Antisymmetric k x k matrix from a matrix or a {(i, j): xi} map (0-based, i < j)."""
    X = np.zeros((k, k))
    if isinstance(targets, dict):
        for (i, j), v in targets.items():
            X[i, j], X[j, i] = v, -v
    else:
        X = np.array(targets, dtype=float)
        if X.shape != (k, k):
            raise ValueError(f"targets must be {k}x{k}")
        X = 0.5 * (X - X.T)
    return X


@dataclass(frozen=True)
class RealSolution:
    vectors: np.ndarray
    residual: float


def real_solution(form, targets, k=None, rng=None, retries=10):
    if k is None:
        k = len(targets) if not isinstance(targets, dict) else 1 + max(j for _, j in targets)
    check_range(form.n, k)
    X = target_matrix(k, targets)
    rng = np.random.default_rng(rng)
    M = form.gram
    d = form.dim
    v = rng.standard_normal(d)
    V = [v / np.linalg.norm(v)]
    for l in range(1, k):
        L = np.array(V) @ M
        if np.linalg.matrix_rank(L) < l:
            raise SolveError("prefix became dependent")
        rhs = X[:l, l]
        x0 = np.linalg.lstsq(L, rhs, rcond=None)[0]
        K = scipy.linalg.null_space(L)
        need_indep = l + 1 < k
        for _ in range(retries):
            x = x0 + K @ rng.standard_normal(K.shape[1]) * (1.0 + np.linalg.norm(x0))
            if not need_indep or np.linalg.matrix_rank(np.array(V + [x])) == l + 1:
                break
        else:
            raise SolveError("could not keep the tuple independent")
        V.append(x)
    V = np.array(V)
    res = float(np.max(np.abs(pair_values(form, V) - X)))
    return RealSolution(V, res)


@dataclass(frozen=True)
class SearchResult:
    found: bool
    witness: tuple | None
    residual: float
    nodes: int
    best: tuple | None
    best_residual: float

    @property
    def status(self):
        return "found" if self.found else "exhausted"


class _Budget(Exception):
    pass


def _box(f, R, inner):
    """Integer points of [-R, R]^f with sup-norm > inner, in a fixed order, chunked by first coordinate."""
    if f == 0:
        if inner < 0:
            yield np.zeros((1, 0), dtype=np.int64)
        return
    rng = np.arange(-R, R + 1, dtype=np.int64)
    if f == 1:
        rest = np.zeros((1, 0), dtype=np.int64)
    else:
        rest = np.array(list(product(rng, repeat=f - 1)), dtype=np.int64)
    rest_sup = np.abs(rest).max(axis=1) if f > 1 else np.zeros(1, dtype=np.int64)
    for a in sorted(rng, key=lambda t: (abs(t), -t)):
        keep = np.maximum(abs(a), rest_sup) > inner
        if keep.any():
            yield np.concatenate([np.full((int(keep.sum()), 1), a), rest[keep]], axis=1)


class _Searcher:
    def __init__(self, form, X, eps, budget):
        self.M = form.gram
        self.d = form.dim
        self.X = X
        self.k = X.shape[0]
        self.eps = eps
        self.budget = budget
        self.nodes = 0
        self.best = None
        self.best_res = math.inf

    def tick(self, m):
        self.nodes += m
        if self.nodes >= self.budget:
            raise _Budget

    def candidates(self, prefix, R, inner):
        """Integer x with |<v_i, x> - xi_{i,l}| < eps for all prefix v_i; free part in the box shell."""
        l = len(prefix)
        L0 = np.array(prefix, dtype=float) @ self.M
        xi = self.X[:l, l]
        # reduce [I | C L^T] so rational relations among the columns of L become exact zero directions
        C = 1.0 / self.eps
        _, U = lll(np.hstack([np.eye(self.d), C * L0.T]).T)
        L = L0 @ U
        scale = np.abs(L).max()
        live = [j for j in range(self.d) if np.abs(L[:, j]).max() > 1e-9 * scale]
        _, _, perm = scipy.linalg.qr(L[:, live], pivoting=True)
        piv = np.sort(np.array(live)[perm[:l]])
        active = [j for j in live if j not in set(piv)]
        Lp = L[:, piv]
        Lf = L[:, active]
        Lp_inv = np.linalg.inv(Lp)
        half = self.eps * np.abs(Lp_inv).sum(axis=1)
        for F in _box(len(active), R, inner):
            self.tick(len(F))
            c = (xi[None, :] - F @ Lf.T) @ Lp_inv.T
            lo = np.ceil(c - half).astype(np.int64)
            hi = np.floor(c + half).astype(np.int64)
            ok = np.all(hi >= lo, axis=1)
            if not ok.any():
                self._track(F, c, active, piv, U, L0, xi)
                continue
            # expand the integer box of pivot values one coordinate at a time
            rows = np.nonzero(ok)[0]
            m = np.zeros((len(rows), 0), dtype=np.int64)
            for t in range(l):
                cnt = hi[rows, t] - lo[rows, t] + 1
                self.tick(int(cnt.sum()))
                rep = np.repeat(np.arange(len(rows)), cnt)
                offs = np.arange(cnt.sum()) - np.repeat(np.cumsum(cnt) - cnt, cnt)
                m = np.concatenate([m[rep], (lo[rows[rep], t] + offs)[:, None]], axis=1)
                rows = rows[rep]
            x = np.zeros((len(rows), self.d), dtype=np.int64)
            x[:, active] = F[rows]
            x[:, piv] = m
            x = x @ U.T
            vals = x.astype(float) @ L0.T
            good = np.all(np.abs(vals - xi[None, :]) < self.eps, axis=1)
            for row in x[good]:
                if np.any(row):
                    yield row

    def _track(self, F, c, active, piv, U, L, xi):
        # best-effort record of the nearest rounded completion
        if self.best_res <= self.eps:
            return
        x = np.zeros((len(F), self.d), dtype=np.int64)
        x[:, active] = F
        x[:, piv] = np.rint(c).astype(np.int64)
        x = x @ U.T
        res = np.abs(x.astype(float) @ L.T - xi[None, :]).max(axis=1)
        i = int(np.argmin(res))
        if res[i] < self.best_res:
            self.best_res = float(res[i])
            self.best_partial = x[i]

    def run(self, seeds, R_max):
        R_prev = -1
        R = 1
        try:
            while R <= R_max:
                for found in self._level0(seeds if R_prev < 0 else [], R, R_prev):
                    return found
                R_prev, R = R, 2 * R
        except _Budget:
            return None
        return None

    def _level0(self, seeds, R, R_prev):
        seen = set()
        firsts = [np.asarray(s, dtype=np.int64) for s in seeds]
        for F in _box(self.d, R, -1):
            firsts.extend(F)
        for v in firsts:
            key = tuple(int(t) for t in v)
            if not any(key) or key in seen:
                continue
            seen.add(key)
            self.tick(1)
            new = max(abs(t) for t in key) > R_prev
            hit = self._extend([v], R, R_prev, new)
            if hit is not None:
                yield hit
                return

    def _extend(self, prefix, R, R_prev, new):
        last = len(prefix) == self.k - 1
        inner = -1 if (new or not last) else R_prev
        for x in self.candidates(prefix, R, inner):
            if last:
                return prefix + [x]
            x_new = new or int(np.abs(x).max()) > R_prev
            hit = self._extend(prefix + [x], R, R_prev, x_new)
            if hit is not None:
                return hit
        return None


def rational_gap(form, X, eps):
    """Certified miss for exact rational forms, or None.

    Values on integer vectors lie in scale * Z, so a target farther than eps
    from that grid can never be hit. Returns the largest such distance.
    """
    if form.exact_gram is None:
        return None
    c = rationality_test(form).scale
    worst = None
    for i, j in zip(*np.triu_indices(X.shape[0], 1)):
        q = Fraction(X[i, j]) / c
        dist = float(abs(q - round(q)) * c)
        if dist >= eps and (worst is None or dist > worst):
            worst = dist
    return worst


def integer_approx_search(form, targets, eps, budget=10 ** 6, k=None, rng=None, R_max=1 << 12, seed_scales=(1, 2, 4, 8)):
    """Integer k-tuple with all pairwise values within eps of the targets, or exhaustion.

    nodes counts every candidate vector examined at any level; the search stops
    once nodes reaches the budget. The first witness in the fixed visit order is
    returned, so results are deterministic for a given rng seed.
    """
    if k is None:
        k = len(targets) if not isinstance(targets, dict) else 1 + max(j for _, j in targets)
    check_range(form.n, k)
    X = target_matrix(k, targets)
    gap = rational_gap(form, X, eps)
    if gap is not None:
        return SearchResult(False, None, math.inf, 0, None, gap)
    seeds = []
    try:
        sol = real_solution(form, X, k, rng=rng)
        for s in seed_scales:
            seeds.append(np.rint(s * sol.vectors[0]).astype(np.int64))
    except SolveError:
        pass
    S = _Searcher(form, X, float(eps), int(budget))
    hit = S.run(seeds, R_max)
    if hit is None:
        return SearchResult(False, None, math.inf, S.nodes, None, S.best_res)
    W = np.array(hit, dtype=np.int64)
    res = float(np.max(np.abs(pair_values(form, W) - X)))
    wt = tuple(tuple(int(t) for t in row) for row in W)
    return SearchResult(res < eps, wt, res, S.nodes, wt, res)


def verify_witness(form, targets, witness, eps):
    """Independent re-evaluation of the witness values."""
    W = np.array(witness, dtype=float)
    X = target_matrix(len(W), targets)
    V = W @ form.gram @ W.T
    return bool(np.all(np.abs(V - X)[np.triu_indices(len(W), 1)] < eps))
