"""Cone-integral coefficient c_g and direct Monte Carlo volumes.

The coefficient is

    c_g = int over the isotropic cone of prod_l h(w_l) * weight(w_1..w_k),
    h(w) = 1{|g^-1 w| <= 1},

where w_l ranges over W_l, the joint kernel of J w_1, ..., J w_{l-1}.
Integrating the slabs of the constraints <w_i, w_l> in I_il one at a time
gives the coarea weight prod_{l<k} vol_l(w_1..w_l)^-1, with vol_l the l-volume
of the parallelotope on w_1..w_l. That is weight="volume", the default; it is
what the lattice counts and the direct Monte Carlo volume converge to.
weight="norms" is the alternative integrand prod_{l<k} |w_l|^(k-l), kept for
comparison only.
"""

from dataclasses import dataclass
import math

import numpy as np

from .enumeration import ball_volume, growth_exponent, normalize_intervals
from .errors import DegenerateError, DimensionError, ZeroAcceptanceError
from .forms import standard_J

N_STRATA = 16
WEIGHTS = ("volume", "norms")


@dataclass(frozen=True)
class ConeSample:
    w: np.ndarray  # (k, 2n)
    weight: float


@dataclass(frozen=True)
class Estimate:
    value: float
    stderr: float
    samples: int


def cone_dims(n, k):
    return [2 * n - l + 1 for l in range(1, k + 1)]


def _kernel_basis(n, prev):
    """Orthonormal basis (columns) of the joint kernel of J w_i over the rows of prev."""
    d = 2 * n
    if len(prev) == 0:
        return np.eye(d)
    J = standard_J(n).astype(float)
    A = np.asarray(prev, float) @ J.T  # rows J w_i
    _, s, vt = np.linalg.svd(A)
    rank = int(np.sum(s > 1e-12 * max(1.0, s[0])))
    return vt[rank:].T


def _uniform_ball(rng, m, radius):
    x = rng.standard_normal(m)
    x /= np.linalg.norm(x)
    return x * radius * rng.random() ** (1.0 / m)


def _plain_weight(W, k, weight):
    out = 1.0
    for l in range(1, k):
        if weight == "norms":
            out *= np.linalg.norm(W[l - 1]) ** (k - l)
        else:
            G = W[:l] @ W[:l].T
            out /= math.sqrt(max(np.linalg.det(G), 0.0))
    return out


def sample_cone(n, k, radius, rng, weight="volume"):
    """One draw: w_l uniform in the radius-ball of W_l, with the chosen weight."""
    if weight not in WEIGHTS:
        raise ValueError(f"weight must be one of {WEIGHTS}")
    if k > n + 1:
        raise DimensionError("isotropic cone chain needs k <= n + 1")
    W = []
    for l in range(1, k + 1):
        B = _kernel_basis(n, W)
        if B.shape[1] != 2 * n - l + 1:
            raise DegenerateError("dependent cone vectors")
        W.append(B @ _uniform_ball(rng, B.shape[1], radius))
    W = np.array(W)
    return ConeSample(W, _plain_weight(W, k, weight))


def _directions(rng, size, basis_rows):
    """Gaussian directions orthogonal to the (orthonormal, batched) rows in basis_rows."""
    m, d = size
    x = rng.standard_normal((m, d))
    for e in basis_rows:
        x -= np.sum(x * e, axis=1, keepdims=True) * e
    return x / np.linalg.norm(x, axis=1, keepdims=True)


def _orthonormalize(vecs, basis_rows):
    v = vecs.copy()
    for e in basis_rows:
        v -= np.sum(v * e, axis=1, keepdims=True) * e
    nrm = np.linalg.norm(v, axis=1, keepdims=True)
    return v / nrm


def _radial_quantile(u, m, e):
    # radius in [0,1] with density proportional to r^(m-1-e)
    return u ** (1.0 / (m - e))


def _batch(rng, n, k, R, ginv, m, weight, strata_u):
    """Indicator products for one batch, plus the constant that multiplies their mean."""
    d = 2 * n
    J = standard_J(n).astype(float)
    span_w, span_jw = [], []  # orthonormal batched rows of span{w_i}, span{J w_i}
    ws = []
    const = 1.0
    for l in range(1, k + 1):
        e = k - l
        if weight == "volume" and l < k:
            # w_l = p + u with p in span{w_i, i<l} and u in W_l orthogonal to it
            mu = d - 2 * (l - 1)
            u_dir = _directions(rng, (m, d), span_w + span_jw)
            q = strata_u if l == 1 else rng.random(m)
            r = R * _radial_quantile(q, mu, e)
            const *= mu * ball_volume(mu) * R ** (mu - e) / (mu - e)
            w = u_dir * r[:, None]
            if l > 1:
                c = rng.standard_normal((m, l - 1))
                c /= np.linalg.norm(c, axis=1, keepdims=True)
                c *= R * rng.random((m, 1)) ** (1.0 / (l - 1))
                for i, b in enumerate(span_w):
                    w += c[:, i:i + 1] * b
                const *= ball_volume(l - 1, R)
        else:
            # norm weight |w_l|^e, or the unweighted last vector of either convention
            dl = d - l + 1
            if weight == "volume":
                e = 0
            u_dir = _directions(rng, (m, d), span_jw)
            q = strata_u if l == 1 else rng.random(m)
            r = R * q ** (1.0 / (dl + e))
            const *= dl * ball_volume(dl) * R ** (dl + e) / (dl + e)
            w = u_dir * r[:, None]
        ws.append(w)
        if l < k:
            span_w.append(_orthonormalize(w, span_w))
            span_jw.append(_orthonormalize(w @ J.T, span_jw))
    ind = np.ones(m, dtype=bool)
    for w in ws:
        ind &= np.sum((w @ ginv.T) ** 2, axis=1) <= 1.0
    return ind.astype(float), const


def estimate_cg(form, k, samples=10 ** 6, rng=None, weight="volume", strata=N_STRATA, batch=200_000):
    """Monte Carlo estimate of c_g for the form's matrix g (identity if only a Gram is known).

    Radii are importance sampled so the weight cancels exactly; the first radius
    is stratified into equal-probability shells. For g = I every indicator is 1
    and the estimate is exact.
    """
    if weight not in WEIGHTS:
        raise ValueError(f"weight must be one of {WEIGHTS}")
    n = form.n
    if k < 1:
        raise ValueError("k must be >= 1")
    if weight == "volume" and k > n + 1:
        raise DimensionError("the coarea weight is not integrable for k > n + 1")
    if k > 2 * n:
        raise DimensionError("k must be at most 2n")
    rng = np.random.default_rng(rng)
    g = np.eye(2 * n) if form.g is None else form.g
    ginv = np.linalg.inv(g)
    R = float(np.linalg.norm(g, 2))
    per = max(1, samples // strata)
    sums = np.zeros(strata)
    sq = np.zeros(strata)
    counts = np.zeros(strata)
    const = None
    done = 0
    while done < per:
        m = min(batch // strata + 1, per - done)
        u = (np.repeat(np.arange(strata), m) + rng.random(strata * m)) / strata
        ind, const = _batch(rng, n, k, R, ginv, strata * m, weight, u)
        ind = ind.reshape(strata, m)
        sums += ind.sum(axis=1)
        sq += (ind ** 2).sum(axis=1)
        counts += m
        done += m
    means = sums / counts
    var = np.maximum(sq / counts - means ** 2, 0.0) / np.maximum(counts - 1, 1)
    value = const * means.mean()
    stderr = const * math.sqrt(var.sum()) / strata
    return Estimate(float(value), float(stderr), int(counts.sum()))


def cg_identity(n, k, weight="volume"):
    """Exact c_I for the unit-ball indicator (R = 1, every indicator is 1)."""
    d = 2 * n
    out = 1.0
    for l in range(1, k + 1):
        e = k - l
        dl = d - l + 1
        if weight == "volume" and l < k:
            mu = d - 2 * (l - 1)
            if l > 1:
                raise ValueError("closed form only covers the first cone factor; use estimate_cg")
            out *= mu * ball_volume(mu) / (mu - e)
        elif weight == "volume":
            out *= ball_volume(dl)
        else:
            out *= dl * ball_volume(dl) / (dl + e)
    return out


def direct_volume(form, k, intervals, T, samples=10 ** 6, rng=None, batch=500_000):
    """Volume of {v in B_T^k : <v_i, v_j>^g in I_ij} by uniform sampling in B_T^k."""
    iv = normalize_intervals(k, intervals)
    rng = np.random.default_rng(rng)
    d = form.dim
    M = form.gram
    hits = 0
    done = 0
    while done < samples:
        m = min(batch, samples - done)
        X = rng.standard_normal((k, m, d))
        X /= np.linalg.norm(X, axis=2, keepdims=True)
        X *= T * rng.random((k, m, 1)) ** (1.0 / d)
        ok = np.ones(m, dtype=bool)
        for (i, j), (a, b) in iv.items():
            val = np.einsum("md,md->m", X[i] @ M, X[j])
            ok &= (val > a) & (val < b)
        hits += int(ok.sum())
        done += m
    if hits == 0:
        raise ZeroAcceptanceError("no sample landed in the region")
    p = hits / samples
    box = ball_volume(d, T) ** k
    return Estimate(p * box, box * math.sqrt(p * (1 - p) / samples), samples)


def main_volume(cg, n, k, intervals, T):
    iv = normalize_intervals(k, intervals)
    out = cg * float(T) ** growth_exponent(n, k)
    for a, b in iv.values():
        out *= b - a
    return out
