"""Random unimodular lattices and their Siegel transforms.

Bases are stored as columns. ``Exact2D`` draws from the Haar probability on
SL_2(R)/SL_2(Z): tau = x + iy from the fundamental domain with density
dx dy / y^2, then a uniform rotation. ``SiegelApprox`` draws Haar-distributed
points of a Siegel set in Iwasawa coordinates for any d; the Siegel set covers
the fundamental domain with bounded multiplicity, so it is only approximately
Haar on the quotient.
"""

from dataclasses import dataclass
from fractions import Fraction
import math

import numpy as np

from .enumeration import _dfs_count
from .lll import lll
from .errors import DimensionError
from .forms import standard_J
from .regions import Product, SymplecticRegion

MODES = ("exact2d", "siegel")


@dataclass
class Lattice:
    basis: np.ndarray  # sampled basis, columns
    reduced: np.ndarray  # LLL-reduced basis, columns
    U: np.ndarray  # integer, reduced = basis @ U

    @property
    def dim(self):
        return self.basis.shape[0]


def _haar_rotation(rng, d):
    Q, R = np.linalg.qr(rng.standard_normal((d, d)))
    Q = Q * np.sign(np.diag(R))
    if np.linalg.det(Q) < 0:
        Q[:, 0] = -Q[:, 0]
    return Q


def sample_exact2d(rng):
    max_y_inv = 2 / math.sqrt(3)
    while True:
        x = rng.random() - 0.5
        y = 1.0 / (max_y_inv * (1.0 - rng.random()))  # density y^-2 on [sqrt(3)/2, inf)
        if x * x + y * y >= 1.0:
            break
    s = 1.0 / math.sqrt(y)
    B = np.array([[s, x * s], [0.0, y * s]])
    th = 2 * math.pi * rng.random()
    K = np.array([[math.cos(th), -math.sin(th)], [math.sin(th), math.cos(th)]])
    return K @ B


def sample_siegel(rng, d):
    """Haar measure restricted to the Siegel set |n_ij| <= 1/2, a_i / a_{i+1} <= 2/sqrt(3)."""
    if d < 2:
        raise DimensionError("d must be >= 2")
    tmax = math.log(2 / math.sqrt(3))
    t = np.array([tmax - rng.exponential() / (m * (d - m)) for m in range(1, d)])
    u = np.zeros(d)
    for i in range(1, d):
        u[i] = u[i - 1] - t[i - 1]
    u -= u.mean()
    a = np.exp(u)
    N = np.eye(d) + np.triu(rng.random((d, d)) - 0.5, 1)
    return _haar_rotation(rng, d) @ (a[:, None] * N)


def sample_lattice(dim, mode, rng):
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}")
    if mode == "exact2d":
        if dim != 2:
            raise DimensionError("exact2d only samples dimension 2")
        B = sample_exact2d(rng)
    else:
        B = sample_siegel(rng, dim)
    R, U = lll(B)
    return Lattice(B, R, U)


def short_vectors(lat, radius):
    """Nonzero lattice points with |x| < radius: (points, coefficients in the sampled basis).

    Fincke-Pohst on the reduced basis, vectorised level by level.
    """
    B = lat.reduced
    d = B.shape[0]
    _, R = np.linalg.qr(B)
    R2 = radius * radius * (1 + 1e-12)
    partial = np.zeros((1, 0), dtype=np.int64)
    rest = np.full(1, R2)
    for i in range(d - 1, -1, -1):
        rii = abs(R[i, i])
        cen = -(partial @ R[i, i + 1:]) / R[i, i] if partial.shape[1] else np.zeros(len(partial))
        half = np.sqrt(np.maximum(rest, 0.0)) / rii
        lo = np.ceil(cen - half).astype(np.int64)
        hi = np.floor(cen + half).astype(np.int64)
        cnt = np.maximum(hi - lo + 1, 0)
        idx = np.repeat(np.arange(len(partial)), cnt)
        offs = np.arange(cnt.sum()) - np.repeat(np.cumsum(cnt) - cnt, cnt)
        ci = lo[idx] + offs
        contrib = (R[i, i] * ci + (partial[idx] @ R[i, i + 1:] if partial.shape[1] else 0.0)) ** 2
        rest = rest[idx] - contrib
        partial = np.concatenate([ci[:, None], partial[idx]], axis=1)
        keep = rest >= -1e-12
        partial, rest = partial[keep], rest[keep]
    pts = partial.astype(float) @ B.T
    nz = np.any(partial != 0, axis=1) & (np.sum(pts * pts, axis=1) < radius * radius)
    coeff = partial[nz] @ lat.U.T  # back to the sampled basis
    return pts[nz], coeff


def class_mask(coeff, cls, v0=None, modulus=None):
    if cls == "all":
        return np.ones(len(coeff), dtype=bool)
    if cls == "primitive":
        return np.gcd.reduce(np.abs(coeff), axis=1) == 1
    if cls == "congruence":
        v0 = np.asarray(v0, dtype=np.int64)
        return np.all((coeff - v0) % int(modulus) == 0, axis=1)
    raise ValueError(f"unknown class {cls!r}")


def siegel_transform(lat, region, k=1, cls="all", v0=None, modulus=None):
    """Sum of the region indicator over k-tuples of nonzero lattice vectors of the class."""
    pts, coeff = short_vectors(lat, region.radius)
    pts = pts[class_mask(coeff, cls, v0, modulus)]
    if isinstance(region, SymplecticRegion):
        if len(pts) == 0:
            return 0
        J = standard_J(lat.dim // 2).astype(float)
        # the ball constraint is already enforced by short_vectors
        return _dfs_count(pts, J, region.k, region.intervals)
    if isinstance(region, Product):
        out = 1
        for f in region.factors:
            out *= int(f.mask(pts).sum())
        return out
    if k != 1:
        return int(region.mask(pts).sum()) ** k
    return int(region.mask(pts).sum())


@dataclass(frozen=True)
class TransformSample:
    values: np.ndarray
    mean: float
    stderr: float


def sample_transform(dim, mode, trials, region, k=1, cls="all", v0=None, modulus=None, rng=None):
    rng = np.random.default_rng(rng)
    vals = np.empty(trials, dtype=np.int64)
    for t in range(trials):
        lat = sample_lattice(dim, mode, rng)
        vals[t] = siegel_transform(lat, region, k, cls, v0, modulus)
    sd = vals.std(ddof=1) if trials > 1 else 0.0
    return TransformSample(vals, float(vals.mean()), float(sd / math.sqrt(trials)))


@dataclass(frozen=True)
class SandwichReport:
    lattices: int
    max_inequality_holds: bool  # |D2| <= max(|D1|, |D3|) + (E3 - E1) on every lattice
    two_sided_holds: bool  # D1 - (E2 - E1) <= D2 <= D3 + (E3 - E2) on every lattice
    literal_violations: int  # lattices where D2 <= max(D1, D3) fails
    means: tuple


def discrepancy_sandwich(counts1, counts2, counts3):
    """Exact check of the discrepancy bound for F1 <= F2 <= F3 on each lattice.

    Discrepancies use the empirical means (exact Fractions) as the expectation
    proxy. The uncorrected form D2 <= max(D1, D3) does not follow from the
    sandwich (take F1 = 0 and F2 = F3 large); its failures are only counted.
    """
    c = [list(map(int, x)) for x in (counts1, counts2, counts3)]
    L = len(c[0])
    if not all(len(x) == L for x in c):
        raise ValueError("count lists must have equal length")
    for a, b, d in zip(*c):
        if not a <= b <= d:
            raise ValueError("indicators are not sandwiched on this sample")
    E = [Fraction(sum(x), L) for x in c]
    maxok = twok = True
    lit = 0
    for a, b, d in zip(*c):
        D1, D2, D3 = a - E[0], b - E[1], d - E[2]
        maxok &= abs(D2) <= max(abs(D1), abs(D3)) + (E[2] - E[0])
        twok &= D1 - (E[1] - E[0]) <= D2 <= D3 + (E[2] - E[1])
        lit += not D2 <= max(D1, D3)
    return SandwichReport(L, bool(maxok), bool(twok), lit, tuple(E))
