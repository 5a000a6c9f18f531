"""Rogers-formula bookkeeping: RREF terms D/q, weights c_D, admissibility, moment bounds."""

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, product
from math import comb, gcd
import math
import warnings

import numpy as np

from . import exact as xq
from .enumeration import ball_volume, growth_exponent
from .errors import DivisionError, HypothesisError, MissingVolumeError, RankError, TruncationWarning


@dataclass(frozen=True)
class RrefTerm:
    D: tuple  # r rows of k ints
    q: int

    @property
    def r(self):
        return len(self.D)

    @property
    def k(self):
        return len(self.D[0])


def _gcd_all(vals):
    g = 0
    for v in vals:
        g = gcd(g, v)
    return g


def enum_rref_terms(k, r, q, entry_bound):
    """Canonical integer D (r x k) with D/q in RREF of rank r and gcd(entries, q) = 1.

    Pivot entries equal q, pivot columns are zero off the pivot, entries left of
    each pivot vanish, and the remaining entries satisfy |entry| <= entry_bound.
    Deterministic order: pivot sets lexicographically, then free entries in
    itertools.product order over [-B, B].
    """
    if not 1 <= r <= k:
        raise RankError(f"need 1 <= r <= k, got r={r}, k={k}")
    if q < 1:
        raise DivisionError("q must be a positive integer")
    B = int(entry_bound)
    out = []
    vals = range(-B, B + 1)
    for piv in combinations(range(k), r):
        pset = set(piv)
        slots = [(i, j) for i in range(r) for j in range(piv[i] + 1, k) if j not in pset]
        for free in product(vals, repeat=len(slots)):
            rows = [[0] * k for _ in range(r)]
            for i, j in enumerate(piv):
                rows[i][j] = q
            for (i, j), val in zip(slots, free):
                rows[i][j] = val
            if _gcd_all([x for row in rows for x in row] + [q]) != 1:
                continue
            out.append(RrefTerm(tuple(tuple(row) for row in rows), q))
    return out


def _check_D(D, q):
    D = [list(map(int, row)) for row in D]
    if q < 1:
        raise DivisionError("q must be a positive integer")
    if xq.rank(D) != len(D):
        raise RankError("D must have full row rank")
    return D


def rogers_index(D, q):
    """|Z^r : {x in Z^r : x D == 0 mod q}|, via the lattice D Z-span + q Z^k."""
    D = _check_D(D, q)
    k = len(D[0])
    # image of x -> xD in (Z/q)^k has order q^k / det(rowspan(D) + qZ^k)
    L = xq.hnf_rows(D + [[q * int(i == j) for j in range(k)] for i in range(k)])
    det = 1
    for i, row in enumerate(L):
        det *= row[next(j for j, x in enumerate(row) if x)]
    return q ** k // det


@dataclass(frozen=True)
class Weight:
    index: int
    d: int

    @property
    def value(self):
        return Fraction(1, self.index ** self.d)


def weight_cd(D, q, d):
    """c_D = index^-d as an exact Fraction (wrapped with the index itself)."""
    return Weight(rogers_index(D, q), int(d))


def block_diag(term1, term2):
    """(D3, q) with D3 = diag((q/q1) D1, (q/q2) D2), q = lcm(q1, q2)."""
    q = xq.lcm(term1.q, term2.q)
    s1, s2 = q // term1.q, q // term2.q
    k1, k2 = term1.k, term2.k
    rows = [tuple(s1 * x for x in row) + (0,) * k2 for row in term1.D]
    rows += [(0,) * k1 + tuple(s2 * x for x in row) for row in term2.D]
    return RrefTerm(tuple(rows), q)


def saturation_basis(D, q=1):
    """Basis (rows) of the integer points of the real row space of D."""
    D = _check_D(D, q)
    R, piv = xq.rref(D)
    den = 1
    for row in R:
        for x in row:
            den = xq.lcm(den, x.denominator)
    Dint = [[int(x * den) for x in row] for row in R]
    # y = x R with x the pivot coordinates of y, so we need x R in Z^k
    K = xq.kernel_lattice_mod(Dint, den)
    basis = []
    for x in K:
        y = [sum(Fraction(xi) * R[i][j] for i, xi in enumerate(x)) for j in range(len(D[0]))]
        basis.append([int(v) for v in y])
    return xq.hnf_rows(basis)


@dataclass(frozen=True)
class CongruenceVerdict:
    admissible: bool
    witness: tuple | None
    relaxed_admissible: bool
    relaxed_witness: tuple | None
    m: int

    @property
    def verdicts_differ(self):
        return self.admissible != self.relaxed_admissible


def _combos(basis, N):
    r = len(basis)
    k = len(basis[0])
    for c in product(range(N), repeat=r):
        yield tuple(sum(ci * b[j] for ci, b in zip(c, basis)) for j in range(k))


def _congruent(v, N):
    return all((x - v[0]) % N == 0 for x in v)


def congruence_admissible(D, q, N):
    """Admissibility of D for the congruence Siegel transform modulo N.

    Literal rule: some v in the saturated lattice has v_1 = m (the least
    positive first coordinate), gcd(v_1, N) = 1 and all coordinates congruent
    mod N. The relaxed rule drops v_1 = m. Both are decided exactly; the
    conditions only depend on v mod N, so finitely many cosets are checked.
    """
    N = int(N)
    basis = saturation_basis(D, q)
    k = len(basis[0])
    m = _gcd_all(b[0] for b in basis)
    if N == 1:
        w = tuple(basis[0])
        return CongruenceVerdict(True, w, True, w, m)
    relaxed = None
    for v in _combos(basis, N):
        if gcd(v[0], N) == 1 and _congruent(v, N):
            relaxed = v
            break
    literal = None
    if m > 0 and gcd(m, N) == 1:
        # a vector with first coordinate m, then shift by the first-coordinate-zero part
        b0 = _first_coordinate_vector(basis, m)
        zero_part = [row for row in xq.hnf_rows([list(b) for b in basis]) if row[0] == 0]
        for u in (_combos(zero_part, N) if zero_part else [tuple([0] * k)]):
            v = tuple(a + b for a, b in zip(b0, u))
            if _congruent(v, N):
                literal = v
                break
    return CongruenceVerdict(literal is not None, literal, relaxed is not None, relaxed, m)


def _first_coordinate_vector(basis, m):
    # extended Euclid over the first coordinates
    coeffs = [0] * len(basis)
    g = 0
    for i, b in enumerate(basis):
        a = b[0]
        if a == 0:
            continue
        if g == 0:
            g, coeffs = a, [int(j == i) for j in range(len(basis))]
            continue
        x, y, g2 = _ext_gcd(g, a)
        coeffs = [x * c for c in coeffs]
        coeffs[i] += y
        g = g2
    if g < 0:
        coeffs = [-c for c in coeffs]
        g = -g
    assert g == m
    k = len(basis[0])
    return tuple(sum(c * b[j] for c, b in zip(coeffs, basis)) for j in range(k))


def _ext_gcd(a, b):
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        t = a // b
        a, b = b, a - t * b
        x0, x1 = x1, x0 - t * x1
        y0, y1 = y1, y0 - t * y1
    return x0, y0, a


@dataclass(frozen=True)
class PrimitiveCertificate:
    x: tuple  # r vectors in Z^d
    images: tuple  # k primitive vectors in Z^d


def primitive_admissible_search(D, q, d, height_bound):
    """Look for x in (Z^d)^r, entries bounded, with every column of x D/q primitive.

    Returns a PrimitiveCertificate or None ("unknown within the bound").
    Coordinates of x decouple: each of the d rows of the d x r matrix X must
    satisfy z D == 0 mod q, and primitivity asks the column gcds of X D/q to be 1.
    """
    D = _check_D(D, q)
    r, k = len(D), len(D[0])
    h = int(height_bound)
    cands = []
    for z in product(range(-h, h + 1), repeat=r):
        if not any(z):
            continue
        y = [sum(zi * D[i][j] for i, zi in enumerate(z)) for j in range(k)]
        if all(v % q == 0 for v in y):
            cands.append((z, tuple(v // q for v in y)))
    cands.sort(key=lambda c: (sum(1 for t in c[0] if t), sum(map(abs, c[0])), tuple(-t for t in c[0])))
    seen = set()
    chosen = []

    def dfs(depth, state):
        if all(s == 1 for s in state):
            return True
        if depth == d or (depth, state) in seen:
            return False
        seen.add((depth, state))
        for z, y in cands:
            nxt = tuple(gcd(s, v) for s, v in zip(state, y))
            if nxt == state:
                continue
            chosen.append((z, y))
            if dfs(depth + 1, nxt):
                return True
            chosen.pop()
        return False

    if not dfs(0, tuple([0] * k)):
        return None
    rows = [z for z, _ in chosen] + [tuple([0] * r)] * (d - len(chosen))
    ys = [y for _, y in chosen] + [tuple([0] * k)] * (d - len(chosen))
    x = tuple(tuple(rows[t][i] for t in range(d)) for i in range(r))
    images = tuple(tuple(ys[t][j] for t in range(d)) for j in range(k))
    return PrimitiveCertificate(x, images)


@dataclass(frozen=True)
class RogersTruncation:
    q_max: int = 8
    entry_bound: int = 8


@dataclass
class MomentAssembly:
    zero_term: float
    main: float
    terms: list = field(default_factory=list)  # (RrefTerm, weight, integral, stderr)
    tail_bound: float = 0.0

    @property
    def value(self):
        return self.zero_term + self.main + sum(float(w.value) * I for _, w, I, _ in self.terms)


def _term_integral(region, term, d, samples, rng):
    """MC integral of F((v_1..v_r) D/q) over (R^d)^r with v_i in the support ball."""
    R = region.radius
    A = np.array(term.D, dtype=float) / term.q
    r = term.r
    V = rng.standard_normal((samples, r, d))
    V /= np.linalg.norm(V, axis=2, keepdims=True)
    V *= R * rng.random((samples, r, 1)) ** (1.0 / d)
    Y = np.einsum("srd,rk->skd", V, A)
    vals = region.indicator(Y).astype(float)
    box = ball_volume(d, R) ** r
    return box * vals.mean(), box * vals.std(ddof=1) / math.sqrt(samples)


def assemble_first_moment(region, k, d, truncation=RogersTruncation(), samples=100_000, rng=None):
    """Truncated Rogers expectation of the rank-k transform of an indicator region.

    Sums F(0) + sum over canonical D/q (r < k, q <= q_max, entries bounded) of
    c_D * int F((v) D/q), plus the main integral for D = I_k. The tail over
    q > q_max uses c_D <= q^-d and the pivot-ball support bound.
    """
    rng = np.random.default_rng(rng)
    zero = float(region.indicator(np.zeros((1, k, d)))[0])
    ident = RrefTerm(tuple(tuple(int(i == j) for j in range(k)) for i in range(k)), 1)
    main, _ = _term_integral(region, ident, d, samples, rng)
    out = MomentAssembly(zero, main)
    for r in range(1, k):
        for q in range(1, truncation.q_max + 1):
            for term in enum_rref_terms(k, r, q, truncation.entry_bound):
                w = weight_cd(term.D, q, d)
                I, se = _term_integral(region, term, d, samples, rng)
                if I:
                    out.terms.append((term, w, I, se))
    out.tail_bound = rogers_tail_bound(region, k, d, truncation)
    if out.tail_bound > 0.01 * abs(out.main):
        warnings.warn(f"Rogers tail bound {out.tail_bound:.3g} exceeds 1% of the main term", TruncationWarning)
    return out


def rogers_tail_bound(region, k, d, truncation, q_cap=100_000):
    """Bound on the omitted q > q_max terms: sum_q q^-d * #terms(q) * (vol B_R)^r."""
    total = 0.0
    for r in range(1, k):
        m = r * (k - r)
        if d - m <= 1:
            return math.inf
        vol = ball_volume(d, region.radius) ** r
        qs = np.arange(truncation.q_max + 1, q_cap + 1, dtype=float)
        e = np.maximum(truncation.entry_bound, qs)
        s = np.sum(qs ** (-d) * comb(k, r) * (2 * e + 1) ** m)
        # remainder beyond q_cap by the integral of 3^m q^(m-d)
        s += comb(k, r) * 3.0 ** m * q_cap ** (m - d + 1) / (d - m - 1)
        total += s * vol
    return float(total)


def variance_constant(n, k):
    """N * sum_{r=1}^{2k-1} (20 * 5^{r(2k-r)} * 2^{-2n} + 3^{r(2k-r)}), N = max_r C(2k, r)."""
    Nmax = max(comb(2 * k, r) for r in range(1, 2 * k))
    s = sum(20 * 5 ** (r * (2 * k - r)) * 2.0 ** (-2 * n) + 3 ** (r * (2 * k - r)) for r in range(1, 2 * k))
    return Nmax * s


def variance_bound(volumes, n, k):
    """C * max vol(E_r1) vol(E_r2) over 1 <= r1 + r2 <= 2k - 1, 0 <= r_i <= k, vol(E_0) = 1."""
    vol = dict(volumes)
    vol[0] = 1.0
    missing = [r for r in range(1, k + 1) if r not in vol]
    if missing:
        raise MissingVolumeError(f"no volume for ranks {missing}")
    best = 0.0
    for r1 in range(0, k + 1):
        for r2 in range(0, k + 1):
            if 1 <= r1 + r2 <= 2 * k - 1:
                best = max(best, vol[r1] * vol[r2])
    return variance_constant(n, k) * best


def variance_exponent(n, k):
    """T-exponent of variance_bound when vol(E_r) ~ T^{2nr - r(r-1)}: the pair (k, k-1)."""
    return growth_exponent(n, k) + growth_exponent(n, k - 1)


@dataclass(frozen=True)
class ExponentWindow:
    delta_min: float
    Q: int
    variance_exponent: int
    A: int

    def alpha_range(self, delta):
        """(lo, hi) for alpha at this delta; empty when lo >= hi."""
        if not self.delta_min < delta < 1:
            raise ValueError("delta must lie in (delta_min, 1)")
        lo = max(1.0, (self.A + 1) / (2 * delta * self.Q - self.variance_exponent))
        hi = 1.0 / ((1 - delta) * self.Q)
        return lo, hi


def exponent_window(n, k):
    """delta_min and the alpha window of the Borel-Cantelli step; needs 2n >= k^2 + 3."""
    if 2 * n < k * k + 3:
        raise HypothesisError(f"need 2n >= k^2 + 3, got n={n}, k={k}")
    Q = growth_exponent(n, k)
    V = variance_exponent(n, k)
    A = (n + 1) * (2 * n - 1)
    delta_min = (A * Q + V + Q) / (A * Q + 3 * Q)
    return ExponentWindow(delta_min, Q, V, A)
