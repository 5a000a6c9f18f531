"""Symplectic bilinear forms <v, w>^g = (g v)^T J (g w) and their Gram matrices."""

from dataclasses import dataclass
from fractions import Fraction
import json
import math

import numpy as np

from . import exact as xq
from .errors import DeterminantError, DimensionError, FormatError, ZeroFormError

DET_TOL = 1e-9


def standard_J(n):
    """J_n = [[0, I], [-I, 0]] as an integer array."""
    if n < 1:
        raise DimensionError("n must be >= 1")
    J = np.zeros((2 * n, 2 * n), dtype=np.int64)
    J[:n, n:] = np.eye(n, dtype=np.int64)
    J[n:, :n] = -np.eye(n, dtype=np.int64)
    return J


def _exact_J(n):
    return [[Fraction(int(x)) for x in row] for row in standard_J(n)]


class SymplecticForm:
    """A form given by a unimodular g, or directly by its Gram matrix.

    ``gram`` is always a float array. ``exact_gram`` holds Fractions when the
    input was exact, otherwise None.
    """

    def __init__(self, n, gram, g=None, exact_gram=None):
        self.n = n
        self.gram = np.asarray(gram, dtype=float)
        self.g = None if g is None else np.asarray(g, dtype=float)
        self.exact_gram = exact_gram
        self._exact_g = None

    @property
    def dim(self):
        return 2 * self.n

    @property
    def is_exact(self):
        return self.exact_gram is not None

    @classmethod
    def from_matrix(cls, n, g, det_tol=DET_TOL):
        rows = [list(r) for r in (g.tolist() if isinstance(g, np.ndarray) else g)]
        if len(rows) != 2 * n or any(len(r) != 2 * n for r in rows):
            raise DimensionError(f"g must be {2 * n}x{2 * n}")
        if all(xq.is_exact_entry(x) for r in rows for x in r):
            G = xq.fmatrix(rows)
            d = xq.det(G)
            if d != 1:
                raise DeterminantError(f"det(g) = {d}, expected 1")
            M = xq.matmul(xq.matmul(xq.transpose(G), _exact_J(n)), G)
            form = cls(n, [[float(x) for x in r] for r in M],
                       g=[[float(x) for x in r] for r in G], exact_gram=M)
            form._exact_g = G
            return form
        ga = np.array(rows, dtype=float)
        d = np.linalg.det(ga)
        if not abs(d - 1.0) <= det_tol:
            raise DeterminantError(f"det(g) = {d!r}, expected 1 within {det_tol}")
        J = standard_J(n)
        return cls(n, ga.T @ J @ ga, g=ga)

    @classmethod
    def from_gram(cls, n, gram, exact=False, det_tol=DET_TOL):
        rows = [list(r) for r in (gram.tolist() if isinstance(gram, np.ndarray) else gram)]
        if len(rows) != 2 * n or any(len(r) != 2 * n for r in rows):
            raise DimensionError(f"gram must be {2 * n}x{2 * n}")
        if exact:
            M = xq.fmatrix(rows)
            if any(M[i][j] != -M[j][i] for i in range(2 * n) for j in range(2 * n)):
                raise DimensionError("gram must be antisymmetric")
            if all(x == 0 for r in M for x in r):
                raise ZeroFormError("gram is identically zero")
            d = xq.det(M)
            if d != 1:
                raise DeterminantError(f"det(gram) = {d}, expected 1")
            return cls(n, [[float(x) for x in r] for r in M], exact_gram=M)
        M = np.array(rows, dtype=float)
        if not np.allclose(M, -M.T, atol=det_tol):
            raise DimensionError("gram must be antisymmetric")
        if not np.any(M):
            raise ZeroFormError("gram is identically zero")
        d = np.linalg.det(M)
        if not abs(d - 1.0) <= max(det_tol, 1e-9 * np.abs(M).max() ** (2 * n)):
            raise DeterminantError(f"det(gram) = {d!r}, expected 1")
        return cls(n, M)

    @classmethod
    def standard(cls, n):
        return cls.from_matrix(n, [[int(x) for x in r] for r in np.eye(2 * n, dtype=int)])

    def value(self, v, w):
        return float(np.asarray(v, float) @ self.gram @ np.asarray(w, float))

    def to_json(self):
        if self._exact_g is not None:
            return {"n": self.n, "g": [[str(x) for x in r] for r in self._exact_g]}
        if self.exact_gram is not None:
            return {"n": self.n, "gram": [[str(x) for x in r] for r in self.exact_gram], "exact": True}
        if self.g is not None:
            return {"n": self.n, "g": self.g.tolist()}
        return {"n": self.n, "gram": self.gram.tolist(), "exact": False}


def form_from_json(obj):
    """Build a form from {"n", "g"} or {"n", "gram", "exact"}; accepts a path or a JSON string too."""
    if isinstance(obj, str):
        text = obj
        if not obj.lstrip().startswith("{"):
            try:
                with open(obj) as fh:
                    text = fh.read()
            except OSError as e:
                raise FormatError(f"cannot read form file: {e}") from None
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as e:
            raise FormatError(f"form JSON does not parse: {e}") from None
    if not isinstance(obj, dict):
        raise FormatError("form JSON must be an object")
    if "n" not in obj:
        raise FormatError("form JSON: missing field 'n'")
    try:
        n = int(obj["n"])
    except (TypeError, ValueError):
        raise FormatError(f"form JSON: field 'n' must be an integer, got {obj['n']!r}") from None
    key = "g" if "g" in obj else "gram" if "gram" in obj else None
    if key is None:
        raise FormatError("form JSON: needs field 'g' or 'gram'")
    rows = obj[key]
    if not isinstance(rows, list) or not all(isinstance(r, list) for r in rows):
        raise FormatError(f"form JSON: field '{key}' must be a list of rows")
    try:
        rows = [[_entry(x) for x in r] for r in rows]
    except (TypeError, ValueError, ZeroDivisionError) as e:
        raise FormatError(f"form JSON: bad entry in field '{key}': {e}") from None
    if key == "g":
        return SymplecticForm.from_matrix(n, rows, det_tol=obj.get("det_tol", DET_TOL))
    return SymplecticForm.from_gram(n, rows, exact=bool(obj.get("exact", False)))


def _entry(x):
    # strings such as "1/2" stay exact; bools are rejected
    if isinstance(x, bool):
        raise TypeError("boolean entry")
    if isinstance(x, str):
        return Fraction(x)
    if isinstance(x, (int, float)):
        return x
    raise TypeError(f"entry {x!r} is not a number")


def pair_values(form, vectors):
    """k x k matrix of <v_i, v_j>^g; antisymmetric with zero diagonal."""
    V = np.asarray(vectors, dtype=float)
    if V.ndim != 2 or V.shape[1] != form.dim:
        raise DimensionError(f"vectors must have {form.dim} coordinates")
    P = V @ form.gram @ V.T
    P = 0.5 * (P - P.T)
    np.fill_diagonal(P, 0.0)
    return P


def pair_values_exact(form, vectors):
    """Same as pair_values but in Fractions; needs an exact Gram and integer/rational vectors."""
    if form.exact_gram is None:
        raise ValueError("form has no exact Gram matrix")
    V = xq.fmatrix(vectors)
    return xq.matmul(xq.matmul(V, form.exact_gram), xq.transpose(V))


@dataclass(frozen=True)
class RationalityVerdict:
    kind: str  # "rational", "irrational" or "inconclusive"
    scale: float | Fraction | None = None

    @property
    def is_rational(self):
        return self.kind == "rational"


def _continued_fraction(x, depth, tol, pq_bound):
    """Returns ("terminated", p, q) | ("bounded", None, None) | ("large", None, None)."""
    h0, h1 = 0, 1
    k0, k1 = 1, 0
    y = x
    for _ in range(depth):
        a = math.floor(y)
        if abs(a) > pq_bound and (h1, k1) != (0, 1):
            return "large", None, None
        h0, h1 = h1, a * h1 + h0
        k0, k1 = k1, a * k1 + k0
        f = y - a
        if f < tol or abs(x - h1 / k1) < tol * max(1.0, abs(x)):
            return "terminated", h1, k1
        y = 1.0 / f
    return "bounded", None, None


def rationality_test(form, tol=1e-9, cf_depth=12, pq_bound=10_000):
    """Decide whether the Gram matrix is a real multiple of an integer matrix.

    Exact Grams are decided exactly, with scale 1/lcm(denominators), so every
    value on integer vectors lies in scale * Z. Float Grams go through
    continued fractions of entry ratios; "irrational" is a heuristic verdict.
    """
    if form.exact_gram is not None:
        entries = [x for r in form.exact_gram for x in r if x != 0]
        if not entries:
            raise ZeroFormError("gram is identically zero")
        L = 1
        for x in entries:
            L = xq.lcm(L, x.denominator)
        return RationalityVerdict("rational", Fraction(1, L))
    M = form.gram
    nz = [float(x) for x in M.ravel() if abs(x) > tol]
    if not nz:
        raise ZeroFormError("gram is identically zero")
    ref = max(nz, key=abs)
    dens = []
    saw_large = False
    for x in nz:
        status, p, q = _continued_fraction(x / ref, cf_depth, tol, pq_bound)
        if status == "bounded":
            return RationalityVerdict("irrational", None)
        if status == "large":
            saw_large = True
            continue
        dens.append(q)
    if saw_large:
        return RationalityVerdict("inconclusive", None)
    L = 1
    for q in dens:
        L = xq.lcm(L, q)
    return RationalityVerdict("rational", abs(ref) / L)
