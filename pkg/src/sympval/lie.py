"""Exact checks on sp(2n) inside sl(2n): root and weight spaces, bracket table, irreducibility of the complement.

Matrices are sparse dicts of Fractions, so every identity is tested with zero
meaning zero. Blocks follow the (A B; C D) layout of a 2n x 2n matrix.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import permutations
import random

from .errors import DimensionError


class ExactMatrix:
    __slots__ = ("size", "entries")

    def __init__(self, size, entries=None):
        self.size = size
        self.entries = {k: Fraction(v) for k, v in (entries or {}).items() if v != 0}

    @classmethod
    def block(cls, n, A=None, B=None, C=None, D=None):
        out = {}
        for blk, (ro, co) in ((A, (0, 0)), (B, (0, n)), (C, (n, 0)), (D, (n, n))):
            for (i, j), v in (blk or {}).items():
                out[(i + ro, j + co)] = out.get((i + ro, j + co), 0) + v
        return cls(2 * n, out)

    def _check(self, other):
        if self.size != other.size:
            raise DimensionError(f"sizes {self.size} and {other.size} differ")

    def __add__(self, other):
        self._check(other)
        out = dict(self.entries)
        for k, v in other.entries.items():
            out[k] = out.get(k, 0) + v
        return ExactMatrix(self.size, out)

    def __neg__(self):
        return ExactMatrix(self.size, {k: -v for k, v in self.entries.items()})

    def __sub__(self, other):
        return self + (-other)

    def __rmul__(self, c):
        c = Fraction(c)
        return ExactMatrix(self.size, {k: c * v for k, v in self.entries.items()})

    def __matmul__(self, other):
        self._check(other)
        rows = {}
        for (i, j), v in other.entries.items():
            rows.setdefault(i, []).append((j, v))
        out = {}
        for (i, m), a in self.entries.items():
            for j, b in rows.get(m, ()):
                out[(i, j)] = out.get((i, j), 0) + a * b
        return ExactMatrix(self.size, out)

    def __eq__(self, other):
        return isinstance(other, ExactMatrix) and self.size == other.size and (self - other).is_zero()

    def __hash__(self):
        return hash((self.size, frozenset(self.entries.items())))

    def is_zero(self):
        return not self.entries

    def trace(self):
        return sum((v for (i, j), v in self.entries.items() if i == j), Fraction(0))

    def to_list(self):
        return [[self.entries.get((i, j), Fraction(0)) for j in range(self.size)] for i in range(self.size)]

    def __repr__(self):
        return f"ExactMatrix({self.size}, {dict(sorted(self.entries.items()))})"


def bracket(X, Y):
    """Commutator XY - YX."""
    return X @ Y - Y @ X


def E(i, j, c=1):
    return {(i, j): c}


def _plus(*parts):
    out = {}
    for p in parts:
        for k, v in p.items():
            out[k] = out.get(k, 0) + v
    return out


@dataclass(frozen=True)
class WeightVector:
    label: tuple
    matrix: ExactMatrix
    space: str  # "sp_root", "W_weight" or "W_zero"


def _f(n, i, si, j=None, sj=0):
    lab = [0] * n
    lab[i] += si
    if j is not None:
        lab[j] += sj
    return tuple(lab)


def cartan_basis(n):
    return [ExactMatrix.block(n, A=E(i, i), D=E(i, i, -1)) for i in range(n)]


def sp_root_vectors(n):
    out = []
    for i, j in permutations(range(n), 2):
        out.append(WeightVector(_f(n, i, 1, j, -1), ExactMatrix.block(n, A=E(i, j), D=E(j, i, -1)), "sp_root"))
    for i in range(n):
        for j in range(i, n):
            S = _plus(E(i, j), E(j, i))
            out.append(WeightVector(_f(n, i, 1, j, 1), ExactMatrix.block(n, B=S), "sp_root"))
            out.append(WeightVector(_f(n, i, -1, j, -1), ExactMatrix.block(n, C=S), "sp_root"))
    return out


def w_weight_vectors(n):
    out = []
    for i in range(n - 1):
        H = _plus(E(i, i), E(i + 1, i + 1, -1))
        out.append(WeightVector((0,) * n, ExactMatrix.block(n, A=H, D=H), "W_zero"))
    for i, j in permutations(range(n), 2):
        out.append(WeightVector(_f(n, i, 1, j, -1), ExactMatrix.block(n, A=E(i, j), D=E(j, i)), "W_weight"))
    for i in range(n):
        for j in range(i + 1, n):
            K = _plus(E(i, j), E(j, i, -1))
            out.append(WeightVector(_f(n, i, 1, j, 1), ExactMatrix.block(n, B=K), "W_weight"))
            out.append(WeightVector(_f(n, i, -1, j, -1), ExactMatrix.block(n, C=K), "W_weight"))
    return out


def sl_basis(n):
    d = 2 * n
    out = [ExactMatrix(d, {(i, j): 1}) for i in range(d) for j in range(d) if i != j]
    out += [ExactMatrix(d, {(i, i): 1, (i + 1, i + 1): -1}) for i in range(d - 1)]
    return out


def bases(n):
    """Exact bases of sp(2n), its complement W, the Cartan subalgebra and sl(2n)."""
    if n < 2:
        raise DimensionError("need n >= 2")
    cart = cartan_basis(n)
    sp = cart + [w.matrix for w in sp_root_vectors(n)]
    W = [w.matrix for w in w_weight_vectors(n)]
    return {"sp_basis": sp, "w_basis": W, "cartan_basis": cart, "sl_basis": sl_basis(n)}


class Span:
    """Incrementally row-reduced span of exact matrices."""

    def __init__(self, size):
        self.size = size
        self.rows = {}  # pivot key -> reduced dict with entry 1 at the pivot

    def __len__(self):
        return len(self.rows)

    def reduce(self, X):
        v = dict(X.entries)
        for piv in sorted(self.rows):
            c = v.get(piv)
            if c:
                for k, a in self.rows[piv].items():
                    nv = v.get(k, 0) - c * a
                    if nv:
                        v[k] = nv
                    else:
                        v.pop(k, None)
        return v

    def add(self, X):
        """Insert X; True when it enlarged the span."""
        v = self.reduce(X)
        if not v:
            return False
        piv = min(v)
        c = v[piv]
        v = {k: a / c for k, a in v.items()}
        for p, row in self.rows.items():
            a = row.get(piv)
            if a:
                for k, b in v.items():
                    nb = row.get(k, 0) - a * b
                    if nb:
                        row[k] = nb
                    else:
                        row.pop(k, None)
        self.rows[piv] = v
        return True

    def contains(self, X):
        return not self.reduce(X)


def rank(mats):
    if not mats:
        return 0
    S = Span(mats[0].size)
    for X in mats:
        S.add(X)
    return len(S)


def _label_value(label, a_index):
    return label[a_index]


@dataclass
class DecompositionReport:
    n: int
    failures: list = field(default_factory=list)
    counts: dict = field(default_factory=dict)

    @property
    def ok(self):
        return not self.failures


def verify_decomposition(n, sp_vectors=None, w_vectors=None):
    """Check ad(a) X = label(a) X on every listed vector and that the lists fill sp and W."""
    sp_vectors = sp_root_vectors(n) if sp_vectors is None else sp_vectors
    w_vectors = w_weight_vectors(n) if w_vectors is None else w_vectors
    rep = DecompositionReport(n)
    cart = cartan_basis(n)
    for wv in list(sp_vectors) + list(w_vectors):
        for idx, a in enumerate(cart):
            lhs = bracket(a, wv.matrix)
            if lhs != _label_value(wv.label, idx) * wv.matrix:
                rep.failures.append({"space": wv.space, "label": list(wv.label), "cartan": idx})
    b = bases(n)
    n_sp, n_w = len(b["sp_basis"]), len(b["w_basis"])
    rep.counts = {
        "sp_roots": len(sp_vectors),
        "sp_expected": n_sp - n,
        "w_weights": len(w_vectors),
        "w_expected": n_w,
        "sp_rank": rank(cart + [w.matrix for w in sp_vectors]),
        "w_rank": rank([w.matrix for w in w_vectors]),
        "total_rank": rank(cart + [w.matrix for w in sp_vectors] + [w.matrix for w in w_vectors]),
        "sl_dim": 4 * n * n - 1,
    }
    c = rep.counts
    if c["sp_rank"] != n_sp or c["sp_roots"] != c["sp_expected"]:
        rep.failures.append({"space": "sp", "dimension": c["sp_rank"], "expected": n_sp})
    if c["w_rank"] != n_w or c["w_weights"] != n_w:
        rep.failures.append({"space": "W", "dimension": c["w_rank"], "expected": n_w})
    if c["total_rank"] != c["sl_dim"]:
        rep.failures.append({"space": "sl", "dimension": c["total_rank"], "expected": c["sl_dim"]})
    for X in b["sp_basis"]:
        if X.trace() != 0 or not _in_sp(n, X):
            rep.failures.append({"space": "sp", "not_member": repr(X)})
    for X in b["w_basis"]:
        if X.trace() != 0 or not _in_w(n, X):
            rep.failures.append({"space": "W", "not_member": repr(X)})
    return rep


def _blocks(n, X):
    M = X.to_list()
    A = [r[:n] for r in M[:n]]
    B = [r[n:] for r in M[:n]]
    C = [r[:n] for r in M[n:]]
    D = [r[n:] for r in M[n:]]
    return A, B, C, D


def _T(M):
    return [list(r) for r in zip(*M)]


def _neg(M):
    return [[-x for x in r] for r in M]


def _in_sp(n, X):
    A, B, C, D = _blocks(n, X)
    return D == _neg(_T(A)) and B == _T(B) and C == _T(C)


def _in_w(n, X):
    A, B, C, D = _blocks(n, X)
    return D == _T(A) and B == _neg(_T(B)) and C == _neg(_T(C))


@dataclass(frozen=True)
class Identity:
    name: str
    indices: tuple
    holds: bool


def bracket_identities(n):
    """Evaluate the table of brackets that move W weight vectors between weights."""
    blk = lambda **kw: ExactMatrix.block(n, **kw)
    sk = lambda i, j: _plus(E(i, j), E(j, i, -1))
    out = []

    def rec(name, idx, lhs, rhs):
        out.append(Identity(name, idx, lhs == rhs))

    for i, j, l in permutations(range(n), 3):
        Wij = blk(A=E(i, j), D=E(j, i))
        rec("A-weights, left", (i, j, l), bracket(blk(A=E(j, l), D=E(l, j, -1)), Wij), -blk(A=E(i, l), D=E(l, i)))
        rec("A-weights, right", (i, j, l), bracket(blk(A=E(l, i), D=E(i, l, -1)), Wij), blk(A=E(l, j), D=E(j, l)))
        rec("B-weights, left", (i, j, l), bracket(blk(A=E(l, j), D=E(j, l, -1)), blk(B=sk(i, j))), blk(B=sk(i, l)))
        rec("B-weights, right", (i, j, l), bracket(blk(A=E(l, i), D=E(i, l, -1)), blk(B=sk(i, j))), blk(B=sk(l, j)))
        rec("C-weights, left", (i, j, l), bracket(blk(A=E(j, l), D=E(l, j, -1)), blk(C=sk(i, j))), -blk(C=sk(i, l)))
        rec("C-weights, right", (i, j, l), bracket(blk(A=E(i, l), D=E(l, i, -1)), blk(C=sk(i, j))), blk(C=sk(j, l)))
    for i, j in permutations(range(n), 2):
        Wij = blk(A=E(i, j), D=E(j, i))
        H = _plus(E(i, i), E(j, j, -1))
        rec("A-weight to zero", (i, j), bracket(blk(A=E(j, i), D=E(i, j, -1)), Wij), -blk(A=H, D=H))
        rec("zero to A-weight", (i, j), bracket(blk(A=E(i, j), D=E(j, i, -1)), blk(A=H, D=H)), -2 * Wij)
        rec("A-weight to B-weight", (i, j), bracket(blk(B=E(j, j)), Wij), -blk(B=sk(i, j)))
        rec("B-weight to A-weight", (i, j), bracket(blk(C=E(j, j)), blk(B=sk(i, j))), -Wij)
        rec("A-weight to C-weight", (i, j), bracket(blk(C=E(i, i)), Wij), blk(C=sk(i, j)))
        rec("C-weight to A-weight", (i, j), bracket(blk(B=E(i, i)), blk(C=sk(i, j))), Wij)
    return out


@dataclass
class IrreducibilityReport:
    n: int
    invariant: bool
    invariance_rank: int
    reached: list = field(default_factory=list)  # (label, space, dimension)
    failures: list = field(default_factory=list)

    @property
    def ok(self):
        return self.invariant and not self.failures


def closure(start, ops, cap):
    """Span of start under repeated ad(op), stopping when stable or at cap."""
    S = Span(start[0].size)
    frontier = [X for X in start if S.add(X)]
    while frontier and len(S) < cap:
        nxt = []
        for X in frontier:
            for A in ops:
                Y = bracket(A, X)
                if S.add(Y):
                    nxt.append(Y)
        frontier = nxt
    return S


def verify_irreducible(n):
    """W is ad(sp)-invariant, and each weight vector alone generates all of W."""
    b = bases(n)
    sp, W = b["sp_basis"], b["w_basis"]
    dimW = len(W)
    WS = Span(2 * n)
    for X in W:
        WS.add(X)
    images = [bracket(A, X) for A in sp for X in W]
    inv = all(WS.contains(Y) for Y in images)
    rep = IrreducibilityReport(n, inv, rank(W + images))
    for wv in w_weight_vectors(n):
        got = len(closure([wv.matrix], sp, dimW))
        rep.reached.append((list(wv.label), wv.space, got))
        if got != dimW:
            rep.failures.append({"start": list(wv.label), "space": wv.space, "stalled_at": got, "expected": dimW})
    return rep


def random_w_element(n, rng=None, height=5):
    rng = rng if isinstance(rng, random.Random) else random.Random(rng)
    out = ExactMatrix(2 * n)
    for X in bases(n)["w_basis"]:
        out = out + Fraction(rng.randint(-height, height), rng.randint(1, height)) * X
    return out


def subalgebra_dimension(gens):
    """Dimension of the Lie subalgebra generated by gens (right-normed brackets)."""
    S = Span(gens[0].size)
    frontier = [X for X in gens if S.add(X)]
    cap = gens[0].size ** 2 - 1
    while frontier and len(S) < cap:
        nxt = []
        for X in frontier:
            for G in gens:
                Y = bracket(G, X)
                if S.add(Y):
                    nxt.append(Y)
        frontier = nxt
    return len(S)


def maximality_check(n, rng=None, w=None):
    """sp plus one nonzero element of W generates sl(2n). Returns (dimension reached, target)."""
    w = random_w_element(n, rng) if w is None else w
    return subalgebra_dimension(bases(n)["sp_basis"] + [w]), 4 * n * n - 1
