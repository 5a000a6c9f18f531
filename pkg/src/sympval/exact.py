"""Small exact-rational linear algebra used by the forms, Rogers and Lie code."""

from fractions import Fraction
from math import gcd


def to_fraction(x):
    """Parse an int, Fraction or "p/q" string. Floats are rejected on purpose."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("bool is not a rational entry")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    raise TypeError(f"not an exact rational: {x!r}")


def is_exact_entry(x):
    return isinstance(x, (int, Fraction, str)) and not isinstance(x, bool)


def fmatrix(rows):
    return [[to_fraction(x) for x in row] for row in rows]


def matmul(A, B):
    Bt = list(zip(*B))
    return [[sum((a * b for a, b in zip(row, col)), Fraction(0)) for col in Bt] for row in A]


def transpose(A):
    return [list(r) for r in zip(*A)]


def det(A):
    """Determinant by fraction Gaussian elimination."""
    M = [list(map(Fraction, r)) for r in A]
    m = len(M)
    d = Fraction(1)
    for c in range(m):
        p = next((i for i in range(c, m) if M[i][c] != 0), None)
        if p is None:
            return Fraction(0)
        if p != c:
            M[c], M[p] = M[p], M[c]
            d = -d
        d *= M[c][c]
        inv = 1 / M[c][c]
        for i in range(c + 1, m):
            f = M[i][c] * inv
            if f:
                M[i] = [a - f * b for a, b in zip(M[i], M[c])]
    return d


def rref(A):
    """Return (R, pivot_columns) with R the reduced row echelon form of A over Q."""
    M = [list(map(Fraction, r)) for r in A]
    rows = len(M)
    cols = len(M[0]) if rows else 0
    piv = []
    r = 0
    for c in range(cols):
        p = next((i for i in range(r, rows) if M[i][c] != 0), None)
        if p is None:
            continue
        M[r], M[p] = M[p], M[r]
        inv = 1 / M[r][c]
        M[r] = [x * inv for x in M[r]]
        for i in range(rows):
            if i != r and M[i][c] != 0:
                f = M[i][c]
                M[i] = [a - f * b for a, b in zip(M[i], M[r])]
        piv.append(c)
        r += 1
        if r == rows:
            break
    return M, piv


def rank(A):
    return len(rref(A)[1]) if A else 0


def lcm(a, b):
    return a // gcd(a, b) * b if a and b else abs(a or b)


def hnf_rows(A):
    """Row-style Hermite normal form of an integer matrix.

    Returns the nonzero rows of the HNF: upper echelon, positive pivots, entries
    above each pivot reduced into [0, pivot).
    """
    M = [list(map(int, r)) for r in A]
    rows = len(M)
    cols = len(M[0]) if rows else 0
    r = 0
    for c in range(cols):
        if r == rows:
            break
        # Euclid on column c among rows r..end
        while True:
            nz = [i for i in range(r, rows) if M[i][c] != 0]
            if not nz:
                break
            p = min(nz, key=lambda i: abs(M[i][c]))
            M[r], M[p] = M[p], M[r]
            done = True
            for i in range(r + 1, rows):
                if M[i][c]:
                    q = M[i][c] // M[r][c]
                    M[i] = [a - q * b for a, b in zip(M[i], M[r])]
                    if M[i][c]:
                        done = False
            if done:
                break
        if r < rows and M[r][c] != 0:
            if M[r][c] < 0:
                M[r] = [-a for a in M[r]]
            for i in range(r):
                q = M[i][c] // M[r][c]
                if q:
                    M[i] = [a - q * b for a, b in zip(M[i], M[r])]
            r += 1
    return [row for row in M[:r] if any(row)]


def kernel_lattice_mod(D, q):
    """Basis (rows) of {x in Z^r : x D == 0 mod q} for an integer r x k matrix D."""
    r = len(D)
    k = len(D[0])
    # rows (D_i | e_i) and (q e_j | 0); rows of the HNF with zero left block give the kernel
    stack = [list(D[i]) + [int(i == j) for j in range(r)] for i in range(r)]
    stack += [[q * int(i == j) for j in range(k)] + [0] * r for i in range(k)]
    H = hnf_rows(stack)
    return [row[k:] for row in H if not any(row[:k])]


def abs_det_int(B):
    """|det| of a square integer matrix through its HNF."""
    H = hnf_rows(B)
    if len(H) < len(B):
        return 0
    out = 1
    for i, row in enumerate(H):
        out *= row[i]
    return abs(out)
