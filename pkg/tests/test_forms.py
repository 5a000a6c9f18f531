from fractions import Fraction
import json
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from sympval.errors import DeterminantError, DimensionError, FormatError, ZeroFormError
from sympval.forms import (SymplecticForm, form_from_json, pair_values, pair_values_exact,
                           rationality_test, standard_J)


def test_standard_J_identities():
    for n in (1, 2, 3):
        J = standard_J(n)
        assert np.array_equal(J.T, -J)
        assert np.array_equal(J @ J, -np.eye(2 * n, dtype=int))


def test_value_is_gJg():
    g = np.diag([2 ** 0.25, 1, 1, 2 ** -0.25])
    f = SymplecticForm.from_matrix(2, g)
    e = np.eye(4)
    # hand evaluation: (g e1)^T J (g e3) = 2^(1/4) * 1
    assert f.value(e[0], e[2]) == pytest.approx(2 ** 0.25, abs=1e-15)
    assert f.value(e[2], e[0]) == pytest.approx(-(2 ** 0.25), abs=1e-15)
    assert f.value(e[1], e[3]) == pytest.approx(2 ** -0.25, abs=1e-15)


def test_exact_input_keeps_fractions():
    import sympy

    g = [[1, Fraction(1, 2), 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]]
    f = SymplecticForm.from_matrix(2, g)
    assert f.is_exact
    G = sympy.Matrix([[sympy.Rational(x.numerator, x.denominator) if isinstance(x, Fraction) else x
                       for x in r] for r in g])
    M = G.T * sympy.Matrix(standard_J(2).tolist()) * G
    assert [[Fraction(int(x.p), int(x.q)) for x in M.row(i)] for i in range(4)] == f.exact_gram
    P = pair_values_exact(f, [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1]])
    assert P[1][2] == f.exact_gram[1][3]


def test_determinant_validation():
    with pytest.raises(DeterminantError):
        SymplecticForm.from_matrix(2, np.diag([2.0, 1, 1, 1]))
    with pytest.raises(DeterminantError):
        SymplecticForm.from_matrix(2, [[2, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]])
    with pytest.raises(DimensionError):
        SymplecticForm.from_matrix(2, np.eye(3))


def test_gram_validation():
    with pytest.raises(DimensionError):
        SymplecticForm.from_gram(1, [[1, 0], [0, 1]])
    with pytest.raises(ZeroFormError):
        SymplecticForm.from_gram(1, [[0, 0], [0, 0]], exact=True)
    f = SymplecticForm.from_gram(1, [[0, 1], [-1, 0]], exact=True)
    assert f.value([1, 0], [0, 1]) == 1.0


@st.composite
def small_forms(draw):
    n = draw(st.integers(1, 3))
    seed = draw(st.integers(0, 2 ** 32 - 1))
    rng = np.random.default_rng(seed)
    g = rng.normal(size=(2 * n, 2 * n)) + 2 * np.eye(2 * n)
    d = np.linalg.det(g)
    if d < 0:
        g[0] = -g[0]
        d = -d
    g /= d ** (1 / (2 * n))
    return SymplecticForm.from_matrix(n, g), rng


@given(small_forms())
def test_pair_values_antisymmetric(fr):
    f, rng = fr
    V = rng.integers(-5, 6, size=(4, f.dim))
    P = pair_values(f, V)
    assert np.allclose(P, -P.T)
    assert np.all(np.diag(P) == 0)
    g = f.g
    J = standard_J(f.n)
    for i in range(4):
        for j in range(4):
            if i != j:
                assert P[i, j] == pytest.approx((g @ V[i]) @ J @ (g @ V[j]), rel=1e-9, abs=1e-9)


@given(st.integers(1, 3), st.lists(st.integers(1, 12), min_size=1, max_size=3))
def test_rationality_exact_scale(n, dens):
    # upper unipotent g with rational entries: values lie on (1/lcm) Z
    g = [[Fraction(int(i == j)) for j in range(2 * n)] for i in range(2 * n)]
    for t, q in enumerate(dens):
        g[0][1 + t % (2 * n - 1)] += Fraction(1, q)
    f = SymplecticForm.from_matrix(n, g)
    v = rationality_test(f)
    assert v.kind == "rational"
    L = 1
    for r in f.exact_gram:
        for x in r:
            L = math.lcm(L, x.denominator)
    assert v.scale == Fraction(1, L)
    rng = np.random.default_rng(sum(dens))
    V = rng.integers(-4, 5, size=(3, 2 * n)).tolist()
    for row in pair_values_exact(f, V):
        for x in row:
            assert (x / v.scale).denominator == 1


def test_rationality_float_paths():
    irr = SymplecticForm.from_matrix(2, np.diag([2 ** 0.25, 1, 1, 2 ** -0.25]))
    assert rationality_test(irr).kind == "irrational"
    rat = SymplecticForm.from_matrix(2, np.diag([2.0, 1, 1, 0.5]))
    v = rationality_test(rat)
    assert v.kind == "rational"
    # gram entries are 1 and 2 (and 1/2 * ... ) so every value is a multiple of the scale
    vals = pair_values(rat, np.eye(4))
    assert np.allclose(np.round(vals / v.scale), vals / v.scale)


def test_json_round_trip_and_errors(tmp_path):
    g = np.diag([2 ** 0.25, 1, 1, 2 ** -0.25])
    f = SymplecticForm.from_matrix(2, g)
    f2 = form_from_json(json.dumps(f.to_json()))
    assert np.allclose(f.gram, f2.gram)
    e = form_from_json('{"n": 2, "g": [[1, "1/3", 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]]}')
    p = tmp_path / "f.json"
    p.write_text(json.dumps(e.to_json()))
    e2 = form_from_json(str(p))
    assert e2.is_exact and e2.exact_gram == e.exact_gram
    with pytest.raises(FormatError, match="'n'"):
        form_from_json('{"g": [[1]]}')
    with pytest.raises(FormatError, match="'g'"):
        form_from_json('{"n": 1, "g": [[1, "x"], [0, 1]]}')
    with pytest.raises(FormatError):
        form_from_json('{"n": 1}')
    with pytest.raises(FormatError):
        form_from_json(str(tmp_path / "missing.json"))
