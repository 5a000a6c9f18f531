from itertools import product
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from sympval.enumeration import (ball_volume, brute_force_count, count_tuples, enum_ball, error_budget,
                                 fit_exponent, growth_exponent, main_term)
from sympval.errors import CapacityError, FitError
from sympval.experiments import random_form
from sympval.forms import SymplecticForm


def naive_points(dim, T, cls="all", v0=None, N=None):
    R = int(math.floor(T))
    out = []
    for v in product(range(-R, R + 1), repeat=dim):
        if sum(x * x for x in v) >= T * T or not any(v):
            continue
        if cls == "primitive" and math.gcd(*v) != 1:
            continue
        if cls == "congruence" and any((x - y) % N for x, y in zip(v, v0)):
            continue
        out.append(v)
    return out


def naive_count(form, k, T, iv, cls="all", v0=None, N=None):
    P = np.array(naive_points(form.dim, T, cls, v0, N), dtype=float)
    V = P @ form.gram @ P.T
    # parallel integer vectors pair to exactly zero; other values of these generic forms are far from 0
    Pi = P.astype(np.int64)
    G = (Pi @ Pi.T) ** 2 == np.outer((Pi * Pi).sum(1), (Pi * Pi).sum(1))
    V[G] = 0.0
    if form.n == 1:
        # in the plane g^T J g = det(g) J = J, so values are integer determinants
        V = (Pi @ np.array([[0, 1], [-1, 0]]) @ Pi.T).astype(float)
    # endpoint convention: within 1e-9 (relative) of an endpoint counts as on it
    tol = {key: 1e-9 * max(1.0, abs(a), abs(b)) for key, (a, b) in iv.items()}
    total = 0
    for tup in product(range(len(P)), repeat=k):
        if all(iv[(i, j)][0] + tol[(i, j)] < V[tup[i], tup[j]] < iv[(i, j)][1] - tol[(i, j)]
               for i in range(k) for j in range(i + 1, k)):
            total += 1
    return total


def test_small_ball():
    pts = enum_ball(2, 1.5)
    assert len(pts) == 8
    assert {tuple(p) for p in pts} == {(1, 0), (-1, 0), (0, 1), (0, -1), (1, 1), (1, -1), (-1, 1), (-1, -1)}
    assert len(enum_ball(2, 1.5, include_zero=True)) == 9


@given(st.integers(1, 4), st.floats(0.5, 3.5), st.sampled_from(["all", "primitive", "congruence"]),
       st.integers(2, 3), st.integers(0, 10 ** 6))
def test_enum_ball_matches_listing(dim, T, cls, N, seed):
    v0 = None
    if cls == "congruence":
        rng = np.random.default_rng(seed)
        v0 = [0] * dim
        while math.gcd(N, *v0) != 1:
            v0 = [int(x) for x in rng.integers(0, N, dim)]
    got = {tuple(map(int, p)) for p in enum_ball(dim, T, cls, v0, N)}
    assert got == set(naive_points(dim, T, cls, v0, N))


def test_ball_volume_values():
    assert ball_volume(2) == pytest.approx(math.pi)
    assert ball_volume(4) == pytest.approx(math.pi ** 2 / 2)
    assert ball_volume(3, 2.0) == pytest.approx(4 / 3 * math.pi * 8)


def test_growth_exponents():
    assert growth_exponent(2, 2) == 6
    assert growth_exponent(3, 2) == 10
    assert growth_exponent(3, 3) == 12


@st.composite
def cases(draw):
    n = draw(st.integers(1, 2))
    k = draw(st.integers(2, 3 if n == 1 else 2))
    T = draw(st.sampled_from([1.5, 2.0, 2.5]))
    seed = draw(st.integers(0, 2 ** 31))
    cls = draw(st.sampled_from(["all", "primitive", "congruence"]))
    a = draw(st.floats(-3, 2))
    w = draw(st.floats(0.2, 4))
    return n, k, T, seed, cls, (a, a + w)


@given(cases())
def test_count_matches_naive(case):
    n, k, T, seed, cls, iv = case
    f = random_form(seed, n=n, scale=0.4)
    v0 = N = None
    if cls == "congruence":
        N, v0 = 2, [1] + [0] * (2 * n - 1)
    ivd = {(i, j): iv for i in range(k) for j in range(i + 1, k)}
    assert count_tuples(f, k, T, iv, cls=cls, v0=v0, modulus=N) == naive_count(f, k, T, ivd, cls, v0, N)


def test_count_mixed_intervals_and_brute():
    f = random_form(7)
    iv = {(0, 1): (0.2, 2.0), (0, 2): (-1.0, 1.0), (1, 2): (-3.0, 0.5)}
    c = count_tuples(f, 3, 2.0, iv)
    assert c == brute_force_count(f, 3, 2.0, iv) == naive_count(f, 3, 2.0, iv)


def test_reversed_pair_interval():
    f = random_form(3)
    a = count_tuples(f, 2, 2.5, {(0, 1): (0.5, 1.5)})
    b = count_tuples(f, 2, 2.5, {(1, 0): (-1.5, -0.5)})
    assert a == b


def test_standard_form_exact_small_count():
    # pairs of vectors in B(1.5) of Z^2 with det = v1 w2 - v2 w1 equal to 1
    f = SymplecticForm.standard(1)
    pts = naive_points(2, 1.5)
    expected = sum(1 for v in pts for w in pts if v[0] * w[1] - v[1] * w[0] == 1)
    # each axis vector has 3 partners, each diagonal one 2
    assert count_tuples(f, 2, 1.5, (0.5, 1.5)) == expected == 4 * 3 + 4 * 2


def test_capacity_error():
    with pytest.raises(CapacityError):
        enum_ball(8, 40.0)
    with pytest.raises(CapacityError):
        enum_ball(4, 10.0, max_points=1000)


def test_fit_exponent():
    Ts = [2.0, 3.0, 5.0, 7.0]
    fit = fit_exponent(Ts, [3.0 * T ** 6 for T in Ts])
    assert fit.slope == pytest.approx(6.0)
    assert math.exp(fit.intercept) == pytest.approx(3.0)
    with pytest.raises(FitError):
        fit_exponent([2.0, 3.0], [1.0, 2.0])
    with pytest.raises(FitError):
        fit_exponent([2.0, 3.0, 4.0], [0.0, 0.0, 5.0])


def test_main_term_and_budget():
    assert main_term(2.0, 2, (0.5, 1.5), 3.0, 2) == pytest.approx(2.0 * 3.0 ** 6)
    assert main_term(1.0, 3, (0.0, 0.5), 2.0, 3) == pytest.approx(0.125 * 2.0 ** 12)
    # S0 T^(Q - (2n - k - 1)) + S1 T^(Q - 2) with n=3, k=2, Q=10
    assert error_budget(3, 2, 2.0, 1.0, [1.0]) == pytest.approx(2.0 ** 7 + 2.0 ** 8)


def test_primitive_factor_constant():
    import sympy

    z4 = float(sympy.zeta(4))
    assert z4 == pytest.approx(math.pi ** 4 / 90, rel=1e-15)
    assert 1 / z4 ** 2 == pytest.approx(0.8537, abs=1e-4)
