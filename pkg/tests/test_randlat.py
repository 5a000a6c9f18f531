import math
from fractions import Fraction
from itertools import product

import numpy as np
import pytest
from hypothesis import given, strategies as st

from sympval.errors import DimensionError
from sympval.forms import SymplecticForm
from sympval.enumeration import count_tuples
from sympval.lll import lll
from sympval.randlat import (
    Lattice, class_mask, discrepancy_sandwich, sample_lattice, sample_transform,
    short_vectors, siegel_transform,
)
from sympval.regions import Annulus, Ball, Product, SymplecticRegion


def _brute_short(B, radius, box):
    pts = []
    d = B.shape[0]
    for c in product(range(-box, box + 1), repeat=d):
        if any(c):
            x = B @ np.array(c, float)
            if x @ x < radius * radius:
                pts.append(tuple(c))
    return sorted(pts)


def _lat(B):
    R, U = lll(B)
    return Lattice(np.asarray(B, float), R, U)


@given(st.integers(0, 10 ** 6), st.integers(2, 5))
def test_lll_transform_is_unimodular_and_reduces(seed, d):
    rng = np.random.default_rng(seed)
    B = rng.standard_normal((d, d)) @ np.triu(rng.integers(-5, 6, (d, d)), 1) + rng.standard_normal((d, d))
    if abs(np.linalg.det(B)) < 1e-3:
        return
    R, U = lll(B)
    assert abs(round(np.linalg.det(U))) == 1
    assert np.allclose(B @ U, R, atol=1e-8 * max(1.0, np.abs(B).max() * np.abs(U).max()))
    Q, T = np.linalg.qr(R)
    mu = T / np.diag(T)[:, None]  # mu[j, i] = <b_i, b*_j> / |b*_j|^2
    off = np.abs(np.triu(mu, 1))
    assert off.max(initial=0.0) <= 0.5 + 1e-6


def test_short_vectors_match_box_listing():
    rng = np.random.default_rng(3)
    for d in (2, 3, 4):
        for _ in range(5):
            lat = sample_lattice(d, "siegel" if d > 2 else "exact2d", rng)
            # coefficient bound |c_i| <= r * ||row_i(B^-1)||
            Binv = np.linalg.inv(lat.basis)
            r = 1.3
            box = int(math.ceil(r * np.linalg.norm(Binv, axis=1).max()))
            want = _brute_short(lat.basis, r, box)
            pts, coeff = short_vectors(lat, r)
            assert sorted(map(tuple, coeff.tolist())) == want
            assert np.allclose(pts, coeff @ lat.basis.T)


def test_z2_ball_count():
    lat = _lat(np.eye(2))
    assert siegel_transform(lat, Ball(1.5)) == 8
    assert siegel_transform(lat, Ball(1e-3)) == 0


def test_product_region_squares_single_count():
    rng = np.random.default_rng(5)
    lat = sample_lattice(3, "siegel", rng)
    A = Ball(1.7)
    one = siegel_transform(lat, A)
    assert siegel_transform(lat, Product([A, A]), k=2) == one ** 2


def test_exact2d_normalised_and_in_fundamental_domain():
    rng = np.random.default_rng(11)
    bound = 2 / math.sqrt(3)
    for _ in range(2000):
        lat = sample_lattice(2, "exact2d", rng)
        assert abs(np.linalg.det(lat.basis) - 1) <= 1e-9
        lam2 = min(np.sum(lat.reduced ** 2, axis=0))
        assert lam2 <= bound + 1e-12
    # the bound is attained only at the hexagonal corner tau = exp(i pi / 3)
    B = _lat(np.array([[1, 0.5], [0, math.sqrt(3) / 2]]) / (math.sqrt(3) / 2) ** 0.5)
    assert np.isclose(min(np.sum(B.reduced ** 2, axis=0)), bound)


def test_siegel_sampler_unimodular():
    rng = np.random.default_rng(2)
    for d in (3, 4, 6):
        for _ in range(50):
            lat = sample_lattice(d, "siegel", rng)
            assert abs(np.linalg.det(lat.basis) - 1) <= 1e-9
            assert np.allclose(lat.basis @ lat.U, lat.reduced, atol=1e-9)


def test_sampler_mode_errors():
    rng = np.random.default_rng(0)
    with pytest.raises(DimensionError):
        sample_lattice(3, "exact2d", rng)
    with pytest.raises(ValueError):
        sample_lattice(2, "haar", rng)


def test_exact2d_mean_small_run():
    s = sample_transform(2, "exact2d", 2000, Annulus.with_area(2.0), rng=1)
    assert abs(s.mean - 2.0) <= 4 * s.stderr


def test_vacuous_region_has_zero_moments():
    s = sample_transform(2, "exact2d", 100, Ball(1e-6), rng=0)
    assert s.mean == 0 and s.stderr == 0


def test_primitive_never_exceeds_all():
    rng = np.random.default_rng(9)
    R = Annulus.with_area(6.0)
    for _ in range(200):
        lat = sample_lattice(2, "exact2d", rng)
        assert siegel_transform(lat, R, cls="primitive") <= siegel_transform(lat, R)


def test_class_mask():
    c = np.array([[2, 4], [3, 5], [0, 1], [0, 0], [1, 3]])
    assert class_mask(c, "all").all()
    assert class_mask(c, "primitive").tolist() == [False, True, True, False, True]
    assert class_mask(c, "congruence", v0=[1, 1], modulus=2).tolist() == [False, True, False, False, True]
    with pytest.raises(ValueError):
        class_mask(c, "odd")


def test_symplectic_region_on_standard_lattice_matches_count():
    lat = _lat(np.eye(4))
    iv = (-1.0, 1.0)
    for T in (1.5, 2.5):
        R = SymplecticRegion(T, iv, 2)
        want = count_tuples(SymplecticForm.standard(2), 2, T, iv)
        assert siegel_transform(lat, R) == want


def test_sandwich_counterexample_breaks_literal_bound():
    # F1 = 0 everywhere; F2 and F3 positive on one lattice
    r = discrepancy_sandwich([0, 0], [1, 0], [1, 3])
    assert r.means == (Fraction(0), Fraction(1, 2), Fraction(2))
    assert r.literal_violations == 1
    assert r.max_inequality_holds and r.two_sided_holds


def test_sandwich_rejects_unordered_counts():
    with pytest.raises(ValueError):
        discrepancy_sandwich([1], [0], [2])
    with pytest.raises(ValueError):
        discrepancy_sandwich([0, 1], [1], [2])


@given(st.lists(st.tuples(st.integers(0, 20), st.integers(0, 20), st.integers(0, 20)), min_size=1, max_size=30))
def test_corrected_bounds_always_hold(rows):
    a = [min(r) for r in rows]
    c = [max(r) for r in rows]
    b = [sorted(r)[1] for r in rows]
    r = discrepancy_sandwich(a, b, c)
    assert r.max_inequality_holds and r.two_sided_holds


def test_sampled_balls_satisfy_corrected_bounds():
    rng = np.random.default_rng(4)
    c = [[], [], []]
    for _ in range(300):
        lat = sample_lattice(2, "exact2d", rng)
        for j, r in enumerate((0.6, 1.0, 1.4)):
            c[j].append(siegel_transform(lat, Ball(r)))
    r = discrepancy_sandwich(*c)
    assert r.max_inequality_holds and r.two_sided_holds


@pytest.mark.slow
def test_siegel_sampler_bias_is_qualitative():
    # Siegel-set sampling is not exact Haar; the d=3 mean is visibly below the volume
    s = sample_transform(3, "siegel", 1500, Ball(1.0), rng=0)
    vol = 4 / 3 * math.pi
    assert 0.7 * vol < s.mean < 1.05 * vol


@pytest.mark.slow
def test_variance_growth_is_below_second_moment_exponent():
    from sympval.rogers import variance_exponent

    Ts = (3.0, 5.0, 8.0)
    var = [sample_transform(4, "siegel", 40, SymplecticRegion(T, (0.5, 1.5), 2), rng=0).values.var(ddof=1)
           for T in Ts]
    slope = np.polyfit(np.log(Ts), np.log(var), 1)[0]
    assert 0 < slope <= variance_exponent(2, 2) + 2
