"""Desk-scale experiments shared by the recipes and the acceptance suite.

Each function returns an Outcome with a verdict, printable detail lines and
table rows. Parameters default to the acceptance settings.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
import math
import random

import numpy as np
import scipy.linalg

from . import lie
from .density import integer_approx_search, verify_witness
from .enumeration import ball_volume, brute_force_count, count_tuples, fit_exponent, main_term
from .errors import HypothesisError
from .forms import SymplecticForm
from .randlat import discrepancy_sandwich, sample_lattice, siegel_transform
from .regions import Annulus, Ball
from .rogers import RrefTerm, block_diag, enum_rref_terms, exponent_window, weight_cd
from .volume import cg_identity, direct_volume, estimate_cg, main_volume

UNIT = (0.5, 1.5)
ZETA2 = math.pi ** 2 / 6
ZETA4 = math.pi ** 4 / 90


@dataclass
class Outcome:
    name: str
    passed: bool
    lines: list = field(default_factory=list)
    rows: list = field(default_factory=list)


def random_form(seed, n=2, scale=0.2):
    """g = expm(S) with S ~ scale * N(0, 1), rescaled to det 1."""
    rng = np.random.default_rng(seed)
    S = rng.normal(size=(2 * n, 2 * n)) * scale
    g = scipy.linalg.expm(S)
    g /= np.linalg.det(g) ** (1.0 / (2 * n))
    return SymplecticForm.from_matrix(n, g)


def counting_growth(seeds=(0, 1, 2), T_list=(6, 8, 10, 12), interval=UNIT, cg_samples=10 ** 6, threads=None):
    out = Outcome("counting growth", False)
    slopes_ok = 0
    improving = 0
    for seed in seeds:
        f = random_form(seed)
        cg = estimate_cg(f, 2, cg_samples, rng=seed)
        counts = [count_tuples(f, 2, T, interval, threads=threads) for T in T_list]
        ratios = [c / main_term(cg.value, 2, interval, T, 2) for c, T in zip(counts, T_list)]
        slope = fit_exponent(T_list, counts).slope
        slopes_ok += abs(slope - 6) <= 0.5
        improving += abs(ratios[-1] - 1) < abs(ratios[0] - 1)
        for T, c, r in zip(T_list, counts, ratios):
            out.rows.append({"seed": seed, "T": T, "count": c, "cg": cg.value, "cg_stderr": cg.stderr, "ratio": r})
        out.lines.append(f"seed {seed}: cg={cg.value:.4f}+-{cg.stderr:.4f} slope={slope:.3f} "
                         f"ratios={' '.join(f'{r:.4f}' for r in ratios)}")
    out.passed = slopes_ok == len(seeds) and improving >= 2
    return out


def volume_formula(T_list=(5, 10, 20), samples=10 ** 7, interval=UNIT, n=3, seed=0):
    out = Outcome("volume formula", True)
    f = SymplecticForm.standard(n)
    cg = cg_identity(n, 2)
    rng = np.random.default_rng(seed)
    prev = None
    for T in T_list:
        est = direct_volume(f, 2, interval, T, samples, rng)
        main = main_volume(cg, n, 2, interval, T)
        ratio = est.value / main
        se = est.stderr / main
        dev = abs(ratio - 1)
        ok = dev <= max(3 * se, 2 / T)
        if prev is not None and dev > prev[0] + 2 * max(se, prev[1]):
            ok = False
            out.lines.append(f"T={T}: deviation grew beyond 2 stderr")
        out.passed &= ok
        prev = (dev, se)
        out.rows.append({"T": T, "cg": cg, "main_term": main, "direct": est.value,
                         "direct_stderr": est.stderr, "ratio": ratio})
        out.lines.append(f"T={T}: direct/main={ratio:.5f} +- {se:.5f} ({'ok' if ok else 'off'})")
    return out


def stated_cg_constant(n):
    """The closed form as stated for the acceptance check: 2n V_2n V_2n-1 / (2n + 1)."""
    d = 2 * n
    return d * ball_volume(d) * ball_volume(d - 1) / (d + 1)


def coarea_cg_constant(n):
    """Closed form from the Gram-Schmidt coarea weight: 2n V_2n V_2n-1 / (2n - 1)."""
    d = 2 * n
    return d * ball_volume(d) * ball_volume(d - 1) / (d - 1)


def closed_form_cg(ns=(2, 3), samples=10 ** 6, seed=0):
    out = Outcome("closed-form coefficient", True)
    for n in ns:
        est = estimate_cg(SymplecticForm.standard(n), 2, samples, rng=seed)
        target = stated_cg_constant(n)
        ok = abs(est.value - target) <= 3 * est.stderr
        out.passed &= ok
        out.rows.append({"n": n, "cg": est.value, "cg_stderr": est.stderr, "stated": target,
                         "coarea": coarea_cg_constant(n)})
        out.lines.append(f"n={n}: estimate {est.value:.4f} +- {est.stderr:.2g}; stated {target:.4f}; "
                         f"coarea closed form {coarea_cg_constant(n):.4f}")
    return out


def primitive_factor(T=12, seed=0, interval=UNIT, threads=None):
    f = random_form(seed)
    N = count_tuples(f, 2, T, interval, threads=threads)
    Np = count_tuples(f, 2, T, interval, cls="primitive", threads=threads)
    ratio = Np / N
    target = 1 / ZETA4 ** 2
    out = Outcome("primitive factor", abs(ratio / target - 1) <= 0.05)
    out.rows.append({"T": T, "count": N, "primitive": Np, "ratio": ratio, "target": target})
    out.lines.append(f"T={T}: {Np}/{N} = {ratio:.5f}, target {target:.5f}")
    return out


def congruence_factor(T=12, N=2, v0=(1, 1, 1, 1), seed=0, interval=UNIT, threads=None):
    f = random_form(seed)
    full = count_tuples(f, 2, T, interval, threads=threads)
    cong = count_tuples(f, 2, T, interval, cls="congruence", v0=v0, modulus=N, threads=threads)
    ratio = cong / full
    target = float(N) ** -(2 * 2 * 2)
    out = Outcome("congruence factor", abs(ratio / target - 1) <= 0.12)
    out.rows.append({"T": T, "count": full, "congruence": cong, "ratio": ratio, "target": target})
    out.lines.append(f"T={T}: {cong}/{full} = {ratio:.6f}, target {target:.6f}")
    return out


def brute_index(D, q):
    """q^r / #{x in (Z/q)^r : x D = 0 mod q}, by listing residues."""
    r = len(D)
    k = len(D[0])
    sols = 0
    for x in product(range(q), repeat=r):
        if all(sum(x[i] * D[i][j] for i in range(r)) % q == 0 for j in range(k)):
            sols += 1
    return Fraction(q ** r, sols)


def rogers_weights(d=4, pairs=50, seed=0):
    out = Outcome("Rogers weights", True)
    terms = []
    for k in range(1, 4):
        for r in range(1, min(2, k) + 1):
            for q in range(1, 5):
                terms.extend(enum_rref_terms(k, r, q, 4))
    bad = 0
    for t in terms:
        w = weight_cd(t.D, t.q, d)
        idx = brute_index(t.D, t.q)
        if w.index != idx or w.value != Fraction(1) / idx ** d:
            bad += 1
    out.lines.append(f"{len(terms)} canonical terms, {bad} mismatches against the residue count")
    rng = random.Random(seed)
    small = [t for t in terms if t.k <= 2]
    bad_mult = 0
    for _ in range(pairs):
        a, b = rng.choice(small), rng.choice(small)
        c = block_diag(a, b)
        if weight_cd(c.D, c.q, d).value != weight_cd(a.D, a.q, d).value * weight_cd(b.D, b.q, d).value:
            bad_mult += 1
    out.lines.append(f"{pairs} block pairs, {bad_mult} multiplicativity failures")
    out.passed = bad == 0 and bad_mult == 0 and len(terms) > 0
    out.rows.append({"terms": len(terms), "mismatches": bad, "pairs": pairs, "mult_failures": bad_mult})
    return out


def siegel_mean_2d(areas=(1.0, 4.0), draws=10 ** 4, seed=0):
    out = Outcome("Siegel mean value (d=2)", True)
    rng = np.random.default_rng(seed)
    regions = [Annulus.with_area(A) for A in areas]
    vals = {(A, c): [] for A in areas for c in ("all", "primitive")}
    for _ in range(draws):
        lat = sample_lattice(2, "exact2d", rng)
        for A, R in zip(areas, regions):
            for c in ("all", "primitive"):
                vals[(A, c)].append(siegel_transform(lat, R, 1, c))
    for (A, c), v in vals.items():
        v = np.array(v, dtype=float)
        m, se = v.mean(), v.std(ddof=1) / math.sqrt(len(v))
        target = A if c == "all" else A / ZETA2
        ok = abs(m - target) <= 3 * se
        out.passed &= ok
        out.rows.append({"area": A, "class": c, "mean": m, "stderr": se, "target": target})
        out.lines.append(f"area {A} {c}: {m:.4f} +- {se:.4f} vs {target:.4f} ({'ok' if ok else 'off'})")
    return out


def discrepancy_check(lattices=1000, radii=(0.5, 1.0, 1.5), seed=0):
    rng = np.random.default_rng(seed)
    c = [[], [], []]
    for _ in range(lattices):
        lat = sample_lattice(2, "exact2d", rng)
        for j, r in enumerate(radii):
            c[j].append(siegel_transform(lat, Ball(r)))
    rep = discrepancy_sandwich(*c)
    out = Outcome("discrepancy max-inequality", rep.literal_violations == 0)
    out.lines.append(f"D2 <= max(D1, D3) fails on {rep.literal_violations} of {lattices} lattices")
    out.lines.append(f"|D2| <= max(|D1|, |D3|) + (E3 - E1) on all: {rep.max_inequality_holds}; "
                     f"two-sided sandwich bound on all: {rep.two_sided_holds}")
    out.rows.append({"lattices": lattices, "literal_violations": rep.literal_violations,
                     "corrected_holds": rep.max_inequality_holds, "two_sided_holds": rep.two_sided_holds})
    return out


def exponent_windows(max_dim=20):
    out = Outcome("exponent window", True)
    for k in (2, 3):
        for n in range(1, max_dim // 2 + 1):
            needs = 2 * n < k * k + 3
            try:
                w = exponent_window(n, k)
            except HypothesisError:
                ok = needs
                out.rows.append({"n": n, "k": k, "hypothesis": False, "delta_min": None, "alpha": None})
            else:
                delta = (w.delta_min + 1) / 2
                lo, hi = w.alpha_range(delta)
                ok = (not needs) and 0 < w.delta_min < 1 and lo < hi
                out.rows.append({"n": n, "k": k, "hypothesis": True, "delta_min": w.delta_min, "alpha": (lo, hi)})
            if not ok:
                out.lines.append(f"n={n} k={k}: unexpected window")
            out.passed &= ok
    out.lines.append(f"{len(out.rows)} (n, k) pairs checked")
    return out


def density_search(targets=20, eps=1e-2, budget=10 ** 6, seed=0):
    out = Outcome("density search", True)
    f = SymplecticForm.from_matrix(2, np.diag([2 ** 0.25, 1, 1, 2 ** -0.25]))
    rng = np.random.default_rng(seed)
    found = 0
    for i in range(targets):
        xi = float(rng.uniform(0.1, 3))
        r = integer_approx_search(f, {(0, 1): xi}, eps, budget, rng=i)
        ok = r.found and verify_witness(f, {(0, 1): xi}, r.witness, eps)
        found += ok
        out.rows.append({"target": xi, "found": r.found, "witness": r.witness, "residual": r.residual,
                         "nodes": r.nodes})
    out.lines.append(f"irrational form: {found}/{targets} found and re-verified")
    r = integer_approx_search(SymplecticForm.standard(2), {(0, 1): 1 / 3}, 0.1, budget, rng=0)
    out.lines.append(f"standard form, target 1/3, eps 0.1: {r.status} (best residual {r.best_residual:.4f})")
    out.rows.append({"target": 1 / 3, "found": r.found, "witness": r.witness, "residual": r.best_residual,
                     "nodes": r.nodes})
    out.passed = found == targets and not r.found
    return out


def lie_checks(ns=(2, 3, 4), randoms=10, seed=0):
    out = Outcome("Lie algebra checks", True)
    rng = random.Random(seed)
    for n in ns:
        dec = lie.verify_decomposition(n)
        ids = lie.bracket_identities(n)
        irr = lie.verify_irreducible(n)
        maxi = [lie.maximality_check(n, rng) for _ in range(randoms)]
        id_ok = all(i.holds for i in ids)
        max_ok = all(a == b for a, b in maxi)
        ok = dec.ok and id_ok and irr.ok and max_ok
        out.passed &= ok
        out.rows.append({"n": n, "decomposition": dec.ok, "identities": len(ids), "identities_ok": id_ok,
                         "irreducible": irr.ok, "maximality": max_ok})
        out.lines.append(f"n={n}: decomposition {dec.ok}, {len(ids)} bracket identities {id_ok}, "
                         f"irreducible {irr.ok}, maximality {sum(a == b for a, b in maxi)}/{randoms}")
    return out


def enumeration_oracle(cases=20, seed=0):
    out = Outcome("enumeration oracle", True)
    rng = np.random.default_rng(seed)
    for c in range(cases):
        n = int(rng.integers(1, 3))
        k = int(rng.integers(1, 4))
        T = float(rng.choice([1.5, 2.0, 2.5, 3.0]))
        f = random_form(int(rng.integers(1 << 30)), n=n, scale=0.4)
        cls = str(rng.choice(["all", "primitive", "congruence"]))
        v0 = modulus = None
        if cls == "congruence":
            modulus = int(rng.integers(2, 4))
            v0 = [0] * (2 * n)
            while math.gcd(modulus, *v0) != 1:
                v0 = [int(x) for x in rng.integers(0, modulus, size=2 * n)]
        a = float(rng.uniform(-3, 1))
        iv = {(i, j): (a, a + float(rng.uniform(0.5, 3))) for i in range(k) for j in range(i + 1, k)} if k > 1 else {}
        got = count_tuples(f, k, T, iv, cls=cls, v0=v0, modulus=modulus)
        ref = brute_force_count(f, k, T, iv, cls=cls, v0=v0, modulus=modulus)
        out.passed &= got == ref
        out.rows.append({"case": c, "n": n, "k": k, "T": T, "class": cls, "count": got, "brute": ref})
    out.lines.append(f"{sum(r['count'] == r['brute'] for r in out.rows)}/{cases} cases equal")
    return out


RECIPES = {
    "growth": counting_growth,
    "volume": volume_formula,
    "closed-form": closed_form_cg,
    "primitive": primitive_factor,
    "congruence": congruence_factor,
    "rogers": rogers_weights,
    "siegel2d": siegel_mean_2d,
    "discrepancy": discrepancy_check,
    "window": exponent_windows,
    "density": density_search,
    "lie": lie_checks,
    "enumeration": enumeration_oracle,
}
