"""Bounded indicator regions in (R^d)^k used by Siegel transforms and Rogers integrals."""

import json
import math

import numpy as np

from .enumeration import ball_volume, normalize_intervals
from .errors import DimensionError
from .forms import standard_J


class Ball:
    k = 1

    def __init__(self, radius):
        self.radius = float(radius)

    def mask(self, X):
        return np.sum(X * X, axis=-1) < self.radius ** 2

    def indicator(self, Y):
        return self.mask(Y[:, 0])

    def volume(self, d):
        return ball_volume(d, self.radius)

    def to_json(self):
        return {"type": "ball", "radius": self.radius}


class Annulus:
    k = 1

    def __init__(self, r_in, r_out):
        if not 0 <= r_in < r_out:
            raise ValueError("need 0 <= r_in < r_out")
        self.r_in, self.r_out = float(r_in), float(r_out)
        self.radius = self.r_out

    @classmethod
    def with_area(cls, area, r_in=0.5, d=2):
        r_out = ((area + ball_volume(d, r_in)) / ball_volume(d)) ** (1.0 / d)
        return cls(r_in, r_out)

    def mask(self, X):
        s = np.sum(X * X, axis=-1)
        return (s > self.r_in ** 2) & (s < self.r_out ** 2)

    def indicator(self, Y):
        return self.mask(Y[:, 0])

    def volume(self, d):
        return ball_volume(d, self.r_out) - ball_volume(d, self.r_in)

    def to_json(self):
        return {"type": "annulus", "r_in": self.r_in, "r_out": self.r_out}


class Product:
    """F(v_1..v_k) = prod_i A_i(v_i) for k-1 regions A_i."""

    def __init__(self, factors):
        self.factors = list(factors)
        self.k = len(self.factors)
        self.radius = max(f.radius for f in self.factors)

    def indicator(self, Y):
        out = np.ones(Y.shape[0], dtype=bool)
        for i, f in enumerate(self.factors):
            out &= f.mask(Y[:, i])
        return out

    def volume(self, d):
        return math.prod(f.volume(d) for f in self.factors)

    def to_json(self):
        return {"type": "product", "factors": [f.to_json() for f in self.factors]}


class SymplecticRegion:
    """E_{I,T}: |v_i| < T and <v_i, v_j> in I_ij for the standard form."""

    def __init__(self, T, intervals, k):
        self.T = float(T)
        self.k = int(k)
        self.intervals = normalize_intervals(self.k, intervals)
        self.radius = self.T

    def indicator(self, Y):
        m, k, d = Y.shape
        if d % 2:
            raise DimensionError("symplectic regions need even dimension")
        J = standard_J(d // 2).astype(float)
        out = np.all(np.sum(Y * Y, axis=-1) < self.T ** 2, axis=1)
        for (i, j), (a, b) in self.intervals.items():
            val = np.einsum("md,md->m", Y[:, i] @ J, Y[:, j])
            out &= (val > a) & (val < b)
        return out

    def to_json(self):
        iv = [[i + 1, j + 1, a, b] for (i, j), (a, b) in self.intervals.items()]
        return {"type": "symplectic", "T": self.T, "intervals": iv}


def region_from_json(obj, k=1):
    if isinstance(obj, str):
        obj = json.loads(obj)
    t = obj.get("type")
    if t == "ball":
        r = Ball(obj["radius"])
    elif t == "annulus":
        if "area" in obj:
            r = Annulus.with_area(obj["area"], obj.get("r_in", 0.5), obj.get("d", 2))
        else:
            r = Annulus(obj["r_in"], obj["r_out"])
    elif t == "product":
        return Product([region_from_json(f) for f in obj["factors"]])
    elif t == "symplectic":
        if "interval" in obj:
            iv = tuple(obj["interval"])
        else:
            iv = {(int(i) - 1, int(j) - 1): (a, b) for i, j, a, b in obj["intervals"]}
        return SymplecticRegion(obj["T"], iv, obj.get("k", k))
    else:
        raise ValueError(f"unknown region type {t!r}")
    return r if k == 1 else Product([r] * k)
