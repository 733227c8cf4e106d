"""The piecewise-linear map itself: half-map matrices, iteration, word compositions.

The map acts on the plane as z -> A_J z + (mu, 0), with J = L for x <= 0 and
J = R for x >= 0; both branches agree on the switching manifold x = 0.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Iterable, NamedTuple

import numpy as np

from .words import parse_word

# boundary tolerance for "on the switching manifold", scaled by magnitude at use sites
EPS_SW = 1e-12


class NonInvertibleMap(ValueError):
    """Backward iteration needs delta_L * delta_R > 0."""


class Point(NamedTuple):
    x: float
    y: float


# 2x2 real matrix; plain ndarray, the alias only marks intent in signatures
Mat2 = np.ndarray


class AffineMap2(NamedTuple):
    """z -> linear @ z + offset on R^2."""
    linear: Mat2
    offset: np.ndarray

    def __call__(self, z) -> np.ndarray:
        return self.linear @ np.asarray(z, dtype=float) + self.offset


class Params(NamedTuple):
    tau_L: float
    delta_L: float
    tau_R: float
    delta_R: float
    mu: float

    @property
    def invertible(self) -> bool:
        return self.delta_L * self.delta_R > 0.0

    @classmethod
    def from_dict(cls, d: dict) -> "Params":
        """Parse a params mapping. String values go through Fraction so exact
        decimal (or p/q) text reproduces the same double every time."""
        extra = set(d) - set(cls._fields)
        if extra:
            raise ValueError(f"unknown parameter(s) {sorted(extra)}")
        vals = []
        for name in cls._fields:
            if name not in d:
                raise ValueError(f"missing parameter {name!r}")
            v = d[name]
            if isinstance(v, str):
                try:
                    v = float(Fraction(v))
                except (ValueError, ZeroDivisionError) as e:
                    raise ValueError(f"bad value for {name!r}: {d[name]!r}") from e
            v = float(v)
            if not np.isfinite(v):
                raise ValueError(f"parameter {name!r} must be finite")
            vals.append(v)
        return cls(*vals)

    def to_dict(self) -> dict:
        return {k: float(v) for k, v in zip(self._fields, self)}


def half_matrix(p: Params, J: str) -> np.ndarray:
    """Companion matrix of the J half-map: trace tau_J, determinant delta_J."""
    J = J.upper()
    if J == "L":
        t, d = p.tau_L, p.delta_L
    elif J == "R":
        t, d = p.tau_R, p.delta_R
    else:
        raise ValueError(f"half-map symbol must be L or R, got {J!r}")
    return np.array([[t, 1.0], [-d, 0.0]])


def apply_map(p: Params, z) -> Point:
    """One forward step. The R branch is used at x = 0 (branches agree there)."""
    x, y = float(z[0]), float(z[1])
    if x >= 0.0:
        return Point(p.tau_R * x + y + p.mu, -p.delta_R * x)
    return Point(p.tau_L * x + y + p.mu, -p.delta_L * x)


def apply_following(p: Params, w: str, z) -> list[Point]:
    """Orbit that follows the word symbol by symbol, ignoring admissibility.

    Returns n+1 points, orbit[0] = z.
    """
    w = parse_word(w)
    orbit = [Point(float(z[0]), float(z[1]))]
    for s in w:
        x, y = orbit[-1]
        if s == "R":
            orbit.append(Point(p.tau_R * x + y + p.mu, -p.delta_R * x))
        else:
            orbit.append(Point(p.tau_L * x + y + p.mu, -p.delta_L * x))
    return orbit


def word_matrices(p: Params, w: str) -> tuple[np.ndarray, np.ndarray]:
    """(M_w, P_w) with f^w(z) = M_w z + P_w (mu, 0)^T, built right-to-left."""
    w = parse_word(w)
    M = np.eye(2)
    P = np.zeros((2, 2))
    I = np.eye(2)
    for s in w:
        A = half_matrix(p, s)
        M = A @ M
        P = A @ P + I
    return M, P


def all_shift_matrices(p: Params, w: str) -> list[tuple[np.ndarray, np.ndarray]]:
    """(M, P) for every left shift of w in O(n) matrix products.

    Prefix B_i = M_{w[:i]}, Pv_i = P_{w[:i]}; suffix C_i = M_{w[i:]},
    Pu_i = P_{w[i:]}. The shift w[i:] + w[:i] then composes as
    M = B_i C_i, P = B_i Pu_i + Pv_i.
    """
    w = parse_word(w)
    n = len(w)
    A = {s: half_matrix(p, s) for s in "LR"}
    I = np.eye(2)
    B = [I]
    Pv = [np.zeros((2, 2))]
    for i in range(n):
        B.append(A[w[i]] @ B[-1])
        Pv.append(A[w[i]] @ Pv[-1] + I)
    C = [None] * (n + 1)
    Pu = [None] * (n + 1)
    C[n] = I
    Pu[n] = np.zeros((2, 2))
    for i in range(n - 1, -1, -1):
        C[i] = C[i + 1] @ A[w[i]]
        Pu[i] = C[i + 1] + Pu[i + 1]
    return [(B[i] @ C[i], B[i] @ Pu[i] + Pv[i]) for i in range(n)]


def invert_map(p: Params, z) -> Point:
    """The unique preimage. Picks the half-map inverse that lands in its own
    half-plane; preimages are separated by the image line y = 0."""
    if not p.invertible:
        raise NonInvertibleMap(
            f"delta_L*delta_R = {p.delta_L * p.delta_R:g} <= 0")
    x, y = float(z[0]), float(z[1])
    tol = EPS_SW * max(1.0, abs(x), abs(y))
    # A_J^{-1}(z - (mu,0)) = (-y/delta_J, (x - mu) + tau_J*y/delta_J)
    wR = Point(-y / p.delta_R, (x - p.mu) + p.tau_R * y / p.delta_R)
    if wR.x >= -tol:
        return wR
    wL = Point(-y / p.delta_L, (x - p.mu) + p.tau_L * y / p.delta_L)
    if wL.x <= tol:
        return wL
    raise ValueError(f"no consistent inverse branch at ({x:g}, {y:g})")
