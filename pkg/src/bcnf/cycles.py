"""Existence, admissibility, and stability of word-indexed periodic solutions."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import EPS_SW, Params, Point, all_shift_matrices, word_matrices
from .words import parse_word

ADMISSIBLE = "admissible"
VIRTUAL = "virtual"
BOUNDARY = "boundary"

ASYM_STABLE = "asymptotically-stable"
STABLE_NA = "stable-not-asymptotic"
SADDLE = "saddle"
UNSTABLE = "unstable"
NON_UNIQUE = "non-unique"


class NonUniqueCycle(ValueError):
    """det(I - M_S) = 0: the fixed-point equations are singular."""


@dataclass
class Cycle:
    word: str
    points: np.ndarray          # (n, 2), row i is the fixed point of the i-th shift
    det_IM: float               # det(I - M_S), shift independent
    detP: np.ndarray            # det P per shift
    multipliers: tuple[complex, complex]

    def point(self, i: int) -> Point:
        return Point(*self.points[i % len(self.points)])

    def to_dict(self) -> dict:
        l1, l2 = self.multipliers
        return {
            "word": str(self.word),
            "points": [[float(x), float(y)] for x, y in self.points],
            "det_IM": float(self.det_IM),
            "detP": [float(v) for v in self.detP],
            "multipliers": [[l1.real, l1.imag], [l2.real, l2.imag]],
        }


@dataclass
class CycleReport:
    cycle: Cycle | None
    admissibility: str | None
    side_flags: list[str] = field(default_factory=list)
    stability: str = NON_UNIQUE
    conditional: bool = False   # some point sits on the switching manifold

    def to_dict(self) -> dict:
        return {
            "cycle": self.cycle.to_dict() if self.cycle else None,
            "admissibility": self.admissibility,
            "side_flags": list(self.side_flags),
            "stability": self.stability,
            "conditional": self.conditional,
        }


def multipliers(p: Params, w: str) -> tuple[complex, complex]:
    """Eigenvalues of M_w by the quadratic formula, ordered |l1| <= |l2|."""
    M, _ = word_matrices(p, w)
    return _eigs_2x2(M)


def _eigs_2x2(M: np.ndarray) -> tuple[complex, complex]:
    t = M[0, 0] + M[1, 1]
    d = M[0, 0] * M[1, 1] - M[0, 1] * M[1, 0]
    disc = t * t - 4.0 * d
    if disc >= 0.0:
        r = math.sqrt(disc)
        # avoid cancellation: compute the large root first, the other via d
        if t >= 0.0:
            big = (t + r) / 2.0
        else:
            big = (t - r) / 2.0
        small = d / big if big != 0.0 else (t - r) / 2.0
        pair = sorted([complex(small), complex(big)], key=abs)
        return pair[0], pair[1]
    im = math.sqrt(-disc) / 2.0
    return complex(t / 2.0, -im), complex(t / 2.0, im)


def solve_cycle(p: Params, w: str, tol: float | None = None) -> Cycle:
    """All n fixed points (I - M_i)^{-1} P_i (mu, 0)^T, one per shift."""
    w = parse_word(w)
    shifts = all_shift_matrices(p, w)
    M0 = shifts[0][0]
    det_IM = float(np.linalg.det(np.eye(2) - M0))
    if tol is None:
        tol = EPS_SW * (1.0 + float(np.abs(M0).max()))
    if abs(det_IM) <= tol:
        raise NonUniqueCycle(f"det(I - M_{w}) = {det_IM:.3e}")
    e = np.array([p.mu, 0.0])
    pts = np.empty((len(w), 2))
    detP = np.empty(len(w))
    for i, (M, P) in enumerate(shifts):
        b = P @ e
        # adjugate solve with the shift-invariant determinant: det(I - M_i)
        # equals det_IM exactly, while the per-shift float det can collapse
        pts[i, 0] = ((1.0 - M[1, 1]) * b[0] + M[0, 1] * b[1]) / det_IM
        pts[i, 1] = (M[1, 0] * b[0] + (1.0 - M[0, 0]) * b[1]) / det_IM
        detP[i] = P[0, 0] * P[1, 1] - P[0, 1] * P[1, 0]
    return Cycle(word=w, points=pts, det_IM=det_IM, detP=detP,
                 multipliers=_eigs_2x2(M0))


def side_flags(p: Params, c: Cycle) -> list[str]:
    """Per-point sign-rule status: ok, violated, or boundary.

    The sign rule: det P_i must carry sgn(mu det(I - M_S)) for an R symbol and
    the opposite sign for an L symbol. Points with x within the scaled boundary
    tolerance of the manifold are flagged boundary and impose no restriction.
    """
    if p.mu == 0.0:
        raise ValueError("admissibility undefined at mu = 0")
    ref = math.copysign(1.0, p.mu * c.det_IM)
    xscale = max(1.0, float(np.abs(c.points).max()))
    flags = []
    for i, s in enumerate(c.word):
        xi = c.points[i, 0]
        if abs(xi) <= EPS_SW * xscale:
            flags.append(BOUNDARY)
            continue
        want = ref if s == "R" else -ref
        flags.append("ok" if math.copysign(1.0, c.detP[i]) == want else "violated")
    return flags


def admissibility(p: Params, c: Cycle) -> str:
    flags = side_flags(p, c)
    if "violated" in flags:
        return VIRTUAL
    if BOUNDARY in flags:
        return BOUNDARY
    return ADMISSIBLE


def stability(p: Params, c: Cycle, tol: float | None = None) -> str:
    """Classification from det and trace of M_S alone."""
    l1, l2 = c.multipliers
    det = (l1 * l2).real
    tr = (l1 + l2).real
    return _stability_from_trace_det(det, tr, tol)


def _stability_from_trace_det(det: float, tr: float, tol: float | None = None) -> str:
    if tol is None:
        tol = 1e-9 * (1.0 + abs(det) + abs(tr))
    c8 = det - tr + 1.0   # eigenvalue 1 boundary
    c9 = det + tr + 1.0   # eigenvalue -1 boundary
    c10 = 1.0 - det       # unit-modulus boundary
    if abs(c8) <= tol:
        return NON_UNIQUE
    if c8 > 0.0 and c9 > tol and c10 > tol:
        return ASYM_STABLE
    if c8 > 0.0 and c9 >= -tol and c10 >= -tol:
        return STABLE_NA
    if c8 * c9 < 0.0:
        return SADDLE
    return UNSTABLE


def classify(p: Params, w: str) -> CycleReport:
    """Solve plus admissibility plus stability in one report."""
    try:
        c = solve_cycle(p, w)
    except NonUniqueCycle:
        return CycleReport(cycle=None, admissibility=None, stability=NON_UNIQUE)
    flags = side_flags(p, c)
    if "violated" in flags:
        adm = VIRTUAL
    elif BOUNDARY in flags:
        adm = BOUNDARY
    else:
        adm = ADMISSIBLE
    return CycleReport(cycle=c, admissibility=adm, side_flags=flags,
                       stability=stability(p, c),
                       conditional=BOUNDARY in flags)
