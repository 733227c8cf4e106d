"""Homoclinic corner points, the switching-crossing count, and manifold polylines.

Everything here is piecewise-affine geometry: a straight segment maps to a
straight segment as long as it stays in one half-plane, so polylines only
need exact split vertices inserted where they straddle the switching set
(x = 0 forward, y = 0 backward, since f maps {x=0} onto {y=0}).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import NonInvertibleMap, Params, Point, apply_map, invert_map
from .design import DegenerateDesign, conjugate_affine, design_frame, hat_y, saddle_frame
from .words import alpha_index, parse_word


@dataclass
class HomoclinicQuad:
    """Corner points of the invariant quadrilateral, in frame and plane coords."""
    a_uv: Point
    b_uv: Point
    c_uv: Point
    d_uv: Point
    a_xy: Point
    b_xy: Point
    c_xy: Point
    d_xy: Point
    phi0: Point
    phi_alpha: Point
    alpha: int

    def to_dict(self) -> dict:
        return {
            "a_uv": list(self.a_uv), "b_uv": list(self.b_uv),
            "c_uv": list(self.c_uv), "d_uv": list(self.d_uv),
            "a_xy": list(self.a_xy), "b_xy": list(self.b_xy),
            "c_xy": list(self.c_xy), "d_xy": list(self.d_xy),
            "phi0": list(self.phi0), "phi_alpha": list(self.phi_alpha),
            "alpha": self.alpha,
        }


@dataclass
class ManifoldPolyline:
    branch: str  # "unstable+", "unstable-", "stable+", "stable-"
    vertices: np.ndarray  # (n, 2)

    def to_dict(self) -> dict:
        return {"branch": self.branch, "vertices": self.vertices.tolist()}


def homoclinic_points(p: Params, X: str, Y: str) -> HomoclinicQuad:
    """Limit corners of the family anchor points, plus the primary
    switching-manifold orbit point and its return index."""
    X, Y = parse_word(X), parse_word(Y)
    fr = design_frame(p, X, Y)
    gY = conjugate_affine(p, Y, fr)
    gam, sig = gY.linear, gY.offset
    denom = 1.0 - gam[0, 1] * gam[1, 0]
    if abs(denom) <= 1e-12 * (1.0 + abs(gam).max() ** 2):
        raise DegenerateDesign("1 - gamma12*gamma21 vanishes")
    lam1 = fr.lambda1
    s1 = sig[0]
    a_uv = Point(0.0, gam[1, 0] * s1 * lam1 / denom)
    b_uv = Point(0.0, gam[1, 0] * s1 / denom)
    c_uv = Point(s1 / denom, 0.0)
    d_uv = Point(s1 * lam1 / denom, 0.0)
    alpha = alpha_index(X, Y)
    phi0 = Point(0.0, hat_y(p, X, Y))
    z = phi0
    for _ in range(alpha):
        z = apply_map(p, z)
    return HomoclinicQuad(
        a_uv=a_uv, b_uv=b_uv, c_uv=c_uv, d_uv=d_uv,
        a_xy=fr.to_xy(a_uv), b_xy=fr.to_xy(b_uv),
        c_xy=fr.to_xy(c_uv), d_xy=fr.to_xy(d_uv),
        phi0=phi0, phi_alpha=z, alpha=alpha)


def _split_on_axis(V: np.ndarray, axis: int) -> np.ndarray:
    """Insert exact zero vertices where consecutive points straddle coord=0.

    Along a straight sub-segment the coordinate is affine in arc length, so
    linear interpolation locates the crossing exactly; the crossing coordinate
    is snapped to 0 where both map branches agree.
    """
    c = V[:, axis]
    straddle = np.sign(c[:-1]) * np.sign(c[1:]) < 0
    if not straddle.any():
        return V
    out = []
    for i in range(len(V) - 1):
        out.append(V[i])
        if straddle[i]:
            t = c[i] / (c[i] - c[i + 1])
            z = V[i] + t * (V[i + 1] - V[i])
            z[axis] = 0.0
            out.append(z)
    out.append(V[-1])
    return np.array(out)


def map_polyline_forward(p: Params, V: np.ndarray) -> np.ndarray:
    V = _split_on_axis(np.asarray(V, dtype=float), 0)
    return np.array([apply_map(p, z) for z in V])


def map_polyline_backward(p: Params, V: np.ndarray) -> np.ndarray:
    # the switching set of the inverse map is the image of x=0, which is y=0
    V = _split_on_axis(np.asarray(V, dtype=float), 1)
    return np.array([invert_map(p, z) for z in V])


def phi_chain(p: Params, X: str, Y: str,
              segment_resolution: int = 256) -> list[np.ndarray]:
    """Phi_0 = segment a-b sampled, then its n_X + n_Y forward images."""
    X, Y = parse_word(X), parse_word(Y)
    if segment_resolution < 1:
        raise ValueError("segment_resolution must be >= 1")
    q = homoclinic_points(p, X, Y)
    t = np.linspace(0.0, 1.0, segment_resolution + 1)[:, None]
    a = np.asarray(q.a_xy, dtype=float)
    b = np.asarray(q.b_xy, dtype=float)
    V = a + t * (b - a)
    chain = []
    for _ in range(len(X) + len(Y)):
        V = _split_on_axis(V, 0)
        chain.append(V)
        V = np.array([apply_map(p, z) for z in V])
    chain.append(V)
    return chain


def xi_crossings(p: Params, X: str, Y: str,
                 segment_resolution: int = 256) -> list[Point]:
    """Transversal intersections of the segment chain with the switching manifold.

    The chain Phi_0 .. Phi_{n_X+n_Y-1} (the last image, which lies on the
    stable axis, is excluded) is walked for strict sign changes of x; a vertex
    sitting on x = 0 counts when its nonzero neighbors straddle.
    """
    chain = phi_chain(p, X, Y, segment_resolution)
    scale = max(1.0, max(float(np.abs(V).max()) for V in chain))
    tol = 1e-9 * scale
    found: list[np.ndarray] = []

    def push(z):
        for w in found:
            if np.hypot(*(z - w)) <= 1e-7 * scale:
                return
        found.append(z)

    for V in chain[:-1]:
        x = V[:, 0]
        sgn = np.where(np.abs(x) <= tol, 0, np.sign(x))
        for i in range(len(V)):
            if sgn[i] == 0:
                before = next((sgn[j] for j in range(i - 1, -1, -1) if sgn[j] != 0), 0)
                after = next((sgn[j] for j in range(i + 1, len(V)) if sgn[j] != 0), 0)
                if before * after < 0:
                    push(V[i])
            elif i + 1 < len(V) and sgn[i + 1] != 0 and sgn[i] * sgn[i + 1] < 0:
                t = x[i] / (x[i] - x[i + 1])
                z = V[i] + t * (V[i + 1] - V[i])
                z[0] = 0.0
                push(z)
    return [Point(z[0], z[1]) for z in found]


def manifold_polyline(p: Params, X: str, branch: str, seed_scale: float = 1e-3,
                      steps: int = 12) -> ManifoldPolyline:
    """Invariant-manifold branch of the X-cycle point as a vertex polyline.

    A step is one full return (len(X) map applications), since only the
    period map fixes the cycle point. Unstable branches grow forward from a
    seed along zeta2; stable branches grow backward along zeta1 and need an
    invertible map.
    """
    X = parse_word(X)
    if branch not in ("unstable+", "unstable-", "stable+", "stable-"):
        raise ValueError(f"unknown branch {branch!r}")
    if seed_scale <= 0.0:
        raise ValueError("seed_scale must be positive")
    fr = saddle_frame(p, X)
    sign = 1.0 if branch.endswith("+") else -1.0
    stable = branch.startswith("stable")
    if stable and not p.invertible:
        raise NonInvertibleMap("stable branch needs delta_L*delta_R > 0")
    direction = fr.zeta1 if stable else fr.zeta2
    o = np.asarray(fr.origin, dtype=float)
    V = np.array([o, o + sign * seed_scale * direction])
    stepper = map_polyline_backward if stable else map_polyline_forward
    for _ in range(steps):
        for _ in range(len(X)):
            V = stepper(p, V)
        # the anchor is fixed by the period map; re-pin it, else float error
        # along the expanding direction compounds by |lambda| each period
        V[0] = o
    if not np.isfinite(V).all():
        raise ValueError("manifold polyline diverged; reduce steps or seed_scale")
    return ManifoldPolyline(branch=branch, vertices=V)


def _segment_distances(P: np.ndarray, S0: np.ndarray, S1: np.ndarray) -> np.ndarray:
    """Distance of each point in P to each segment [S0_j, S1_j]; (len(P), len(S0))."""
    D = S1 - S0
    L2 = np.einsum("jk,jk->j", D, D)
    L2 = np.where(L2 == 0.0, 1.0, L2)
    W = P[:, None, :] - S0[None, :, :]
    t = np.clip(np.einsum("ijk,jk->ij", W, D) / L2, 0.0, 1.0)
    R = W - t[:, :, None] * D[None, :, :]
    return np.sqrt(np.einsum("ijk,ijk->ij", R, R))


def _resample(A: np.ndarray, max_seg: float) -> np.ndarray:
    """Insert evenly spaced points so no polyline piece exceeds max_seg."""
    out = [A[:1]]
    for a0, a1 in zip(A[:-1], A[1:]):
        n = max(int(np.ceil(np.linalg.norm(a1 - a0) / max_seg)), 1)
        t = np.linspace(0.0, 1.0, n + 1)[1:, None]
        out.append(a0 + t * (a1 - a0))
    return np.vstack(out)


def _piece_bounds(P0: np.ndarray, P1: np.ndarray, B0: np.ndarray, B1: np.ndarray,
                  chunk: int = 512) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Per-piece sup-distance bounds and endpoint distances to polyline B.

    For piece [p0, p1]: distance to one fixed segment is convex, so the sup
    against a single B-segment sits at an endpoint; min over B-segments of
    that is one bound. It is loose when the piece straddles a B-vertex, so
    take the 1-Lipschitz alternative max(d0, d1) + len/2 as well.
    """
    n = len(P0)
    E = np.empty(n)
    d0 = np.empty(n)
    d1 = np.empty(n)
    for i in range(0, n, chunk):
        s = slice(i, min(i + chunk, n))
        D0 = _segment_distances(P0[s], B0, B1)
        D1 = _segment_distances(P1[s], B0, B1)
        d0[s] = D0.min(axis=1)
        d1[s] = D1.min(axis=1)
        E[s] = np.maximum(D0, D1).min(axis=1)
    half = 0.5 * np.linalg.norm(P1 - P0, axis=1)
    return np.minimum(E, np.maximum(d0, d1) + half), d0, d1


def _directed_hausdorff_bound(A: np.ndarray, B: np.ndarray, max_seg: float,
                              max_rounds: int = 60) -> float:
    """Certified upper bound on sup_{p in polyline A} dist(p, polyline B).

    Starts from a subdivision of A at max_seg and bisects any piece whose
    bound exceeds the best exact point distance found so far by more than 5
    percent, so the returned value is both rigorous and tight.
    """
    B0, B1 = B[:-1], B[1:]
    keep = np.einsum("jk,jk->j", B1 - B0, B1 - B0) > 0.0
    if keep.any():
        B0, B1 = B0[keep], B1[keep]
    else:
        B0, B1 = B[:1], B[:1]
    S = _resample(A, max_seg)
    P0, P1 = S[:-1].copy(), S[1:].copy()
    E, d0, d1 = _piece_bounds(P0, P1, B0, B1)
    lb = max(float(d0.max()), float(d1.max())) if len(d0) else 0.0
    floor = 1e-12 * max(max_seg, 1.0)
    for _ in range(max_rounds):
        slack = max(0.05 * lb, floor)
        mask = E > lb + slack
        if not mask.any():
            break
        q0, q1 = P0[mask], P1[mask]
        mid = 0.5 * (q0 + q1)
        c0 = np.concatenate([q0, mid])
        c1 = np.concatenate([mid, q1])
        Ec, dc0, dc1 = _piece_bounds(c0, c1, B0, B1)
        lb = max(lb, float(dc0.max()), float(dc1.max()))
        P0 = np.concatenate([P0[~mask], c0])
        P1 = np.concatenate([P1[~mask], c1])
        E = np.concatenate([E[~mask], Ec])
    return float(E.max()) if len(E) else 0.0


def hausdorff(A, B, max_seg: float | None = None) -> float:
    """Symmetric Hausdorff distance between two polylines (certified upper bound).

    max_seg controls the subdivision used to tighten the bound; defaults to
    1/4096 of the joint bounding-box diagonal.
    """
    VA = A.vertices if isinstance(A, ManifoldPolyline) else np.asarray(A, dtype=float)
    VB = B.vertices if isinstance(B, ManifoldPolyline) else np.asarray(B, dtype=float)
    if len(VA) < 2 or len(VB) < 2:
        raise ValueError("polylines need at least two vertices")
    if max_seg is None:
        lo = np.minimum(VA.min(axis=0), VB.min(axis=0))
        hi = np.maximum(VA.max(axis=0), VB.max(axis=0))
        max_seg = max(float(np.linalg.norm(hi - lo)) / 4096.0, 1e-300)
    return max(_directed_hausdorff_bound(VA, VB, max_seg),
               _directed_hausdorff_bound(VB, VA, max_seg))
