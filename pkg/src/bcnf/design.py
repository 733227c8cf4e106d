"""Saddle eigenframe, conjugated maps, and the codimension-three root finder.

The construction: pin the X-cycle as a saddle with reciprocal eigenvalues,
build the frame Q = [zeta1 zeta2] from the two closed-form direction vectors,
and drive the off-diagonal entries of Omega = Q^{-1} M_X Q to zero over the
free parameters. delta_L is eliminated throughout by the determinant
constraint delta_L = delta_R^{-(n_X - l_X)/l_X}.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import AffineMap2, Params, Point, word_matrices
from .cycles import _eigs_2x2, solve_cycle
from .words import alpha_index, parse_word


class FrameError(ValueError):
    """X-cycle multipliers unusable: complex, repeated, or equal to 1."""


class DegenerateDesign(ValueError):
    """Design frame singular or the root lies on a rejected branch."""


@dataclass
class SaddleFrame:
    lambda1: float
    lambda2: float
    zeta1: np.ndarray
    zeta2: np.ndarray
    Q: np.ndarray
    origin: Point

    def to_uv(self, z) -> np.ndarray:
        """Frame coordinates w = Q^{-1}(z - origin)."""
        return np.linalg.solve(self.Q, np.asarray(z, dtype=float) - self.origin)

    def to_xy(self, w) -> Point:
        z = self.Q @ np.asarray(w, dtype=float) + self.origin
        return Point(z[0], z[1])


@dataclass
class DesignResiduals:
    r_delta: float
    r_omega12: float
    r_omega21: float

    @property
    def norm(self) -> float:
        return math.hypot(self.r_delta, math.hypot(self.r_omega12, self.r_omega21))

    def to_dict(self) -> dict:
        return {"r_delta": self.r_delta, "r_omega12": self.r_omega12,
                "r_omega21": self.r_omega21, "norm": self.norm}


def _real_saddle_eigs(M: np.ndarray) -> tuple[float, float]:
    l1, l2 = _eigs_2x2(M)
    if l1.imag != 0.0 or l2.imag != 0.0:
        raise FrameError("complex multiplier pair")
    a, b = l1.real, l2.real
    scale = 1e-12 * (1.0 + abs(a) + abs(b))
    if abs(a - b) <= scale:
        raise FrameError("repeated multiplier")
    if abs(a - 1.0) <= scale or abs(b - 1.0) <= scale:
        raise FrameError("multiplier equal to 1")
    return a, b


def saddle_frame(p: Params, X: str) -> SaddleFrame:
    """Eigenframe of the X-cycle with unit-normalized eigenvectors.

    Use design_vectors / design_frame when the construction vectors of a
    specific (X, Y) pair are wanted instead.
    """
    X = parse_word(X)
    cyc = solve_cycle(p, X)
    M, _ = word_matrices(p, X)
    lam1, lam2 = _real_saddle_eigs(M)
    vecs = []
    for lam in (lam1, lam2):
        # null vector of M - lam*I, take the better-conditioned row
        r1 = np.array([M[0, 1], lam - M[0, 0]])
        r2 = np.array([lam - M[1, 1], M[1, 0]])
        v = r1 if np.linalg.norm(r1) >= np.linalg.norm(r2) else r2
        nv = np.linalg.norm(v)
        if nv == 0.0:
            raise FrameError("defective eigenvector")
        v = v / nv
        if v[0] < 0.0 or (v[0] == 0.0 and v[1] < 0.0):
            v = -v
        vecs.append(v)
    Q = np.column_stack(vecs)
    if abs(np.linalg.det(Q)) <= 1e-14:
        raise FrameError("parallel eigenvectors")
    return SaddleFrame(lambda1=lam1, lambda2=lam2, zeta1=vecs[0], zeta2=vecs[1],
                       Q=Q, origin=Point(*cyc.points[0]))


def hat_y(p: Params, X: str, Y: str) -> float:
    """Height of the switching-manifold point whose alpha-th iterate under the
    XY itinerary returns to the manifold. Linear in the unknown, solved exactly."""
    if p.mu == 0.0:
        raise ValueError("construction needs mu != 0")
    alpha = alpha_index(X, Y)
    prefix = (parse_word(X) + parse_word(Y))[:alpha]
    M, P = word_matrices(p, prefix)
    # x-component of the alpha-iterate of (0, yh): M[0,1]*yh + P[0,0]*mu = 0
    if abs(M[0, 1]) <= 1e-14 * (1.0 + abs(M).max()):
        raise ValueError("degenerate: iterate x-component independent of the height")
    return -p.mu * P[0, 0] / M[0, 1]


def design_vectors(p: Params, X: str, Y: str) -> tuple[np.ndarray, np.ndarray]:
    """The two construction vectors, deliberately not normalized."""
    yh = hat_y(p, X, Y)
    MX, PX = word_matrices(p, X)
    MY, _ = word_matrices(p, Y)
    zeta2 = (np.eye(2) - MX) @ np.array([0.0, yh]) - PX @ np.array([p.mu, 0.0])
    try:
        zeta1 = np.linalg.solve(MX, MY @ zeta2)
    except np.linalg.LinAlgError as e:
        raise DegenerateDesign("singular M_X") from e
    return zeta1, zeta2


def design_frame(p: Params, X: str, Y: str) -> SaddleFrame:
    """Saddle frame built from the construction vectors of (X, Y)."""
    z1, z2 = design_vectors(p, X, Y)
    cyc = solve_cycle(p, X)
    MX, _ = word_matrices(p, X)
    lam1, lam2 = _real_saddle_eigs(MX)
    Q = np.column_stack([z1, z2])
    if abs(np.linalg.det(Q)) <= 1e-14 * (1.0 + float(np.abs(Q).max()) ** 2):
        raise DegenerateDesign("singular frame")
    return SaddleFrame(lambda1=lam1, lambda2=lam2, zeta1=z1, zeta2=z2,
                       Q=Q, origin=Point(*cyc.points[0]))


def conjugate_affine(p: Params, w: str, frame: SaddleFrame) -> AffineMap2:
    """f^w expressed in frame coordinates: w -> Q^{-1} M_w Q w + Q^{-1}(f^w(o) - o)."""
    M, P = word_matrices(p, w)
    o = np.asarray(frame.origin, dtype=float)
    lin = np.linalg.solve(frame.Q, M @ frame.Q)
    off = np.linalg.solve(frame.Q, M @ o + P @ np.array([p.mu, 0.0]) - o)
    return AffineMap2(linear=lin, offset=off)


def delta_L_of(delta_R: float, X: str) -> float:
    """Determinant constraint making the X-cycle multiplier product 1."""
    X = parse_word(X)
    lX = X.l_count
    if lX == 0 or lX == len(X):
        raise ValueError("X must contain both symbols")
    if delta_R <= 0.0:
        raise ValueError("delta_R must be positive")
    return delta_R ** (-(len(X) - lX) / lX)


def residuals(p: Params, X: str, Y: str) -> DesignResiduals:
    """The three scalars that vanish exactly on the coexistence locus."""
    r_delta = p.delta_L - delta_L_of(p.delta_R, X)
    z1, z2 = design_vectors(p, X, Y)
    MX, _ = word_matrices(p, X)
    Q = np.column_stack([z1, z2])
    det = Q[0, 0] * Q[1, 1] - Q[0, 1] * Q[1, 0]
    if abs(det) <= 1e-14 * (1.0 + float(np.abs(Q).max()) ** 2):
        raise DegenerateDesign("singular frame")
    Om = np.linalg.solve(Q, MX @ Q)
    return DesignResiduals(r_delta=float(r_delta),
                           r_omega12=float(Om[0, 1]), r_omega21=float(Om[1, 0]))


def closed_family_RLR(delta_R: float) -> Params:
    """One-parameter closed-form slice of the locus for the shortest saddle word."""
    if delta_R == 0.0:
        raise ValueError("delta_R = 0")
    d = float(delta_R)
    tau_L = -1.0 + 1.0 / d - 1.0 / (d * d * (d * d + 1.0))
    return Params(tau_L=tau_L, delta_L=1.0 / (d * d), tau_R=-1.0 - d,
                  delta_R=d, mu=1.0)


# deterministic restart offsets around the caller's guess; radii deep enough
# that every start box point within 0.3 of a root brackets it from some side
_RESTART_RINGS = ((0.15, 8), (0.3, 6), (0.45, 8), (0.6, 6))


def _newton2(F, x0, tol, max_iter):
    """Damped Newton on R^2 with central finite differences."""
    x = np.array(x0, dtype=float)
    r = F(x)
    if r is None:
        return None
    for _ in range(max_iter):
        nr = np.linalg.norm(r)
        if nr <= tol:
            return x
        J = np.empty((2, 2))
        for j in range(2):
            h = 1e-7 * (1.0 + abs(x[j]))
            xp = x.copy(); xp[j] += h
            xm = x.copy(); xm[j] -= h
            rp, rm = F(xp), F(xm)
            if rp is None or rm is None:
                return None
            J[:, j] = (rp - rm) / (2.0 * h)
        try:
            dx = np.linalg.solve(J, -r)
        except np.linalg.LinAlgError:
            return None
        step = 1.0
        for _ in range(40):
            xn = x + step * dx
            rn = F(xn)
            if rn is not None and np.linalg.norm(rn) < nr:
                x, r = xn, rn
                break
            step *= 0.5
        else:
            return None
    return x if np.linalg.norm(F(x)) <= tol else None


def _root_defect(p: Params, X: str, Y: str) -> str | None:
    """Why a converged root must be rejected, or None if it is usable."""
    if abs(p.delta_R - 1.0) < 1e-4:
        return "area-preserving branch (delta_R = 1)"
    MY, _ = word_matrices(p, Y)
    detY = MY[0, 0] * MY[1, 1] - MY[0, 1] * MY[1, 0]
    if detY >= 1.0 - 1e-9:
        return "family cycles cannot attract (det M_Y >= 1)"
    try:
        MX, _ = word_matrices(p, X)
        l1, l2 = _real_saddle_eigs(MX)
    except FrameError as e:
        return str(e)
    if not (abs(l1) < 1.0 < abs(l2)):
        return "X-cycle is not a saddle"
    try:
        z1, z2 = design_vectors(p, X, Y)
    except (ValueError, DegenerateDesign) as e:
        return str(e)
    Q = np.column_stack([z1, z2])
    if np.linalg.cond(Q) > 1e8:
        return "near-singular frame"
    return None


def solve_codim3(X: str, Y: str, fixed, guess, tol: float = 1e-10,
                 max_iter: int = 100) -> Params:
    """Find locus parameters with one of {tau_L, delta_R} pinned.

    fixed: (name, value) pair or {"name": ..., "value": ...}.
    guess: the two free parameters, as a pair ((tau_R, delta_R) when tau_L is
    fixed, (tau_L, tau_R) when delta_R is fixed), or a full Params to read
    them from. Multiple roots can exist; deterministic restarts sample a ring
    around the guess and the valid root nearest the guess is returned.
    """
    X, Y = parse_word(X), parse_word(Y)
    if isinstance(fixed, dict):
        fname, fval = fixed["name"], float(fixed["value"])
    else:
        fname, fval = fixed[0], float(fixed[1])
    if fname not in ("tau_L", "delta_R"):
        raise ValueError(f"fixed parameter must be tau_L or delta_R, got {fname!r}")
    mu = 1.0
    if isinstance(guess, Params):
        mu = guess.mu
        g = (guess.tau_R, guess.delta_R) if fname == "tau_L" else (guess.tau_L, guess.tau_R)
    else:
        g = (float(guess[0]), float(guess[1]))
    if fname == "delta_R" and fval <= 0.0:
        raise ValueError("fixed delta_R must be positive")

    def embed(x) -> Params | None:
        if fname == "tau_L":
            tau_R, delta_R = x
            if delta_R <= 1e-9:
                return None
            return Params(fval, delta_L_of(delta_R, X), float(tau_R),
                          float(delta_R), mu)
        tau_L, tau_R = x
        return Params(float(tau_L), delta_L_of(fval, X), float(tau_R), fval, mu)

    def F(x):
        p = embed(x)
        if p is None:
            return None
        try:
            res = residuals(p, X, Y)
        except (ValueError, np.linalg.LinAlgError):
            return None
        r = np.array([res.r_omega12, res.r_omega21])
        return r if np.isfinite(r).all() else None

    g = np.asarray(g, dtype=float)
    starts = [g]
    for rad, ndir in _RESTART_RINGS:
        for a in np.linspace(0.0, 2.0 * math.pi, ndir, endpoint=False):
            starts.append(g + rad * np.array([math.cos(a), math.sin(a)]))
    roots = []
    reasons = []
    for s in starts:
        x = _newton2(F, s, tol, max_iter)
        if x is None:
            continue
        p = embed(x)
        defect = _root_defect(p, X, Y)
        if defect is None:
            roots.append(x)
        else:
            reasons.append(defect)
    if not roots:
        detail = f" (rejected: {sorted(set(reasons))})" if reasons else ""
        raise DegenerateDesign("no usable root near the guess" + detail)
    best = min(roots, key=lambda r: float(np.linalg.norm(r - g)))
    return embed(best)


@dataclass
class DecayReport:
    gamma22: float
    sigma2: float
    unit_product_err: float        # |lambda1*lambda2 - 1|
    lambda1: float
    eq15_max_rel_err: float
    anchor_dist: list[float]       # |w_{k n_X} - b| per k
    decay_ratios: list[float]
    fitted_ratio: float            # log-least-squares ratio over the k window
    prime_anchor_dist: list[float]

    def to_dict(self) -> dict:
        return {
            "gamma22": self.gamma22, "sigma2": self.sigma2,
            "unit_product_err": self.unit_product_err, "lambda1": self.lambda1,
            "eq15_max_rel_err": self.eq15_max_rel_err,
            "anchor_dist": self.anchor_dist, "decay_ratios": self.decay_ratios,
            "fitted_ratio": self.fitted_ratio,
            "prime_anchor_dist": self.prime_anchor_dist,
        }


def theorem1_check(p: Params, X: str, Y: str, k_max: int = 8,
                   fit_from: int = 2) -> DecayReport:
    """Numerical diagnostics of the frame structure theorem.

    Checks that the conjugated Y map kills the (2,2) entry and second offset,
    that the saddle multipliers are reciprocal, that solved family anchor
    points match the closed-form frame expression, and that the anchor
    distance to the manifold endpoint decays geometrically at rate lambda1.
    """
    from .words import build_family, flip_first

    X, Y = parse_word(X), parse_word(Y)
    fr = design_frame(p, X, Y)
    gY = conjugate_affine(p, Y, fr)
    gam, sig = gY.linear, gY.offset
    lam1, lam2 = fr.lambda1, fr.lambda2
    denom0 = 1.0 - gam[0, 1] * gam[1, 0]
    if abs(denom0) <= 1e-12:
        raise DegenerateDesign("1 - gamma12*gamma21 vanishes")
    b = np.array([0.0, gam[1, 0] * sig[0] / denom0])
    phi0_uv = fr.to_uv([0.0, hat_y(p, X, Y)])

    nX = len(X)
    max_rel = 0.0
    dists: list[float] = []
    prime_dists: list[float] = []
    Yb = flip_first(Y)
    for k in range(1, k_max + 1):
        cyc = solve_cycle(p, build_family(X, Y, k))
        den = 1.0 - gam[0, 0] * lam1 ** k - gam[0, 1] * gam[1, 0] * (lam1 * lam2) ** k
        for j in range(0, k + 1):
            w_solved = fr.to_uv(cyc.points[(j * nX) % len(cyc.word)])
            w_closed = (sig[0] / den) * np.array([lam1 ** j,
                                                  gam[1, 0] * lam1 ** k * lam2 ** j])
            err = np.linalg.norm(w_solved - w_closed)
            rel = err / max(1.0, float(np.linalg.norm(w_closed)))
            max_rel = max(max_rel, rel)
        dists.append(float(np.linalg.norm(fr.to_uv(cyc.points[(k * nX) % len(cyc.word)]) - b)))
        cp = solve_cycle(p, build_family(X, Yb, k))
        prime_dists.append(float(np.linalg.norm(
            fr.to_uv(cp.points[(k * nX) % len(cp.word)]) - phi0_uv)))

    ratios = [dists[i] / dists[i - 1] for i in range(1, len(dists))]
    # least-squares slope of log d_k over k = fit_from..k_max smooths the
    # transient prefactor that per-step ratios still carry
    ks = np.arange(fit_from, k_max + 1)
    ys = np.log(np.array(dists[fit_from - 1:]))
    slope = np.polyfit(ks, ys, 1)[0] if len(ks) >= 2 else float("nan")
    return DecayReport(
        gamma22=float(gam[1, 1]), sigma2=float(sig[1]),
        unit_product_err=abs(lam1 * lam2 - 1.0), lambda1=lam1,
        eq15_max_rel_err=float(max_rel), anchor_dist=dists,
        decay_ratios=ratios, fitted_ratio=float(np.exp(slope)),
        prime_anchor_dist=prime_dists)
