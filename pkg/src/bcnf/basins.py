"""Basin-of-attraction rasters over pixel-center grids.

Labels are assigned by matching orbits against the precomputed target cycle
point sets, not by period detection. A pixel is claimed by the first target
whose point set the orbit stays within eps_conv of for n consecutive iterates
(n = that target's period); a near miss that fails confirmation keeps the
pixel active rather than writing a premature label.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .core import Params
from .cycles import Cycle, solve_cycle
from .words import build_family, parse_word

DIVERGED = -1
UNRESOLVED = 0


@dataclass(frozen=True)
class Window:
    x_min: float
    x_max: float
    y_min: float
    y_max: float
    width: int
    height: int

    def __post_init__(self):
        if not (self.x_min < self.x_max and self.y_min < self.y_max):
            raise ValueError("window extent must have positive area")
        if int(self.width) != self.width or int(self.height) != self.height:
            raise ValueError("pixel counts must be integers")
        if self.width < 1 or self.height < 1:
            raise ValueError("width*height must be >= 1")

    @property
    def diagonal(self) -> float:
        return float(np.hypot(self.x_max - self.x_min, self.y_max - self.y_min))

    def pixel_centers(self, rows=None) -> np.ndarray:
        """(rows, width, 2) centers; row 0 sits at y_min."""
        dx = (self.x_max - self.x_min) / self.width
        dy = (self.y_max - self.y_min) / self.height
        xs = self.x_min + (np.arange(self.width) + 0.5) * dx
        rr = np.arange(self.height) if rows is None else np.asarray(rows)
        ys = self.y_min + (rr + 0.5) * dy
        g = np.empty((len(ys), self.width, 2))
        g[:, :, 0] = xs[None, :]
        g[:, :, 1] = ys[:, None]
        return g

    def to_dict(self) -> dict:
        return {"x_min": self.x_min, "x_max": self.x_max, "y_min": self.y_min,
                "y_max": self.y_max, "width": self.width, "height": self.height}


@dataclass
class BasinImage:
    window: Window
    labels: np.ndarray  # (height, width) int, row 0 at y_min

    def label_counts(self) -> dict[int, int]:
        vals, counts = np.unique(self.labels, return_counts=True)
        return {int(v): int(c) for v, c in zip(vals, counts)}

    def to_dict(self) -> dict:
        return {"window": self.window.to_dict(), "labels": self.labels.tolist(),
                "counts": self.label_counts()}


def _advance(p: Params, Z: np.ndarray, steps: int) -> np.ndarray:
    for _ in range(steps):
        right = Z[:, 0] >= 0.0
        tau = np.where(right, p.tau_R, p.tau_L)
        delta = np.where(right, p.delta_R, p.delta_L)
        xn = tau * Z[:, 0] + Z[:, 1] + p.mu
        Z = np.column_stack([xn, -delta * Z[:, 0]])
    return Z


def label_points(p: Params, pts: np.ndarray, targets: list[Cycle],
                 max_iter: int = 100000, div_radius: float = 1e8,
                 eps_conv: float = 1e-8, check_every: int = 8) -> np.ndarray:
    """Label each start point with 1-based target index, DIVERGED, or UNRESOLVED.

    Checkpoint positions depend only on the iterate count, so raising max_iter
    keeps every earlier decision: checks run every check_every steps for the
    first 128*check_every iterates (fast convergers), then every 16*check_every
    (the slow tail dominates cost, not accuracy).
    """
    if not targets:
        raise ValueError("targets must be nonempty")
    pts = np.asarray(pts, dtype=float).reshape(-1, 2)
    tsets = [np.asarray(t.points, dtype=float) for t in targets]
    periods = [len(t.points) for t in targets]
    TT = np.vstack(tsets)
    offsets = np.cumsum([0] + periods[:-1])
    eps2 = eps_conv * eps_conv
    r2 = div_radius * div_radius
    labels = np.full(len(pts), UNRESOLVED, dtype=np.int32)
    Z = pts.copy()
    alive = np.arange(len(pts))
    done = 0
    while done < max_iter and len(alive):
        coarse = done >= 128 * check_every
        nsteps = min(16 * check_every if coarse else check_every, max_iter - done)
        Z = _advance(p, Z, nsteps)
        done += nsteps
        far = Z[:, 0] * Z[:, 0] + Z[:, 1] * Z[:, 1] > r2
        if far.any():
            labels[alive[far]] = DIVERGED
            Z, alive = Z[~far], alive[~far]
        W = Z[:, None, :] - TT[None, :, :]
        D2 = np.minimum.reduceat(W[:, :, 0] ** 2 + W[:, :, 1] ** 2, offsets, axis=1)
        near = D2 < eps2
        first = np.where(near.any(axis=1), near.argmax(axis=1), -1)
        confirmed = np.zeros(len(alive), dtype=bool)
        for ti, (T, nt) in enumerate(zip(tsets, periods)):
            cand = first == ti
            if not cand.any():
                continue
            C = Z[cand]
            ok = np.ones(len(C), dtype=bool)
            for _ in range(nt):
                C = _advance(p, C, 1)
                W = C[:, None, :] - T[None, :, :]
                dd2 = np.min(W[:, :, 0] ** 2 + W[:, :, 1] ** 2, axis=1)
                ok &= dd2 <= eps2
                if not ok.any():
                    break
            idx = np.flatnonzero(cand)[ok]
            labels[alive[idx]] = ti + 1
            confirmed[idx] = True
        if confirmed.any():
            Z, alive = Z[~confirmed], alive[~confirmed]
    return labels


def default_window(p: Params, X: str = "RLR", Y: str = "LR", k_max: int = 8,
                   width: int = 256, height: int = 192, pad: float = 0.2) -> Window:
    """Bounding box of the family cycle points for k <= k_max, padded per side."""
    X, Y = parse_word(X), parse_word(Y)
    pts = np.vstack([solve_cycle(p, build_family(X, Y, k)).points
                     for k in range(1, k_max + 1)])
    x0, y0 = pts.min(axis=0)
    x1, y1 = pts.max(axis=0)
    px, py = pad * (x1 - x0), pad * (y1 - y0)
    return Window(x_min=x0 - px, x_max=x1 + px, y_min=y0 - py, y_max=y1 + py,
                  width=width, height=height)


def basin_raster(p: Params, win: Window, targets: list[Cycle],
                 max_iter: int = 100000, div_radius: float = 1e8,
                 eps_conv: float | None = None, threads: int = 1,
                 check_every: int = 8) -> BasinImage:
    """Label every pixel center of the window; rows are independent work units."""
    if not targets:
        raise ValueError("targets must be nonempty")
    if eps_conv is None:
        eps_conv = 1e-8 * win.diagonal
    grid = win.pixel_centers()

    def run_rows(r0: int, r1: int) -> np.ndarray:
        pts = grid[r0:r1].reshape(-1, 2)
        lab = label_points(p, pts, targets, max_iter=max_iter,
                           div_radius=div_radius, eps_conv=eps_conv,
                           check_every=check_every)
        return lab.reshape(r1 - r0, win.width)

    threads = max(1, int(threads))
    if threads == 1:
        labels = run_rows(0, win.height)
    else:
        bounds = np.linspace(0, win.height, threads + 1, dtype=int)
        with ThreadPoolExecutor(max_workers=threads) as ex:
            parts = list(ex.map(lambda b: run_rows(b[0], b[1]),
                                zip(bounds[:-1], bounds[1:])))
        labels = np.vstack(parts)
    return BasinImage(window=win, labels=labels)
