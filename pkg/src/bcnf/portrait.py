"""Phase-portrait data bundles: every plottable object for a design point.

The bundle is plain JSON-serializable dicts plus two CSV point tables, so
downstream plotting needs no knowledge of this package.
"""
from __future__ import annotations

import csv
import json
from itertools import product
from pathlib import Path

from .core import Params
from .cycles import ADMISSIBLE, ASYM_STABLE, NonUniqueCycle, classify
from .design import DegenerateDesign, FrameError, residuals
from .homoclinic import homoclinic_points, manifold_polyline, xi_crossings
from .words import alpha_index, build_family, canonical_rotation, flip_first, is_primitive, parse_word

_BRANCHES = ("unstable+", "unstable-", "stable+", "stable-")


def _extra_attractors(p: Params, skip: set[str], max_len: int = 5) -> list[dict]:
    """Admissible attracting cycles over primitive words up to max_len,
    excluding rotations of anything already in the bundle."""
    found = []
    seen = set(skip)
    for n in range(2, max_len + 1):
        for sym in product("LR", repeat=n):
            w = "".join(sym)
            if not is_primitive(w):
                continue
            cw = str(canonical_rotation(w))
            if cw in seen:
                continue
            seen.add(cw)
            try:
                rep = classify(p, cw)
            except NonUniqueCycle:
                continue
            if rep.admissibility == ADMISSIBLE and rep.stability == ASYM_STABLE:
                found.append(rep.to_dict())
    return found


def portrait(p: Params, X: str, Y: str, k_max: int = 8,
             seed_scale: float = 1e-3, steps: int = 12) -> dict:
    """Everything needed to draw the coexistence picture at one parameter point."""
    X, Y = parse_word(X), parse_word(Y)
    bundle: dict = {
        "params": p.to_dict(),
        "words": {"X": str(X), "Y": str(Y), "alpha": alpha_index(X, Y)},
        "x_cycle": classify(p, X).to_dict(),
        "fixed_points": {J: classify(p, J).to_dict() for J in ("L", "R")},
    }
    try:
        bundle["residuals"] = residuals(p, X, Y).to_dict()
    except (DegenerateDesign, ValueError) as e:
        bundle["residuals"] = {"error": str(e)}

    s_words, sp_words = [], []
    for k in range(1, k_max + 1):
        s_words.append(build_family(X, Y, k))
        sp_words.append(build_family(X, flip_first(Y), k))
    bundle["s_cycles"] = [classify(p, w).to_dict() for w in s_words]
    bundle["s_prime_cycles"] = [classify(p, w).to_dict() for w in sp_words]

    try:
        quad = homoclinic_points(p, X, Y)
        bundle["homoclinic"] = quad.to_dict()
        bundle["xi_crossings"] = [list(z) for z in xi_crossings(p, X, Y)]
    except (DegenerateDesign, FrameError, ValueError) as e:
        bundle["homoclinic"] = {"error": str(e)}
        bundle["xi_crossings"] = []

    manifolds = {}
    for br in _BRANCHES:
        try:
            manifolds[br] = manifold_polyline(p, X, br, seed_scale=seed_scale,
                                              steps=steps).to_dict()
        except (FrameError, ValueError) as e:
            manifolds[br] = {"branch": br, "error": str(e)}
    bundle["manifolds"] = manifolds

    # Y stays eligible: the Y-cycle is not reported elsewhere and can be a
    # genuine coexisting attractor
    skip = {str(canonical_rotation(w)) for w in [X, *s_words, *sp_words]}
    bundle["extra_attractors"] = _extra_attractors(p, skip)
    return bundle


def _write_points_csv(path: Path, cycles: list[dict]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["k", "i", "x", "y"])
        for k, rep in enumerate(cycles, start=1):
            cyc = rep.get("cycle")
            if not cyc:
                continue
            for i, (x, y) in enumerate(cyc["points"]):
                w.writerow([k, i, repr(x), repr(y)])


def write_bundle(bundle: dict, out_dir) -> dict[str, str]:
    """portrait.json plus the two family point tables; returns written paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {
        "portrait": out / "portrait.json",
        "points_s": out / "points_s.csv",
        "points_sprime": out / "points_sprime.csv",
    }
    with open(paths["portrait"], "w") as fh:
        json.dump(bundle, fh, indent=1)
    _write_points_csv(paths["points_s"], bundle.get("s_cycles", []))
    _write_points_csv(paths["points_sprime"], bundle.get("s_prime_cycles", []))
    return {k: str(v) for k, v in paths.items()}
