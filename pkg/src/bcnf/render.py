"""Raster output: binary portable pixmap plus a sidecar JSON color key."""
from __future__ import annotations

import colorsys
import json
from pathlib import Path

import numpy as np

from .basins import DIVERGED, UNRESOLVED, BasinImage


def default_palette(k_max: int) -> list[tuple[int, int, int]]:
    """Colors for labels -1, 0, 1..k_max in that order: white for diverged,
    black for unresolved, then a hue wheel."""
    if k_max < 0:
        raise ValueError("k_max must be >= 0")
    colors = [(255, 255, 255), (0, 0, 0)]
    for k in range(1, k_max + 1):
        h = 0.83 * (k - 1) / max(1, k_max)
        r, g, b = colorsys.hsv_to_rgb(h, 0.85, 0.95)
        colors.append((round(255 * r), round(255 * g), round(255 * b)))
    return colors


def render_image(img: BasinImage, palette: list[tuple[int, int, int]],
                 out_path) -> str:
    """Write a binary P6 pixmap; label l takes palette[l + 1].

    The label grid has row 0 at the window bottom, the pixmap scans from the
    top, so rows are flipped on output. The mapping and window go to a
    sidecar JSON next to the image.
    """
    labels = np.asarray(img.labels)
    lo, hi = int(labels.min()), int(labels.max())
    if lo < DIVERGED or hi + 1 >= len(palette):
        raise ValueError(f"palette with {len(palette)} entries does not cover "
                         f"labels in [{lo}, {hi}]")
    lut = np.asarray(palette, dtype=np.uint8)
    rgb = lut[labels[::-1, :] + 1]
    out_path = Path(out_path)
    header = f"P6\n{labels.shape[1]} {labels.shape[0]}\n255\n".encode("ascii")
    with open(out_path, "wb") as fh:
        fh.write(header)
        fh.write(rgb.tobytes())
    sidecar = {
        "window": img.window.to_dict(),
        "codes": {"DIVERGED": DIVERGED, "UNRESOLVED": UNRESOLVED},
        "label_colors": {str(l): list(map(int, palette[l + 1]))
                         for l in range(lo, hi + 1)},
        "row0": "y_max",
    }
    side_path = out_path.with_suffix(out_path.suffix + ".json")
    with open(side_path, "w") as fh:
        json.dump(sidecar, fh, indent=1)
    return str(out_path)
