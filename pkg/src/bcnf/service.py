"""HTTP facade over the library; one endpoint per CLI subcommand.

Parameter values arrive as numbers or exact decimal strings ("−55/117" style
fractions included) and are normalized before any computation. Domain errors
surface as 400s; malformed payloads are pydantic 422s.
"""
from __future__ import annotations

import base64
import json
import tempfile
from fractions import Fraction
from pathlib import Path

import numpy as np
from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, ConfigDict, field_validator

from . import __version__
from .basins import BasinImage, Window, basin_raster, default_window
from .core import NonInvertibleMap, Params
from .cycles import ADMISSIBLE, NonUniqueCycle, classify
from .design import DegenerateDesign, FrameError, residuals, solve_codim3
from .portrait import portrait
from .render import default_palette, render_image
from .verification import verify_theorem5
from .words import build_family, parse_word

app = FastAPI(title="border-collision normal form service", version=__version__)

_DOMAIN_ERRORS = (ValueError, NonUniqueCycle, NonInvertibleMap,
                  DegenerateDesign, FrameError, KeyError)


def _num(v):
    if isinstance(v, str):
        return float(Fraction(v))
    return v


class StrictModel(BaseModel):
    model_config = ConfigDict(extra="forbid")


class ParamsModel(StrictModel):
    tau_L: float
    delta_L: float
    tau_R: float
    delta_R: float
    mu: float

    @field_validator("*", mode="before")
    @classmethod
    def _decimal_strings(cls, v):
        return _num(v)

    def to_params(self) -> Params:
        return Params.from_dict(self.model_dump())


class WindowModel(StrictModel):
    x_min: float
    x_max: float
    y_min: float
    y_max: float
    width: int = 256
    height: int = 192

    def to_window(self) -> Window:
        return Window(**self.model_dump())


class CycleRequest(StrictModel):
    params: ParamsModel
    word: str


class ScanRequest(StrictModel):
    word_x: str
    word_y: str
    fix_name: str
    fix_value: float | str
    guess: tuple[float | str, float | str]
    tol: float = 1e-10
    max_iter: int = 100


class VerifyRequest(StrictModel):
    delta_R: list[float | str]
    k_max: int = 20


class PortraitRequest(StrictModel):
    params: ParamsModel
    word_x: str = "RLR"
    word_y: str = "LR"
    k_max: int = 8
    seed_scale: float = 1e-3
    steps: int = 12


class BasinRequest(StrictModel):
    params: ParamsModel
    word_x: str = "RLR"
    word_y: str = "LR"
    k_max: int = 8
    window: WindowModel | None = None
    width: int = 256
    height: int = 192
    max_iter: int = 100000
    div_radius: float = 1e8
    eps_conv: float | None = None
    threads: int = 1


class RenderRequest(StrictModel):
    window: WindowModel
    labels: list[list[int]]
    palette: list[tuple[int, int, int]] | None = None


@app.get("/health")
def health() -> dict:
    return {"status": "ok", "version": __version__}


@app.post("/cycle")
def cycle_endpoint(req: CycleRequest) -> dict:
    try:
        p = req.params.to_params()
        return classify(p, parse_word(req.word)).to_dict()
    except _DOMAIN_ERRORS as e:
        raise HTTPException(status_code=400, detail=str(e))


@app.post("/scan")
def scan_endpoint(req: ScanRequest) -> dict:
    try:
        guess = (_num(req.guess[0]), _num(req.guess[1]))
        p = solve_codim3(req.word_x, req.word_y,
                         (req.fix_name, _num(req.fix_value)), guess,
                         tol=req.tol, max_iter=req.max_iter)
    except DegenerateDesign as e:
        return {"converged": False, "error": str(e), "params": None, "residuals": None}
    except _DOMAIN_ERRORS as e:
        raise HTTPException(status_code=400, detail=str(e))
    res = residuals(p, req.word_x, req.word_y)
    return {"converged": res.norm <= max(req.tol, 1e-9) * 10,
            "params": p.to_dict(), "residuals": res.to_dict()}


@app.post("/verify")
def verify_endpoint(req: VerifyRequest) -> dict:
    try:
        results = [verify_theorem5(_num(d), req.k_max) for d in req.delta_R]
    except _DOMAIN_ERRORS as e:
        raise HTTPException(status_code=400, detail=str(e))
    return {"passed": all(r.passed for r in results),
            "results": [r.to_dict() for r in results]}


@app.post("/portrait")
def portrait_endpoint(req: PortraitRequest) -> dict:
    try:
        return portrait(req.params.to_params(), req.word_x, req.word_y,
                        k_max=req.k_max, seed_scale=req.seed_scale, steps=req.steps)
    except _DOMAIN_ERRORS as e:
        raise HTTPException(status_code=400, detail=str(e))


@app.post("/basin")
def basin_endpoint(req: BasinRequest) -> dict:
    try:
        p = req.params.to_params()
        X, Y = parse_word(req.word_x), parse_word(req.word_y)
        targets = []
        for k in range(1, req.k_max + 1):
            w = build_family(X, Y, k)
            rep = classify(p, w)
            if rep.admissibility != ADMISSIBLE:
                raise HTTPException(
                    status_code=400,
                    detail=f"target cycle {w} is {rep.admissibility}, not admissible")
            targets.append(rep.cycle)
        win = (req.window.to_window() if req.window is not None
               else default_window(p, X, Y, k_max=req.k_max,
                                   width=req.width, height=req.height))
        img = basin_raster(p, win, targets, max_iter=req.max_iter,
                           div_radius=req.div_radius, eps_conv=req.eps_conv,
                           threads=req.threads)
    except HTTPException:
        raise
    except _DOMAIN_ERRORS as e:
        raise HTTPException(status_code=400, detail=str(e))
    return img.to_dict()


@app.post("/render")
def render_endpoint(req: RenderRequest) -> dict:
    try:
        img = BasinImage(window=req.window.to_window(),
                         labels=np.asarray(req.labels, dtype=np.int32))
        palette = (req.palette if req.palette is not None
                   else default_palette(max(1, int(img.labels.max()))))
        with tempfile.TemporaryDirectory() as td:
            ppm = Path(td) / "basin.ppm"
            render_image(img, palette, ppm)
            data = ppm.read_bytes()
            sidecar = json.loads(ppm.with_suffix(".ppm.json").read_text())
    except _DOMAIN_ERRORS as e:
        raise HTTPException(status_code=400, detail=str(e))
    return {"ppm_base64": base64.b64encode(data).decode("ascii"),
            "palette": [list(map(int, c)) for c in palette],
            "sidecar": sidecar}
