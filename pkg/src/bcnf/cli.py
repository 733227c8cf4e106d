"""Thin command-line client. Every subcommand maps onto one service route;
computation happens behind the HTTP layer (in-process by default, remote with
--server). Exit codes: 0 ok, 1 verification/convergence failure, 2 input error.
"""
from __future__ import annotations

import argparse
import base64
import json
import sys
from pathlib import Path

from .portrait import write_bundle


def _client(server: str | None):
    if server:
        import httpx
        return httpx.Client(base_url=server, timeout=600.0)
    from fastapi.testclient import TestClient

    from .service import app
    return TestClient(app)


def _fail(msg: str, code: int = 2) -> int:
    print(f"error: {msg}", file=sys.stderr)
    return code


def _load_params(spec: str | None):
    if spec is None:
        raise ValueError("--params is required for this subcommand")
    s = spec.strip()
    if s.startswith("{"):
        return json.loads(s)
    return json.loads(Path(s).read_text())


def _post(client, route: str, payload: dict):
    r = client.post(route, json=payload)
    if r.status_code != 200:
        try:
            detail = r.json().get("detail", r.text)
        except Exception:
            detail = r.text
        raise ValueError(f"{route} -> HTTP {r.status_code}: {detail}")
    return r.json()


def cmd_cycle(args, client) -> int:
    out = _post(client, "/cycle", {"params": _load_params(args.params),
                                   "word": args.word})
    print(json.dumps(out, indent=1))
    return 0


def cmd_scan(args, client) -> int:
    try:
        name, value = args.fix.split("=", 1)
    except ValueError:
        return _fail("--fix expects name=value")
    guess = args.guess.split(",")
    if len(guess) != 2:
        return _fail("--guess expects two comma-separated values")
    payload = {"word_x": args.word_x, "word_y": args.word_y,
               "fix_name": name.strip(), "fix_value": value.strip(),
               "guess": [g.strip() for g in guess],
               "max_iter": args.max_iter}
    if args.tol is not None:
        payload["tol"] = args.tol
    out = _post(client, "/scan", payload)
    print(json.dumps(out, indent=1))
    return 0 if out.get("converged") else 1


def cmd_verify(args, client) -> int:
    deltas = [d.strip() for d in args.delta_r.split(",") if d.strip()]
    if not deltas:
        return _fail("--delta-r expects comma-separated values")
    out = _post(client, "/verify", {"delta_R": deltas, "k_max": args.k_max})
    if args.json:
        Path(args.json).write_text(json.dumps(out, indent=1))
    for res in out["results"]:
        status = "PASS" if res["passed"] else f"FAIL ({len(res['failures'])} failures)"
        print(f"delta_R={res['delta_R']}: {status}")
        for f in res["failures"][:5]:
            print(f"  {f}")
    return 0 if out["passed"] else 1


def cmd_portrait(args, client) -> int:
    payload = {"params": _load_params(args.params),
               "word_x": args.word_x, "word_y": args.word_y,
               "k_max": args.k_max, "steps": args.steps,
               "seed_scale": args.seed_scale}
    bundle = _post(client, "/portrait", payload)
    paths = write_bundle(bundle, args.out)
    print(json.dumps(paths, indent=1))
    return 0


def cmd_basin(args, client) -> int:
    payload = {"params": _load_params(args.params),
               "word_x": args.word_x, "word_y": args.word_y,
               "k_max": args.k_max, "width": args.width, "height": args.height,
               "max_iter": args.max_iter, "div_radius": args.div_radius,
               "threads": args.threads}
    if args.eps_conv is not None:
        payload["eps_conv"] = args.eps_conv
    if args.window:
        vals = [float(v) for v in args.window.split(",")]
        if len(vals) != 4:
            return _fail("--window expects x_min,x_max,y_min,y_max")
        payload["window"] = {"x_min": vals[0], "x_max": vals[1],
                             "y_min": vals[2], "y_max": vals[3],
                             "width": args.width, "height": args.height}
    out = _post(client, "/basin", payload)
    dest = Path(args.out)
    dest.mkdir(parents=True, exist_ok=True)
    path = dest / "basin.json"
    path.write_text(json.dumps(out))
    print(json.dumps({"basin": str(path), "counts": out["counts"]}, indent=1))
    return 0


def cmd_render(args, client) -> int:
    basin = json.loads(Path(args.input).read_text())
    payload = {"window": basin["window"], "labels": basin["labels"]}
    out = _post(client, "/render", payload)
    dest = Path(args.output) if args.output else Path(args.out) / "basin.ppm"
    dest.parent.mkdir(parents=True, exist_ok=True)
    dest.write_bytes(base64.b64decode(out["ppm_base64"]))
    side = dest.with_suffix(dest.suffix + ".json")
    side.write_text(json.dumps(out["sidecar"], indent=1))
    print(json.dumps({"image": str(dest), "sidecar": str(side)}, indent=1))
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="bcnf",
        description="periodic solutions, coexistence designs, and basin rasters "
                    "for the planar border-collision normal form")
    ap.add_argument("--params", help="Params JSON: inline object or file path")
    ap.add_argument("--out", default=".", help="output directory")
    ap.add_argument("--tol", type=float, default=None, help="solver residual tolerance")
    ap.add_argument("--seed-scale", type=float, default=1e-3,
                    help="manifold seed segment length factor")
    ap.add_argument("--threads", type=int, default=1, help="basin row-block workers")
    ap.add_argument("--server", default=None,
                    help="base URL of a running service; default runs in-process")
    sub = ap.add_subparsers(dest="command", required=True)

    c = sub.add_parser("cycle", help="solve and classify one symbol word")
    c.add_argument("--word", required=True)
    c.set_defaults(fn=cmd_cycle)

    s = sub.add_parser("scan", help="solve for infinite-coexistence parameters")
    s.add_argument("--word-x", required=True)
    s.add_argument("--word-y", required=True)
    s.add_argument("--fix", required=True, metavar="NAME=VALUE")
    s.add_argument("--guess", required=True, metavar="A,B")
    s.add_argument("--max-iter", type=int, default=100)
    s.set_defaults(fn=cmd_scan)

    v = sub.add_parser("verify", help="replay the closed-form theorem checks")
    v.add_argument("--delta-r", default="1.1,1.5,2,3")
    v.add_argument("--k-max", type=int, default=20)
    v.add_argument("--json", default=None, help="write the full report here")
    v.set_defaults(fn=cmd_verify)

    t = sub.add_parser("portrait", help="cycles, manifolds, homoclinic points")
    t.add_argument("--word-x", default="RLR")
    t.add_argument("--word-y", default="LR")
    t.add_argument("--k-max", type=int, default=8)
    t.add_argument("--steps", type=int, default=12)
    t.set_defaults(fn=cmd_portrait)

    b = sub.add_parser("basin", help="basin-of-attraction raster")
    b.add_argument("--word-x", default="RLR")
    b.add_argument("--word-y", default="LR")
    b.add_argument("--k-max", type=int, default=8)
    b.add_argument("--width", type=int, default=256)
    b.add_argument("--height", type=int, default=192)
    b.add_argument("--window", default=None, metavar="XMIN,XMAX,YMIN,YMAX")
    b.add_argument("--max-iter", type=int, default=100000)
    b.add_argument("--div-radius", type=float, default=1e8)
    b.add_argument("--eps-conv", type=float, default=None)
    b.set_defaults(fn=cmd_basin)

    r = sub.add_parser("render", help="basin JSON to portable pixmap")
    r.add_argument("--input", required=True)
    r.add_argument("--output", default=None)
    r.set_defaults(fn=cmd_render)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        client = _client(args.server)
    except Exception as e:
        return _fail(f"cannot reach server: {e}")
    try:
        with client:
            return args.fn(args, client)
    except (ValueError, OSError, json.JSONDecodeError) as e:
        return _fail(str(e))


if __name__ == "__main__":
    sys.exit(main())
