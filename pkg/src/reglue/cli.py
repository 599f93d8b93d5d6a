"""Command-line front door.

Subcommands: example, reglue-poly, reglue-rat, render, check-path.
A run is configured by flags or by a JSON document (--config); explicit
flags override the file, and the merged configuration is echoed into every
report so identical configs reproduce identical artifacts byte-for-byte.

Exit codes: reglue runs return 0 converged / 3 diverged / 4 budget or
ambiguous / 2 invalid input; `example` returns 0 only when the run matches
its closed-form table; `render` returns 2 on a bad viewport and 5 on I/O
failure.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

from . import rays, render
from .errors import ReglueError
from .families import PolyParam, RatParam
from .sphere import SampledCurve, curve_diameter, read_curve, segment_curve
from .thurston import (CONVENTION_COMPOSE, CONVENTION_MISPRINT,
                       closed_form_example, run_poly, run_rat)

EXIT_OK = 0
EXIT_MISMATCH = 1
EXIT_INVALID = 2
EXIT_DIVERGED = 3
EXIT_AMBIGUOUS = 4
EXIT_IO = 5

ALPHA0_SAMPLES = 201


def _parse_complex(s: str) -> complex:
    return complex(s.replace(" ", "").replace("i", "j"))


def _load_config(path):
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def _merged(args, keys):
    """Config-file values overridden by explicitly passed flags."""
    cfg = {}
    if getattr(args, "config", None):
        cfg.update(_load_config(args.config))
    for k in keys:
        v = getattr(args, k.replace("-", "_"), None)
        if v is not None:
            cfg[k] = v
    return cfg


def _alpha0_from_config(cfg, c_for_rays=None):
    """Resolve the path source: file | segment endpoint | rays | degenerate."""
    src = cfg.get("alpha0", "degenerate")
    if src == "degenerate":
        return None
    if isinstance(src, str) and src.startswith("file:"):
        return read_curve(src[5:])
    if isinstance(src, str) and src.startswith("segment:"):
        e = _parse_complex(src[len("segment:"):])
        if abs(e) < 1e-12:
            return None
        return segment_curve(-e, e, n=ALPHA0_SAMPLES, symmetric=True)
    if isinstance(src, dict) and "rays" in src:
        th1, th2 = src["rays"]
        rho = src.get("rho", 1.0)
        if c_for_rays is None:
            raise ValueError("ray-built paths need a polynomial parameter c")
        return rays.build_alpha0(c_for_rays, (th1, th2), rho)
    raise ValueError(f"unrecognized alpha0 source: {src!r}")


def _print_report(report, out_dir, name):
    text = report.to_json()
    if out_dir:
        os.makedirs(out_dir, exist_ok=True)
        path = os.path.join(out_dir, name)
        with open(path, "w", encoding="ascii") as fh:
            fh.write(text)
        print(f"report written to {path}")
    return text


def cmd_example(args) -> int:
    """Reproduce the bundled z^2-6 -> z^2-2 regluing and check it against
    the closed form c_n = -2^(1-1/2^n) 3^(1/2^n)."""
    tol = args.tol if args.tol is not None else 1e-10
    max_stages = args.max_stages if args.max_stages is not None else 40
    orbit_len = args.orbit_len if args.orbit_len is not None else 20
    convention = CONVENTION_MISPRINT if args.convention == "inverse-misprint" \
        else CONVENTION_COMPOSE

    alpha0 = segment_curve(-math.sqrt(3.0), math.sqrt(3.0), n=ALPHA0_SAMPLES,
                           symmetric=True)
    try:
        report = run_poly(PolyParam(-6.0), alpha0, tol=tol,
                          max_stages=max_stages, M=orbit_len,
                          convention=convention,
                          config_extra={"command": "example"})
    except ReglueError as exc:
        print(f"engine error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INVALID

    print(f"status: {report.status}   convention: {report.convention}")
    print(f"{'n':>3} {'c_n':>42} {'closed form':>22} {'|diff|':>12}")
    worst = 0.0
    for row in report.stages:
        n = row["n"]
        c_val = row["c"]
        if c_val == "inf":
            print(f"{n:>3} {'inf':>42}")
            worst = math.inf
            continue
        cn = complex(c_val[0], c_val[1])
        oracle = closed_form_example(n)
        diff = abs(cn - oracle)
        if n <= 15:
            worst = max(worst, diff)
            print(f"{n:>3} {cn.real:>21.17f} {cn.imag:>+20.17f}i "
                  f"{oracle.real:>21.17f} {diff:>12.3e}")

    limit_ok = False
    if report.limit is not None:
        limit_ok = abs(report.limit - (-2.0)) < 1e-9
        print(f"limit: {report.limit.real:.17g}{report.limit.imag:+.17g}i "
              f"(target -2; {'ok' if limit_ok else 'MISMATCH'})")
    n_seen = max((r["n"] for r in report.stages), default=0)
    table_ok = worst < 1e-9 and n_seen >= 15

    _print_report(report, args.out, "example_report.json")
    if report.status == "ambiguous":
        print(f"engine error: {report.error}", file=sys.stderr)
        return EXIT_INVALID
    if table_ok and limit_ok:
        print(f"closed-form table matched for n <= 15 (max |diff| {worst:.3e})")
        return EXIT_OK
    print("closed-form mismatch" if not table_ok else "limit mismatch",
          file=sys.stderr)
    return EXIT_MISMATCH


def _run_exit_code(report) -> int:
    if report.status == "converged":
        return EXIT_OK
    if report.status == "diverged":
        return EXIT_DIVERGED
    return EXIT_AMBIGUOUS


def cmd_reglue_poly(args) -> int:
    cfg = _merged(args, ["c", "alpha0", "tol", "max-stages", "orbit-len",
                         "n-check", "cut-cap"])
    try:
        c = _parse_complex(str(cfg["c"]))
        alpha0 = _alpha0_from_config(cfg, c_for_rays=PolyParam(c))
        report = run_poly(PolyParam(c), alpha0,
                          tol=float(cfg.get("tol", 1e-12)),
                          max_stages=int(cfg.get("max-stages", 30)),
                          M=int(cfg.get("orbit-len", 20)),
                          N_check=int(cfg.get("n-check", 100)),
                          cut_cap=int(cfg.get("cut-cap", 16)),
                          config_extra={"command": "reglue-poly"})
    except (ReglueError, ValueError, OSError, KeyError) as exc:
        print(f"invalid input: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INVALID
    text = _print_report(report, args.out, "reglue_poly_report.json")
    if not args.out:
        print(text, end="")
    if report.status == "ambiguous" and report.error:
        print(f"stage error: {report.error}", file=sys.stderr)
    return _run_exit_code(report)


def cmd_reglue_rat(args) -> int:
    cfg = _merged(args, ["a", "b", "alpha0", "tol", "max-stages", "orbit-len",
                         "n-check", "cut-cap"])
    try:
        a = _parse_complex(str(cfg["a"]))
        b = _parse_complex(str(cfg["b"]))
        alpha0 = _alpha0_from_config(cfg)
        report = run_rat(RatParam(a, b), alpha0,
                         tol=float(cfg.get("tol", 1e-12)),
                         max_stages=int(cfg.get("max-stages", 30)),
                         M=int(cfg.get("orbit-len", 20)),
                         N_check=int(cfg.get("n-check", 100)),
                         cut_cap=int(cfg.get("cut-cap", 16)),
                         config_extra={"command": "reglue-rat"})
    except (ReglueError, ValueError, OSError, KeyError) as exc:
        print(f"invalid input: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INVALID
    text = _print_report(report, args.out, "reglue_rat_report.json")
    if not args.out:
        print(text, end="")
    if report.status == "ambiguous" and report.error:
        print(f"stage error: {report.error}", file=sys.stderr)
    return _run_exit_code(report)


def cmd_render(args) -> int:
    try:
        vp = render.Viewport(center=_parse_complex(args.center),
                             half_width=args.half_width,
                             width_px=args.width, height_px=args.height)
    except ValueError as exc:
        print(f"invalid viewport: {exc}", file=sys.stderr)
        return EXIT_INVALID

    try:
        if args.what == "julia":
            m = _parse_map(args.map)
            img = render.render_julia(m, vp, max_iter=args.max_iter,
                                      threads=args.threads)
        elif args.what == "cuts":
            m = _parse_map(args.map)
            img = render.render_julia(m, vp, max_iter=args.max_iter,
                                      threads=args.threads)
            state = _example_state_for_cuts(args, m)
            img = render.overlay_curves(img, vp, state.cut_set, (255, 64, 64))
        else:  # phi
            m = _parse_map(args.map)
            if not isinstance(m, PolyParam):
                print("phi renders need a polynomial map", file=sys.stderr)
                return EXIT_INVALID
            state = _example_state_for_cuts(args, m)
            pts = render.sample_julia_points(m, args.samples, seed=args.seed)
            img, side = render.render_phi_image(state.tower, args.stage, pts, vp)
            if args.out:
                side_path = args.out + ".report.json"
                with open(side_path, "w", encoding="ascii") as fh:
                    fh.write('{\n  "rendered": %d,\n  "skipped": %d\n}\n'
                             % (side.rendered, side.skipped))
    except ReglueError as exc:
        print(f"render failed: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INVALID

    try:
        render.write_ppm(img, args.out)
    except OSError as exc:
        print(f"cannot write {args.out}: {exc}", file=sys.stderr)
        return EXIT_IO
    print(f"wrote {args.out}")
    return EXIT_OK


def _parse_map(spec: str):
    """poly:<c>  or  rat:<a>,<b>"""
    kind, _, rest = spec.partition(":")
    if kind == "poly":
        return PolyParam(_parse_complex(rest))
    if kind == "rat":
        a_s, b_s = rest.split(",")
        return RatParam(_parse_complex(a_s), _parse_complex(b_s))
    raise ValueError(f"map spec must be poly:<c> or rat:<a>,<b>, got {spec!r}")


def _example_state_for_cuts(args, m: PolyParam):
    """Stage state backing cut/phi renders: run the map's regluing along the
    segment path through 0 (the bundled example geometry for c=-6)."""
    if args.alpha0:
        alpha0 = read_curve(args.alpha0)
    else:
        e = math.sqrt(3.0) if abs(m.c + 6.0) < 1e-12 else 0.5
        alpha0 = segment_curve(-e, e, n=ALPHA0_SAMPLES, symmetric=True)
    stages = max(args.stage + 1, 2)
    report = run_poly(m, alpha0, tol=0.0, max_stages=stages, M=stages + 6,
                      cut_cap=max(args.stage + 1, 16))
    if report.error:
        raise ReglueError(report.error)
    return report.states[min(args.stage, len(report.states) - 1)]


def cmd_check_path(args) -> int:
    cfg = _merged(args, ["c", "alpha0", "horizon"])
    try:
        c = _parse_complex(str(cfg["c"]))
        alpha0 = _alpha0_from_config(cfg, c_for_rays=PolyParam(c))
        if alpha0 is None:
            print("degenerate path: vacuously admissible (identity regluing)")
            return EXIT_OK
        res = rays.check_admissible(PolyParam(c), alpha0,
                                    int(cfg.get("horizon", 100)))
    except (ReglueError, ValueError, OSError, KeyError) as exc:
        print(f"invalid input: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INVALID
    if res.ok:
        print("admissible: forward orbit of alpha0(1) stays clear of the path")
        return EXIT_OK
    print("inadmissible: forward orbit of alpha0(1) meets the curve at n=%d "
          "(distance %.3e)" % (res[1], res[2]))
    return EXIT_MISMATCH


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="reglue",
                                 description="Holomorphic regluing toolkit")
    sub = ap.add_subparsers(dest="command", required=True)

    p_ex = sub.add_parser("example", help="reproduce the z^2-6 regluing table")
    p_ex.add_argument("--tol", type=float, default=None)
    p_ex.add_argument("--max-stages", type=int, default=None)
    p_ex.add_argument("--orbit-len", type=int, default=None)
    p_ex.add_argument("--out", default=None, help="directory for the report JSON")
    p_ex.add_argument("--convention", choices=["compose", "inverse-misprint"],
                      default="compose",
                      help="branch-recurrence convention; the misprint variant "
                           "exists to demonstrate the closed-form arbitration")
    p_ex.set_defaults(func=cmd_example)

    for name, fn in (("reglue-poly", cmd_reglue_poly), ("reglue-rat", cmd_reglue_rat)):
        p = sub.add_parser(name, help=f"run a {name.split('-')[1]} regluing")
        p.add_argument("--config", default=None, help="JSON config document")
        if name == "reglue-poly":
            p.add_argument("--c", default=None)
        else:
            p.add_argument("--a", default=None)
            p.add_argument("--b", default=None)
        p.add_argument("--alpha0", default=None,
                       help="degenerate | segment:<endpoint> | file:<path>")
        p.add_argument("--tol", type=float, default=None)
        p.add_argument("--max-stages", type=int, default=None)
        p.add_argument("--orbit-len", type=int, default=None)
        p.add_argument("--n-check", type=int, default=None)
        p.add_argument("--cut-cap", type=int, default=None)
        p.add_argument("--out", default=None)
        p.set_defaults(func=fn)

    p_r = sub.add_parser("render", help="write a PPM image")
    p_r.add_argument("what", choices=["julia", "phi", "cuts"])
    p_r.add_argument("--map", required=True, help="poly:<c> or rat:<a>,<b>")
    p_r.add_argument("--center", default="0")
    p_r.add_argument("--half-width", type=float, default=3.5)
    p_r.add_argument("--width", type=int, default=640)
    p_r.add_argument("--height", type=int, default=480)
    p_r.add_argument("--max-iter", type=int, default=256)
    p_r.add_argument("--threads", type=int, default=1)
    p_r.add_argument("--stage", type=int, default=8, help="tower stage for phi/cuts")
    p_r.add_argument("--samples", type=int, default=400, help="phi sample count")
    p_r.add_argument("--seed", type=int, default=0)
    p_r.add_argument("--alpha0", default=None, help="curve file for the path")
    p_r.add_argument("--out", required=True)
    p_r.set_defaults(func=cmd_render)

    p_c = sub.add_parser("check-path", help="test the orbit-avoidance hypothesis")
    p_c.add_argument("--config", default=None)
    p_c.add_argument("--c", default=None)
    p_c.add_argument("--alpha0", default=None)
    p_c.add_argument("--horizon", type=int, default=None)
    p_c.set_defaults(func=cmd_check_path)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
