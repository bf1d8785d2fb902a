"""Command-line surface: flow runs, single operators, fuzzing, stability.

Exit codes: 0 clean, 1 an inequality check genuinely failed,
2 operator/validation error (including convexity loss), 3 I/O error.
"""

from __future__ import annotations

import argparse
import io
import json
import os
import shlex
import sys
import time

import numpy as np

from . import __version__, bodyio, ops
from .errors import CentroflowError, ConvexityLost
from .flow import FlowConfig, conservation_checks, flow_run, harnack_and_bounds_monitor, normalized_view
from .lab import fuzz_campaign, stability_experiment
from .normalize import banach_mazur_to_disk, pinching_to_bm_bound, sl2_normalize
from .spectral import angles, deriv
from .support import SupportFn

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_OPERATOR = 2
EXIT_IO = 3

GAP_FLOOR = -1e-9  # tolerated inequality slack before flagging a violation


def _write_manifest(out_dir: str, argv: list[str], config: dict,
                    input_path: str | None, outputs: list[str],
                    started: float) -> None:
    manifest = {
        "command": shlex.join(["centroflow"] + list(argv)),
        "config": config,
        "input_sha256": bodyio.sha256_of_file(input_path) if input_path else None,
        "outputs": sorted(outputs),
        "wall_time_s": time.time() - started,
        "version": __version__,
    }
    bodyio.atomic_write_text(os.path.join(out_dir, "manifest.json"),
                             json.dumps(manifest, indent=2, sort_keys=True) + "\n")


def _svg_frame(body: SupportFn, path: str) -> None:
    """Boundary polyline with a unit-circle overlay on a fixed [-2,2]^2 view."""
    th = angles(body.n)
    hp = deriv(body.samples, 1)
    x = body.samples * np.cos(th) - hp * np.sin(th)
    y = body.samples * np.sin(th) + hp * np.cos(th)
    pts = " ".join(f"{xi:.6f},{-yi:.6f}" for xi, yi in zip(x, y))
    first = f"{x[0]:.6f},{-y[0]:.6f}"
    svg = (
        '<svg xmlns="http://www.w3.org/2000/svg" viewBox="-2 -2 4 4">\n'
        '<circle cx="0" cy="0" r="1" fill="none" stroke="#999" '
        'stroke-width="0.01"/>\n'
        f'<polyline points="{pts} {first}" fill="none" stroke="#000" '
        'stroke-width="0.02"/>\n'
        "</svg>\n"
    )
    bodyio.atomic_write_text(path, svg)


def _load_config(args) -> dict:
    cfg = {}
    if getattr(args, "config", None):
        with open(args.config, "r", encoding="utf-8") as fh:
            cfg = json.load(fh)
    return cfg


def cmd_flow(args, argv) -> int:
    started = time.time()
    try:
        body = bodyio.load_body(args.body)
    except OSError as exc:
        print(f"error: cannot read body: {exc}", file=sys.stderr)
        return EXIT_IO
    except (CentroflowError, ValueError) as exc:
        print(f"error: invalid body at t=0: {exc}", file=sys.stderr)
        return EXIT_OPERATOR

    overrides = _load_config(args)
    if args.n:
        overrides["n"] = args.n
    if args.stop_area is not None:
        overrides["t_stop_area"] = args.stop_area
    if args.t_stop is not None:
        overrides["t_stop"] = args.t_stop
    if args.cfl is not None:
        overrides["cfl"] = args.cfl
    if args.every is not None:
        overrides["renormalize_every"] = args.every
    cfg = FlowConfig(**overrides)

    os.makedirs(args.out, exist_ok=True)
    outputs = []
    try:
        trace = flow_run(body, cfg)
    except ConvexityLost as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_OPERATOR
    except CentroflowError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_OPERATOR

    trace_path = os.path.join(args.out, "trace.csv")
    buf = io.StringIO()
    trace.to_csv(buf)
    bodyio.atomic_write_text(trace_path, buf.getvalue())
    outputs.append("trace.csv")

    reports = {
        "estimated_T": trace.estimated_T,
        "steps": trace.steps,
        "stop_reason": trace.stop_reason,
        "conservation": conservation_checks(trace).as_dict()
        if trace.rows >= 10 else None,
        "harnack": harnack_and_bounds_monitor(trace).as_dict(),
    }
    bodyio.atomic_write_text(os.path.join(args.out, "report.json"),
                             json.dumps(reports, indent=2, sort_keys=True) + "\n")
    outputs.append("report.json")

    if args.frames:
        os.makedirs(args.frames, exist_ok=True)
        for i in range(trace.rows):
            name = f"frame_{i:06d}.svg"
            _svg_frame(normalized_view(trace, i),
                       os.path.join(args.frames, name))
        if os.path.abspath(args.frames).startswith(os.path.abspath(args.out)):
            outputs.extend(
                os.path.relpath(os.path.join(args.frames, f"frame_{i:06d}.svg"),
                                args.out)
                for i in range(trace.rows))

    _write_manifest(args.out, argv, {**overrides}, args.body, outputs, started)
    return EXIT_OK


_OP_NAMES = ("polar", "centroid", "proj", "lambda", "steiner", "bm", "normalize")


def cmd_op(args, argv) -> int:
    try:
        body = bodyio.load_body(args.body)
    except OSError as exc:
        print(f"error: cannot read body: {exc}", file=sys.stderr)
        return EXIT_IO
    except (CentroflowError, ValueError) as exc:
        print(f"error: invalid body: {exc}", file=sys.stderr)
        return EXIT_OPERATOR

    try:
        if args.name == "polar":
            result = bodyio.body_to_dict(ops.polar_body(body))
        elif args.name == "centroid":
            result = bodyio.body_to_dict(ops.centroid_body(body))
        elif args.name == "proj":
            result = bodyio.body_to_dict(ops.projection_body(body))
        elif args.name == "lambda":
            result = bodyio.body_to_dict(ops.curvature_image(body))
        elif args.name == "steiner":
            result = bodyio.body_to_dict(
                ops.steiner_symmetrize(body, args.axis))
        elif args.name == "normalize":
            normalized, witness = sl2_normalize(body)
            result = bodyio.body_to_dict(normalized)
            print(f"witness: {witness.as_array().tolist()}", file=sys.stderr)
        elif args.name == "bm":
            cert = banach_mazur_to_disk(body)
            result = {
                "distance": cert.distance,
                "witness": cert.witness.as_array().tolist(),
                "inner_radius": cert.inner_radius,
                "outer_radius": cert.outer_radius,
                "pinching_bound": pinching_to_bm_bound(body),
            }
        else:  # pragma: no cover - argparse restricts choices
            raise ValueError(args.name)
    except CentroflowError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_OPERATOR

    text = json.dumps(result) + "\n"
    if args.out:
        bodyio.atomic_write_text(args.out, text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_minkowski(args, argv) -> int:
    try:
        with open(args.f, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        print(f"error: cannot read density: {exc}", file=sys.stderr)
        return EXIT_IO
    density = np.asarray(data.get("f", data.get("h", [])), dtype=float)
    try:
        sol = ops.minkowski_solve(density)
    except (CentroflowError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_OPERATOR
    print(f"residual: {sol.residual:.6g}  removed first harmonics: "
          f"{sol.translation_modes_removed}", file=sys.stderr)
    text = json.dumps(bodyio.body_to_dict(sol.h)) + "\n"
    if args.out:
        bodyio.atomic_write_text(args.out, text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_fuzz(args, argv) -> int:
    started = time.time()
    report = fuzz_campaign(args.seeds, args.seed, n=args.n)
    payload = json.dumps(report.as_dict(), indent=2, sort_keys=True) + "\n"
    outputs = []
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        bodyio.atomic_write_text(os.path.join(args.out, "fuzz.json"), payload)
        outputs.append("fuzz.json")
        _write_manifest(args.out, argv,
                        {"seeds": args.seeds, "seed": args.seed, "n": args.n},
                        None, outputs, started)
    else:
        sys.stdout.write(payload)
    if report.worst() < GAP_FLOOR:
        print(f"violation: min gap {report.worst():.3e}", file=sys.stderr)
        return EXIT_VIOLATION
    return EXIT_OK


def cmd_stability(args, argv) -> int:
    started = time.time()
    result = stability_experiment(args.samples, args.seed, n=args.n)
    outputs = []
    summary = {
        "gamma": result.gamma,
        "fit_exponent": result.fit_exponent,
        "fit_count": result.fit_count,
        "control_eps": result.control_eps,
        "control_d_minus_1": result.control_d_minus_1,
        "eps_min": min(s.eps for s in result.samples),
        "eps_max": max(s.eps for s in result.samples),
    }
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        buf = io.StringIO()
        result.to_csv(buf)
        bodyio.atomic_write_text(os.path.join(args.out, "scatter.csv"),
                                 buf.getvalue())
        bodyio.atomic_write_text(os.path.join(args.out, "summary.json"),
                                 json.dumps(summary, indent=2, sort_keys=True) + "\n")
        outputs += ["scatter.csv", "summary.json"]
        _write_manifest(args.out, argv,
                        {"samples": args.samples, "seed": args.seed, "n": args.n},
                        None, outputs, started)
    else:
        sys.stdout.write(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    if any(s.eps < GAP_FLOOR for s in result.samples):
        return EXIT_VIOLATION
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="centroflow",
        description="Planar support-function flow and affine-inequality toolbox")
    sub = parser.add_subparsers(dest="command", required=True)

    p_flow = sub.add_parser("flow", help="run the curvature flow on a body file")
    p_flow.add_argument("--body", required=True)
    p_flow.add_argument("--out", required=True)
    p_flow.add_argument("--frames", help="directory for SVG frames")
    p_flow.add_argument("--n", type=int)
    p_flow.add_argument("--cfl", type=float)
    p_flow.add_argument("--stop-area", type=float, dest="stop_area")
    p_flow.add_argument("--t-stop", type=float, dest="t_stop")
    p_flow.add_argument("--every", type=int, help="steps between trace rows")
    p_flow.add_argument("--config", help="JSON file with FlowConfig overrides")

    p_op = sub.add_parser("op", help="apply one operator to a body file")
    p_op.add_argument("name", choices=_OP_NAMES)
    p_op.add_argument("--body", required=True)
    p_op.add_argument("--out")
    p_op.add_argument("--axis", type=float, default=0.0,
                      help="axis angle for steiner")

    p_mink = sub.add_parser("minkowski",
                            help="solve h'' + h = f for a density file")
    p_mink.add_argument("--f", required=True)
    p_mink.add_argument("--out")

    p_fuzz = sub.add_parser("fuzz", help="run the inequality fuzz campaign")
    p_fuzz.add_argument("--seeds", type=int, required=True,
                        help="number of bodies")
    p_fuzz.add_argument("--seed", type=int, default=0)
    p_fuzz.add_argument("--n", type=int, default=256)
    p_fuzz.add_argument("--out")

    p_stab = sub.add_parser("stability",
                            help="deficit vs Banach-Mazur distance scatter")
    p_stab.add_argument("--samples", type=int, required=True)
    p_stab.add_argument("--seed", type=int, default=0)
    p_stab.add_argument("--n", type=int, default=256)
    p_stab.add_argument("--out")

    return parser


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    args = build_parser().parse_args(argv)
    handlers = {
        "flow": cmd_flow,
        "op": cmd_op,
        "minkowski": cmd_minkowski,
        "fuzz": cmd_fuzz,
        "stability": cmd_stability,
    }
    try:
        return handlers[args.command](args, argv)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
