"""Command-line front end: ``detect``, ``multi``, ``generate`` and ``bench``.

Exit codes: 0 when at least one circle was found (or the command
succeeded), 2 for the "no circle detected" reply, 1 for errors including
usage errors. Reports are JSON lines with a fixed field order. Wall-clock
fields are written only with ``--timing`` so that repeated runs with the
same seed produce byte-identical reports.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .bench import generate_scene, load_scene, render_gray, run_trials, write_records
from .detector import DetectionResult, DetectorConfig, detect_multiple, detect_one
from .edgemap import EdgeMap, canny, load_edge_map, load_gray, save_edge_map, save_pgm
from .errors import CircleDetectionError
from .ga_baseline import GAConfig, ga_detect
from .geometry import rasterize_circle

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_NONE = 2
SEED_ENV = "LA_CIRCLES_SEED"


class UsageError(Exception):
    """Raised instead of argparse's own exit so the code can be 1."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}")


def _fraction(text: str) -> float:
    v = float(text)
    if not 0.0 < v < 1.0:
        raise argparse.ArgumentTypeError(f"{text} is not in (0, 1)")
    return v


def _unit(text: str) -> float:
    v = float(text)
    if not 0.0 < v <= 1.0:
        raise argparse.ArgumentTypeError(f"{text} is not in (0, 1]")
    return v


def _positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"{text} is not a positive integer")
    return v


def _add_detector_flags(p: argparse.ArgumentParser) -> None:
    d = DetectorConfig()
    p.add_argument("--method", choices=("la", "ga"), default="la", help="learning automaton or genetic baseline")
    p.add_argument("--theta", type=_fraction, default=d.theta, help="learning rate")
    p.add_argument("--kmax-factor", type=_unit, default=d.kmax_factor, help="learning cycles as a fraction of n_c")
    p.add_argument("--sample-fraction", type=_unit, default=d.sample_fraction, help="share of edge pixels sampled")
    p.add_argument("--max-candidates", type=_positive_int, default=d.max_candidates, help="cap on the action set")
    p.add_argument("--mth", type=_fraction, default=d.m_th, help="multi-circle stop threshold on beta")
    p.add_argument("--beta-stop", type=float, default=d.beta_stop, help="early-stop match quality (>= 1 disables)")
    p.add_argument("--seed", type=int, default=None, help=f"RNG seed (default: ${SEED_ENV}, else 0)")


def _add_image_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--edges", action="store_true", help="input is already an edge map (nonzero = edge)")
    p.add_argument("--sigma", type=float, default=1.0, help="Gaussian smoothing before edge detection")
    p.add_argument("--canny-low", type=float, default=0.1, help="low hysteresis threshold, fraction of max gradient")
    p.add_argument("--canny-high", type=float, default=0.3, help="high hysteresis threshold, fraction of max gradient")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="lacircles", description="Circle detection with a learning automaton.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    for name, help_ in (("detect", "detect the single best circle"), ("multi", "detect every circle by masking")):
        p = sub.add_parser(name, help=help_)
        p.add_argument("input", help="PGM or PNG image")
        _add_image_flags(p)
        _add_detector_flags(p)
        p.add_argument("--overlay", metavar="OUT.png", help="draw detections over the source image")
        p.add_argument("--report", metavar="OUT.jsonl", help="write a JSON-lines report")
        p.add_argument("--timing", action="store_true", help="include elapsed time in the report")
        if name == "multi":
            p.add_argument("--max-circles", type=_positive_int, default=10)

    p = sub.add_parser("generate", help="render a synthetic scene file")
    p.add_argument("scene", help="scene description file")
    p.add_argument("output", help="edge map output (PGM)")
    p.add_argument("--seed", type=int, default=None, help="noise seed")
    p.add_argument("--truth", metavar="OUT.json", help="ground-truth sidecar (default: OUTPUT with .truth.json)")
    p.add_argument("--gray", metavar="OUT.pgm", help="also write a rendered grayscale image")

    p = sub.add_parser("bench", help="seeded trials with success rate and error score")
    p.add_argument("scene", help="scene description file")
    p.add_argument("--method", choices=("la", "ga"), default="la")
    p.add_argument("--runs", type=_positive_int, default=65)
    p.add_argument("--base-seed", type=int, default=None, help=f"seed of run 0 (default: ${SEED_ENV}, else 0)")
    p.add_argument("--scene-seed", type=int, default=None, help="noise seed of the shared scene")
    p.add_argument("--regenerate", action="store_true", help="draw a new scene for every run")
    p.add_argument("--log", metavar="OUT.jsonl", help="per-run records plus a summary record")
    p.add_argument("--timing", action="store_true", help="include timing fields in the log")
    return parser


def _resolve_seed(value: int | None) -> int:
    if value is not None:
        return value
    env = os.environ.get(SEED_ENV)
    if env is None or env.strip() == "":
        return 0
    try:
        return int(env)
    except ValueError:
        raise UsageError(f"{SEED_ENV}={env!r} is not an integer") from None


def detector_config(args) -> DetectorConfig:
    return DetectorConfig(
        theta=args.theta,
        kmax_factor=args.kmax_factor,
        sample_fraction=args.sample_fraction,
        max_candidates=args.max_candidates,
        m_th=args.mth,
        beta_stop=args.beta_stop,
    )


def _config_echo(args, cfg: DetectorConfig) -> dict:
    echo = {
        "command": args.command,
        "method": args.method,
        "edges": args.edges,
        "sigma": args.sigma,
        "canny_low": args.canny_low,
        "canny_high": args.canny_high,
        "theta": cfg.theta,
        "kmax_factor": cfg.kmax_factor,
        "sample_fraction": cfg.sample_fraction,
        "max_candidates": cfg.max_candidates,
        "mth": cfg.m_th,
        "beta_stop": cfg.beta_stop,
    }
    if args.command == "multi":
        echo["max_circles"] = args.max_circles
    return echo


def replay_argv(report: dict) -> list[str]:
    """Command line that reproduces the run described by a report record."""
    cfg = report["config"]
    argv = [cfg["command"], report["input"], "--method", cfg["method"], "--seed", str(report["seed"])]
    if cfg["edges"]:
        argv.append("--edges")
    for key in ("sigma", "canny_low", "canny_high", "theta", "kmax_factor", "sample_fraction", "max_candidates", "mth", "beta_stop", "max_circles"):
        if key in cfg:
            argv += ["--" + key.replace("_", "-"), repr(cfg[key])]
    return argv


def _load_input(args) -> tuple[EdgeMap, np.ndarray]:
    """Edge map plus the grayscale backdrop used for overlays."""
    if args.edges:
        em = load_edge_map(args.input)
        return em, np.where(em.bits, 255, 0).astype(np.uint8)
    img = load_gray(args.input)
    return canny(img, args.sigma, args.canny_low, args.canny_high), img.pixels


def write_overlay(path, backdrop: np.ndarray, results: list[DetectionResult]) -> None:
    """Save the backdrop as RGB with each detected circle drawn 1 pixel wide."""
    from PIL import Image

    rgb = np.repeat(backdrop[:, :, None], 3, axis=2).copy()
    h, w = backdrop.shape
    for res in results:
        if res.circle.r < 0.5:
            continue
        pts = rasterize_circle(res.circle, w, h)
        rgb[pts[:, 1], pts[:, 0]] = (255, 0, 0)
    Image.fromarray(rgb, mode="RGB").save(path)


def _circle_record(res: DetectionResult) -> dict:
    c = res.circle
    return {"x0": c.x0, "y0": c.y0, "r": c.r, "beta": res.beta, "probability": res.probability}


def cmd_detect(args) -> int:
    seed = _resolve_seed(args.seed)
    cfg = detector_config(args)
    em, backdrop = _load_input(args)
    t0 = time.perf_counter()

    def single(m, s):
        if args.method == "la":
            return detect_one(m, cfg, s)
        return ga_detect(m, GAConfig(), cfg, s)

    try:
        if args.command == "detect":
            results = [single(em, seed)]
            if results[0].beta < cfg.m_th:
                results = []
        else:
            results = detect_multiple(em, cfg, seed, args.max_circles, detect=single)
    except CircleDetectionError as exc:
        # insufficient data and empty action sets are negative replies
        print(f"no circle detected: {exc}", file=sys.stderr)
        results = []
    elapsed = time.perf_counter() - t0

    record = {
        "input": str(args.input),
        "method": args.method,
        "seed": seed,
        "circles": [_circle_record(r) for r in results],
        "config": _config_echo(args, cfg),
    }
    if args.timing:
        record["elapsed_s"] = elapsed
    if args.report:
        with open(args.report, "w") as fh:
            fh.write(json.dumps(record) + "\n")
    if args.overlay:
        write_overlay(args.overlay, backdrop, results)

    for r in results:
        c = r.circle
        print(f"circle x0={c.x0:.3f} y0={c.y0:.3f} r={c.r:.3f} beta={r.beta:.3f}")
    if not results:
        print("no circle detected")
        return EXIT_NONE
    return EXIT_OK


def cmd_generate(args) -> int:
    seed = _resolve_seed(args.seed)
    spec = load_scene(args.scene)
    em, truths = generate_scene(spec, seed)
    save_edge_map(args.output, em)
    truth_path = Path(args.truth) if args.truth else Path(args.output).with_suffix(".truth.json")
    sidecar = {
        "image": str(args.output),
        "width": spec.width,
        "height": spec.height,
        "seed": seed,
        "circles": [{"x": t.x_true, "y": t.y_true, "r": t.r_true} for t in truths],
    }
    truth_path.write_text(json.dumps(sidecar, indent=2) + "\n")
    if args.gray:
        save_pgm(args.gray, render_gray(spec))
    print(f"wrote {args.output} ({em.edge_count()} edge pixels, {len(truths)} circles) and {truth_path}")
    return EXIT_OK


def cmd_bench(args) -> int:
    base = _resolve_seed(args.base_seed)
    spec = load_scene(args.scene)
    stats = run_trials(
        spec,
        args.method,
        args.runs,
        base,
        reuse_scene=not args.regenerate,
        scene_seed=args.scene_seed,
    )
    if args.log:
        with open(args.log, "w") as fh:
            write_records(fh, stats, timing=args.timing)
    # per-run detail always accompanies the aggregate
    for rec in stats.records:
        print(f"run seed={rec.seed} es={rec.es:.4f} beta={rec.beta:.3f} x={rec.x:.2f} y={rec.y:.2f} r={rec.r:.2f} t={rec.time_s:.3f}s")
    print(f"{'method':<8} {'time (s)':>27}   {'SR':>10}   {'ES'}")
    print(stats.table_row(args.method.upper()))
    return EXIT_OK


_COMMANDS = {"detect": cmd_detect, "multi": cmd_detect, "generate": cmd_generate, "bench": cmd_bench}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return _COMMANDS[args.command](args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(exc, file=sys.stderr)
        return EXIT_ERROR
    except (OSError, ValueError, CircleDetectionError) as exc:
        print(f"lacircles: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
