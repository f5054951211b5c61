"""Synthetic scenes, the error score and seeded multi-trial statistics."""

from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence, Union

import numpy as np

from .detector import DetectionResult, DetectorConfig, detect_multiple, detect_one
from .edgemap import EdgeMap
from .errors import CircleDetectionError, SpecError
from .geometry import Circle, midpoint_octant

__all__ = [
    "CircleShape",
    "EllipseShape",
    "PolygonShape",
    "LineShape",
    "Occlusion",
    "SceneSpec",
    "GroundTruthCircle",
    "TrialStats",
    "RunRecord",
    "generate_scene",
    "render_gray",
    "parse_scene",
    "load_scene",
    "error_score",
    "match_detections",
    "run_trials",
]

ETA = 0.05
MU = 0.1
#: ellipses this close to round count as circle ground truth
ECCENTRICITY_CUTOFF = 0.15


@dataclass(frozen=True)
class CircleShape:
    x: float
    y: float
    r: float
    arc: tuple[float, float] = (0.0, 360.0)
    thickness: int = 1


@dataclass(frozen=True)
class EllipseShape:
    x: float
    y: float
    a: float
    b: float
    angle: float = 0.0


@dataclass(frozen=True)
class PolygonShape:
    vertices: tuple[tuple[float, float], ...]


@dataclass(frozen=True)
class LineShape:
    p1: tuple[float, float]
    p2: tuple[float, float]


@dataclass(frozen=True)
class Occlusion:
    """Axis-aligned rectangle (inclusive corners) whose edges are erased."""

    x0: int
    y0: int
    x1: int
    y1: int


Shape = Union[CircleShape, EllipseShape, PolygonShape, LineShape]


@dataclass(frozen=True)
class SceneSpec:
    width: int = 200
    height: int = 200
    shapes: tuple = ()
    noise_fraction: float = 0.0
    occlusions: tuple = ()

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise SpecError(f"bad scene size {self.width}x{self.height}")
        if not 0.0 <= self.noise_fraction < 1.0:
            raise SpecError(f"noise fraction must lie in [0, 1), got {self.noise_fraction}")


class GroundTruthCircle(NamedTuple):
    x_true: float
    y_true: float
    r_true: float


@dataclass(frozen=True)
class RunRecord:
    seed: int
    method: str
    x: float
    y: float
    r: float
    beta: float
    es: float
    time_s: float
    n_detected: int = 1

    @property
    def success(self) -> bool:
        return self.es < 1.0

    def to_dict(self, timing: bool = True) -> dict:
        d = {
            "record": "run",
            "seed": self.seed,
            "method": self.method,
            "x": self.x,
            "y": self.y,
            "r": self.r,
            "beta": self.beta,
            "es": self.es,
        }
        if timing:
            d["time_s"] = self.time_s
        return d


@dataclass(frozen=True)
class TrialStats:
    runs: int
    success_rate: float
    mean_es: float
    std_es: float
    mean_time_s: float
    std_time_s: float
    records: tuple = field(default=(), compare=False, repr=False)

    def to_dict(self, timing: bool = True) -> dict:
        d = {
            "record": "summary",
            "runs": self.runs,
            "success_rate": self.success_rate,
            "mean_es": self.mean_es,
            "std_es": self.std_es,
        }
        if timing:
            d["mean_time_s"] = self.mean_time_s
            d["std_time_s"] = self.std_time_s
        return d

    def table_row(self, label: str) -> str:
        return (
            f"{label:<8} time {self.mean_time_s:8.3f} +/- ({self.std_time_s:.3f}) s   "
            f"SR {self.success_rate:6.1f} %   ES {self.mean_es:.3f} +/- ({self.std_es:.3f})"
        )


# ---------------------------------------------------------------------------
# rasterizers


def _circle_pixels(s: CircleShape) -> np.ndarray:
    cx, cy = int(math.floor(s.x + 0.5)), int(math.floor(s.y + 0.5))
    r0 = int(math.floor(s.r + 0.5))
    out = []
    for dr in range(s.thickness):
        rr = r0 + dr - (s.thickness - 1) // 2
        if rr < 1:
            continue
        oct_ = np.array(midpoint_octant(rr))
        a, b = oct_[:, 0], oct_[:, 1]
        offs = np.concatenate([np.stack(v, 1) for v in ((a, b), (b, a), (-b, a), (-a, b), (-a, -b), (-b, -a), (b, -a), (a, -b))])
        out.append(offs)
    offs = np.unique(np.concatenate(out), axis=0)
    start, stop = s.arc
    if stop - start < 360.0:
        ang = np.degrees(np.arctan2(offs[:, 1], offs[:, 0])) % 360.0
        rel = (ang - start) % 360.0
        offs = offs[rel <= (stop - start) % 360.0 + 1e-9]
    return offs + np.array([cx, cy])


def _ellipse_pixels(s: EllipseShape) -> np.ndarray:
    t = np.radians(np.arange(360))
    ca, sa = math.cos(math.radians(s.angle)), math.sin(math.radians(s.angle))
    ex, ey = s.a * np.cos(t), s.b * np.sin(t)
    x = s.x + ex * ca - ey * sa
    y = s.y + ex * sa + ey * ca
    pts = np.floor(np.stack([x, y], 1) + 0.5).astype(np.int64)
    # join consecutive samples so large ellipses stay closed
    segs = [_line_pixels(tuple(pts[i]), tuple(pts[(i + 1) % len(pts)])) for i in range(len(pts))]
    return np.unique(np.concatenate(segs), axis=0)


def _line_pixels(p1, p2) -> np.ndarray:
    x0, y0 = int(math.floor(p1[0] + 0.5)), int(math.floor(p1[1] + 0.5))
    x1, y1 = int(math.floor(p2[0] + 0.5)), int(math.floor(p2[1] + 0.5))
    dx, dy = abs(x1 - x0), -abs(y1 - y0)
    sx = 1 if x0 < x1 else -1
    sy = 1 if y0 < y1 else -1
    err = dx + dy
    out = []
    while True:
        out.append((x0, y0))
        if x0 == x1 and y0 == y1:
            break
        e2 = 2 * err
        if e2 >= dy:
            err += dy
            x0 += sx
        if e2 <= dx:
            err += dx
            y0 += sy
    return np.array(out, dtype=np.int64)


def _shape_pixels(shape) -> np.ndarray:
    if isinstance(shape, CircleShape):
        return _circle_pixels(shape)
    if isinstance(shape, EllipseShape):
        return _ellipse_pixels(shape)
    if isinstance(shape, PolygonShape):
        v = list(shape.vertices)
        if len(v) < 2:
            raise SpecError("a polygon needs at least two vertices")
        return np.concatenate([_line_pixels(v[i], v[(i + 1) % len(v)]) for i in range(len(v))])
    if isinstance(shape, LineShape):
        return _line_pixels(shape.p1, shape.p2)
    raise SpecError(f"unknown shape {shape!r}")


def _truth_of(shape) -> GroundTruthCircle | None:
    if isinstance(shape, CircleShape):
        return GroundTruthCircle(float(shape.x), float(shape.y), float(shape.r))
    if isinstance(shape, EllipseShape):
        if abs(shape.a - shape.b) / max(shape.a, shape.b) <= ECCENTRICITY_CUTOFF:
            return GroundTruthCircle(float(shape.x), float(shape.y), (shape.a + shape.b) / 2.0)
    return None


def generate_scene(spec: SceneSpec, seed=0) -> tuple[EdgeMap, list[GroundTruthCircle]]:
    """Rasterize a scene into an edge map and list its circle ground truths.

    Circles use the midpoint algorithm, ellipses per-degree parametric
    samples joined by line segments, polygons and lines integer line
    stepping. Occlusions are erased, then ``noise_fraction`` of the image
    area is turned into edge pixels, drawn among the background pixels.
    """
    bits = np.zeros((spec.height, spec.width), dtype=bool)
    truths = []
    for i, shape in enumerate(spec.shapes):
        px = _shape_pixels(shape)
        inside = (px[:, 0] >= 0) & (px[:, 0] < spec.width) & (px[:, 1] >= 0) & (px[:, 1] < spec.height)
        if not inside.any():
            raise SpecError(f"shape {i} ({type(shape).__name__}) lies entirely outside the image")
        px = px[inside]
        bits[px[:, 1], px[:, 0]] = True
        t = _truth_of(shape)
        if t is not None:
            truths.append(t)
    for occ in spec.occlusions:
        x0, x1 = sorted((occ.x0, occ.x1))
        y0, y1 = sorted((occ.y0, occ.y1))
        bits[max(0, y0) : max(0, y1 + 1), max(0, x0) : max(0, x1 + 1)] = False
    if spec.noise_fraction > 0:
        rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
        n_noise = int(round(spec.noise_fraction * spec.width * spec.height))
        background = np.flatnonzero(~bits.ravel())
        n_noise = min(n_noise, len(background))
        flip = rng.choice(background, size=n_noise, replace=False)
        bits.ravel()[flip] = True
    return EdgeMap(bits), truths


def render_gray(spec: SceneSpec, background: int = 40, foreground: int = 200) -> np.ndarray:
    """Grayscale rendering of a scene for the edge-detection front end.

    Closed shapes are filled so that an edge detector sees one boundary
    per shape; partial arcs and lines are stroked 3 pixels wide. Noise is
    an edge-level effect and is not rendered; occluded rectangles are
    painted with the background level.
    """
    from PIL import Image, ImageDraw

    img = Image.new("L", (spec.width, spec.height), background)
    draw = ImageDraw.Draw(img)
    for shape in spec.shapes:
        if isinstance(shape, CircleShape):
            box = [shape.x - shape.r, shape.y - shape.r, shape.x + shape.r, shape.y + shape.r]
            start, stop = shape.arc
            if stop - start >= 360.0:
                draw.ellipse(box, fill=foreground)
            else:
                draw.arc(box, start, stop, fill=foreground, width=3)
        elif isinstance(shape, EllipseShape):
            t = np.radians(np.arange(360))
            ca, sa = math.cos(math.radians(shape.angle)), math.sin(math.radians(shape.angle))
            ex, ey = shape.a * np.cos(t), shape.b * np.sin(t)
            xy = list(zip(shape.x + ex * ca - ey * sa, shape.y + ex * sa + ey * ca))
            draw.polygon(xy, fill=foreground)
        elif isinstance(shape, PolygonShape):
            draw.polygon([tuple(v) for v in shape.vertices], fill=foreground)
        elif isinstance(shape, LineShape):
            draw.line([tuple(shape.p1), tuple(shape.p2)], fill=foreground, width=3)
    for occ in spec.occlusions:
        x0, x1 = sorted((occ.x0, occ.x1))
        y0, y1 = sorted((occ.y0, occ.y1))
        draw.rectangle([x0, y0, x1, y1], fill=background)
    return np.asarray(img, dtype=np.uint8)


# ---------------------------------------------------------------------------
# scene files

_SCENE_HELP = """\
scene file lines (blank lines and '#' comments ignored):
  size W H
  circle X Y R [arc=START,STOP] [thickness=T]
  ellipse X Y A B [ANGLE]
  polygon X1,Y1 X2,Y2 X3,Y3 ...
  line X1 Y1 X2 Y2
  noise FRACTION
  occlude X0 Y0 X1 Y1"""


def parse_scene(text: str) -> SceneSpec:
    """Parse the line-oriented scene format (see ``_SCENE_HELP``)."""
    width = height = 200
    shapes: list = []
    occl: list = []
    noise = 0.0
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, *args = line.split()
        try:
            opts = dict(a.split("=", 1) for a in args if "=" in a)
            pos = [a for a in args if "=" not in a]
            if key == "size":
                width, height = (int(v) for v in pos)
            elif key == "circle":
                x, y, r = (float(v) for v in pos)
                arc = tuple(float(v) for v in opts.get("arc", "0,360").split(","))
                if len(arc) != 2:
                    raise ValueError("arc takes START,STOP")
                shapes.append(CircleShape(x, y, r, arc, int(opts.get("thickness", 1))))
            elif key == "ellipse":
                if len(pos) not in (4, 5):
                    raise ValueError("ellipse takes X Y A B [ANGLE]")
                vals = [float(v) for v in pos]
                shapes.append(EllipseShape(*vals))
            elif key == "polygon":
                verts = tuple(tuple(float(c) for c in v.split(",")) for v in pos)
                if len(verts) < 3 or any(len(v) != 2 for v in verts):
                    raise ValueError("polygon takes at least three X,Y vertices")
                shapes.append(PolygonShape(verts))
            elif key == "line":
                x1, y1, x2, y2 = (float(v) for v in pos)
                shapes.append(LineShape((x1, y1), (x2, y2)))
            elif key == "noise":
                (noise,) = (float(v) for v in pos)
            elif key == "occlude":
                occl.append(Occlusion(*(int(v) for v in pos)))
            else:
                raise ValueError(f"unknown keyword {key!r}")
        except (ValueError, TypeError) as exc:
            raise SpecError(f"line {lineno}: {raw.strip()!r}: {exc}") from None
    return SceneSpec(width, height, tuple(shapes), noise, tuple(occl))


def load_scene(path) -> SceneSpec:
    with open(path) as fh:
        return parse_scene(fh.read())


# ---------------------------------------------------------------------------
# scoring


def error_score(truth: GroundTruthCircle, det: Circle, eta: float = ETA, mu: float = MU) -> float:
    """Weighted center shift plus radius mismatch; below 1 counts as success."""
    if eta <= 0 or mu <= 0:
        raise ValueError("weights must be positive")
    return eta * (abs(truth[0] - det[0]) + abs(truth[1] - det[1])) + mu * abs(truth[2] - det[2])


def match_detections(truths: Sequence[GroundTruthCircle], dets: Sequence[Circle]) -> list[tuple[int, int | None]]:
    """Greedy nearest-center assignment of detections to ground truths.

    Pairs are taken in order of increasing center distance; each truth and
    each detection is used at most once. Returns ``(truth_index,
    detection_index or None)`` for every truth, in truth order.
    """
    pairs = []
    for i, t in enumerate(truths):
        for j, d in enumerate(dets):
            pairs.append((math.hypot(t[0] - d[0], t[1] - d[1]), i, j))
    pairs.sort()
    taken_t: dict[int, int] = {}
    taken_d: set[int] = set()
    for _, i, j in pairs:
        if i in taken_t or j in taken_d:
            continue
        taken_t[i] = j
        taken_d.add(j)
    return [(i, taken_t.get(i)) for i in range(len(truths))]


def _mean_std(values: Sequence[float]) -> tuple[float, float]:
    if not values:
        return math.nan, math.nan
    arr = np.asarray(values, dtype=np.float64)
    if len(arr) == 1:
        return float(arr[0]), 0.0
    return float(arr.mean()), float(arr.std(ddof=1))


def run_trials(
    spec: SceneSpec,
    method: str = "la",
    runs: int = 65,
    base_seed: int = 0,
    cfg: DetectorConfig | None = None,
    ga_cfg=None,
    *,
    reuse_scene: bool = True,
    scene_seed: int | None = None,
) -> TrialStats:
    """Repeat detection over seeded runs and aggregate time, success rate and error score.

    Run ``i`` uses seed ``base_seed + i`` for detection. With
    ``reuse_scene`` the scene is generated once from ``scene_seed``
    (default ``base_seed``), otherwise each run regenerates it with its own
    seed. Single-truth scenes use one detection per run; scenes with
    several truths use the masking loop. A run's error score is the worst
    over its ground truths, an unmatched truth scoring infinity.
    """
    from .ga_baseline import GAConfig, ga_detect

    if runs < 1:
        raise ValueError("runs must be at least 1")
    method = method.lower()
    if method not in ("la", "ga"):
        raise ValueError(f"unknown method {method!r}")
    cfg = cfg or DetectorConfig()
    ga_cfg = ga_cfg or GAConfig()

    def single(em, seed):
        if method == "la":
            return detect_one(em, cfg, seed)
        return ga_detect(em, ga_cfg, cfg, seed)

    fixed = generate_scene(spec, base_seed if scene_seed is None else scene_seed) if reuse_scene else None
    records = []
    for i in range(runs):
        seed = base_seed + i
        em, truths = fixed if fixed is not None else generate_scene(spec, seed)
        t0 = time.perf_counter()
        try:
            if len(truths) <= 1:
                dets = [single(em, seed)]
            else:
                dets = detect_multiple(em, cfg, seed, max_circles=len(truths), detect=single)
        except CircleDetectionError:
            dets = []
        elapsed = time.perf_counter() - t0

        circles = [d.circle for d in dets]
        es = 0.0 if truths else math.inf
        for ti, dj in match_detections(truths, circles):
            es = max(es, math.inf if dj is None else error_score(truths[ti], circles[dj]))
        first = dets[0] if dets else None
        records.append(
            RunRecord(
                seed=seed,
                method=method,
                x=first.circle.x0 if first else math.nan,
                y=first.circle.y0 if first else math.nan,
                r=first.circle.r if first else math.nan,
                beta=first.beta if first else math.nan,
                es=es,
                time_s=elapsed,
                n_detected=len(dets),
            )
        )

    finite = [r.es for r in records if math.isfinite(r.es)]
    mean_es, std_es = _mean_std(finite)
    mean_t, std_t = _mean_std([r.time_s for r in records])
    sr = 100.0 * sum(r.success for r in records) / runs
    return TrialStats(runs, sr, mean_es, std_es, mean_t, std_t, tuple(records))


def write_records(fh, stats: TrialStats, timing: bool = True) -> None:
    """Write per-run records and the summary as JSON lines."""
    for rec in stats.records:
        fh.write(json.dumps(rec.to_dict(timing)) + "\n")
    fh.write(json.dumps(stats.to_dict(timing)) + "\n")
