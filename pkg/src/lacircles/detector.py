"""Learning-automaton circle detector.

Each automaton action is a candidate circle through three sampled edge
points. The environment rewards an action with the fraction of its
rasterized circumference that lands on edge pixels, and the L_RI scheme
concentrates probability on well-supported candidates.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from itertools import combinations
from typing import Callable

import numpy as np

from . import automaton
from .edgemap import EdgeMap, sample_edge_points
from .errors import (
    CircleDetectionError,
    InsufficientDataError,
    NoCandidatesError,
    ZeroSupportError,
)
from .geometry import Circle, circles_from_triples, rasterize_circle

__all__ = [
    "DetectorConfig",
    "DetectionResult",
    "CandidateSet",
    "generate_candidates",
    "match_score",
    "detect_one",
    "mask_circle",
    "continuity_check",
    "detect_multiple",
]


@dataclass(frozen=True)
class DetectorConfig:
    """Tunable parameters of the detector.

    ``theta`` and ``kmax_factor`` default to the standard settings
    (learning rate 0.003, ``n_c / 2`` learning cycles).
    """

    theta: float = 0.003
    kmax_factor: float = 0.5
    sample_fraction: float = 0.05
    min_sample: int = 30
    r_min: float = 8.0
    r_max_rule: str = "max"
    r_max: float | None = None
    max_candidates: int = 20000
    m_th: float = 0.1
    beta_stop: float = 0.95
    mask_width: float = 2.0
    continuity_min: float = 0.15

    def __post_init__(self):
        if not 0.0 < self.theta < 1.0:
            raise ValueError(f"theta must lie in (0, 1), got {self.theta}")
        if not 0.0 < self.kmax_factor <= 1.0:
            raise ValueError(f"kmax_factor must lie in (0, 1], got {self.kmax_factor}")
        if not 0.0 < self.sample_fraction <= 1.0:
            raise ValueError(f"sample_fraction must lie in (0, 1], got {self.sample_fraction}")
        if self.min_sample < 3:
            raise ValueError("min_sample must be at least 3")
        if self.r_max_rule not in ("max", "min"):
            raise ValueError(f"r_max_rule must be 'max' or 'min', got {self.r_max_rule!r}")
        if self.max_candidates < 1:
            raise ValueError("max_candidates must be positive")
        if not 0.0 < self.m_th < 1.0:
            raise ValueError(f"m_th must lie in (0, 1), got {self.m_th}")
        if not self.beta_stop > 0.0:
            raise ValueError(f"beta_stop must be positive, got {self.beta_stop}")
        if self.mask_width < 0:
            raise ValueError("mask_width must be non-negative")
        if not 0.0 <= self.continuity_min <= 1.0:
            raise ValueError("continuity_min must lie in [0, 1]")

    def radius_bounds(self, width: int, height: int) -> tuple[float, float]:
        """Open interval of admissible radii for a ``width`` x ``height`` image."""
        if self.r_max is not None:
            return self.r_min, self.r_max
        pick = max if self.r_max_rule == "max" else min
        return self.r_min, pick(width / 2.0, height / 2.0)

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class DetectionResult:
    circle: Circle
    beta: float
    probability: float
    iterations: int
    n_candidates: int
    seed: int | None = None
    early_stop: bool = False

    def to_dict(self) -> dict:
        return {
            "x0": self.circle.x0,
            "y0": self.circle.y0,
            "r": self.circle.r,
            "beta": self.beta,
            "probability": self.probability,
            "iterations": self.iterations,
            "n_candidates": self.n_candidates,
            "seed": self.seed,
        }


@dataclass
class CandidateSet:
    """Automaton action set: index triples into ``points`` and their circles."""

    points: np.ndarray
    triples: np.ndarray
    circles: np.ndarray
    n_all: int = 0
    exhaustive: bool = field(default=False)

    def __len__(self) -> int:
        return len(self.triples)

    def circle(self, i: int) -> Circle:
        x0, y0, r = self.circles[i]
        return Circle(float(x0), float(y0), float(r))


def _rng(seed) -> np.random.Generator:
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def _quantize(circles: np.ndarray) -> np.ndarray:
    return np.floor(circles + 0.5).astype(np.int64)


def _all_triples(n: int) -> np.ndarray:
    return np.fromiter(combinations(range(n), 3), dtype=np.dtype((np.intp, 3)), count=math.comb(n, 3))


# beyond this many triples, the shuffled-enumeration mode gives way to
# rejection sampling with a bounded number of draws
_ENUMERATE_LIMIT = 400_000


def generate_candidates(pts, width: int, height: int, cfg: DetectorConfig | None = None, seed=0) -> CandidateSet:
    """Build the action set from triples of sampled edge points.

    Every triple is enumerated when the triple space fits in
    ``cfg.max_candidates``; otherwise triples are drawn at random without
    repetition until that many survive. A triple survives if it is not
    collinear, its radius lies strictly inside the configured bounds, and
    its integer-rounded circle has not been seen before.

    Raises
    ------
    InsufficientDataError
        With fewer than three points.
    NoCandidatesError
        If nothing survives.
    """
    cfg = cfg or DetectorConfig()
    pts = np.asarray(pts)
    # pixel coordinates stay integral; sub-pixel points are accepted as is
    pts = pts.astype(np.int64 if pts.dtype.kind in "iub" else np.float64).reshape(-1, 2)
    n = len(pts)
    if n < 3:
        raise InsufficientDataError(f"{n} points cannot define a circle")
    r_lo, r_hi = cfg.radius_bounds(width, height)
    total = math.comb(n, 3)
    target = cfg.max_candidates
    exhaustive = total <= target

    seen: set[tuple[int, int, int]] = set()
    kept_triples: list[np.ndarray] = []
    kept_circles: list[np.ndarray] = []
    n_kept = 0

    def absorb(batch: np.ndarray) -> None:
        nonlocal n_kept
        circles, valid = circles_from_triples(pts, batch)
        r = circles[:, 2]
        ok = valid & (r > r_lo) & (r < r_hi)
        q = _quantize(np.where(ok[:, None], circles, 0.0))
        for i in np.flatnonzero(ok):
            if n_kept >= target:
                break
            key = (int(q[i, 0]), int(q[i, 1]), int(q[i, 2]))
            if key in seen:
                continue
            seen.add(key)
            kept_triples.append(batch[i])
            kept_circles.append(circles[i])
            n_kept += 1

    rng = _rng(seed)
    if exhaustive:
        absorb(_all_triples(n))
    elif total <= _ENUMERATE_LIMIT:
        order = _all_triples(n)[rng.permutation(total)]
        step = max(target, 1024)
        for start in range(0, total, step):
            absorb(order[start : start + step])
            if n_kept >= target:
                break
    else:
        drawn: set[tuple[int, int, int]] = set()
        budget = 50 * target
        while n_kept < target and len(drawn) < budget:
            raw = np.sort(rng.integers(0, n, size=(2 * target, 3)), axis=1)
            raw = raw[(raw[:, 0] != raw[:, 1]) & (raw[:, 1] != raw[:, 2])]
            fresh = []
            for t in raw:
                key = (int(t[0]), int(t[1]), int(t[2]))
                if key not in drawn:
                    drawn.add(key)
                    fresh.append(t)
            if fresh:
                absorb(np.asarray(fresh, dtype=np.intp))

    if n_kept == 0:
        raise NoCandidatesError("no candidate circle survived filtering")
    return CandidateSet(
        points=pts,
        triples=np.asarray(kept_triples, dtype=np.intp),
        circles=np.asarray(kept_circles, dtype=np.float64),
        n_all=total,
        exhaustive=exhaustive,
    )


def match_score(c: Circle, em: EdgeMap) -> float:
    """Fraction of the circle's in-bounds test points that are edge pixels."""
    pts = rasterize_circle(c, em.width, em.height)
    if len(pts) == 0:
        raise ZeroSupportError(f"{c} has no rasterized point inside the image")
    hits = np.count_nonzero(em.bits[pts[:, 1], pts[:, 0]])
    return hits / len(pts)


def _safe_score(c: Circle, em: EdgeMap) -> float:
    try:
        return match_score(c, em)
    except (ZeroSupportError, CircleDetectionError):
        return 0.0


def detect_one(em: EdgeMap, cfg: DetectorConfig | None = None, seed=0, *, memoize: bool = True) -> DetectionResult:
    """Detect the single best-supported circle in an edge map.

    Samples edge points, builds the candidate set, then runs
    ``ceil(kmax_factor * n_c)`` select/evaluate/update cycles starting from
    a uniform distribution. The run ends early when an evaluated candidate
    reaches ``beta_stop``; that candidate is then the answer. Otherwise the
    most probable action wins.

    Parameters
    ----------
    seed : int or numpy.random.Generator
        Drives sampling, candidate draws and action selection.
    memoize : bool
        Cache each action's score. Scores are deterministic, so this only
        affects speed.
    """
    cfg = cfg or DetectorConfig()
    if em.edge_count() < 3:
        raise InsufficientDataError(f"edge map has {em.edge_count()} edge pixels; a circle needs 3")
    rng = _rng(seed)
    pts = sample_edge_points(em, cfg.sample_fraction, cfg.min_sample, rng)
    cands = generate_candidates(pts, em.width, em.height, cfg, rng)
    n_c = len(cands)
    kmax = max(1, math.ceil(cfg.kmax_factor * n_c))

    p = automaton.init_uniform(n_c)
    cache: dict[int, float] = {}
    chosen = None
    k = 0
    stopped = False
    while k < kmax:
        a = automaton.select_action(p, rng.random())
        if memoize and a in cache:
            beta = cache[a]
        else:
            beta = _safe_score(cands.circle(a), em)
            cache[a] = beta
        p = automaton.lri_update(p, a, beta, cfg.theta)
        k += 1
        if beta >= cfg.beta_stop:
            chosen, stopped = a, True
            break

    if chosen is None:
        chosen = automaton.best_action(p)
    circle = cands.circle(chosen)
    beta = cache[chosen] if chosen in cache else _safe_score(circle, em)
    return DetectionResult(
        circle=circle,
        beta=float(beta),
        probability=float(p[chosen]),
        iterations=k,
        n_candidates=n_c,
        seed=seed if isinstance(seed, (int, np.integer)) else None,
        early_stop=stopped,
    )


def mask_circle(em: EdgeMap, c: Circle, mask_width: float = 2.0) -> EdgeMap:
    """Clear the edge pixels along a circle's circumference.

    The band is measured around the integer-rounded circle, with a half
    pixel allowance so that ``mask_width = 0`` clears exactly the
    rasterized ring. Returns a new edge map.
    """
    cx, cy, r = c.rounded()
    reach = r + mask_width + 1
    x_lo, x_hi = max(0, int(math.floor(cx - reach))), min(em.width, int(math.ceil(cx + reach)) + 1)
    y_lo, y_hi = max(0, int(math.floor(cy - reach))), min(em.height, int(math.ceil(cy + reach)) + 1)
    bits = em.bits.copy()
    if x_lo < x_hi and y_lo < y_hi:
        yy, xx = np.mgrid[y_lo:y_hi, x_lo:x_hi]
        dist = np.hypot(xx - cx, yy - cy)
        band = np.abs(dist - r) <= mask_width + 0.5
        bits[y_lo:y_hi, x_lo:x_hi] &= ~band
    if r >= 1:
        ring = rasterize_circle(c, em.width, em.height)
        bits[ring[:, 1], ring[:, 0]] = False
    return EdgeMap(bits)


def longest_arc_fraction(c: Circle, em: EdgeMap, max_gap: int = 2) -> float:
    """Longest angular run of supported test points over the total count.

    Test points are ordered by angle around the rounded center. A run may
    bridge up to ``max_gap`` consecutive unsupported points and wraps
    around the circle.
    """
    pts = rasterize_circle(c, em.width, em.height)
    n = len(pts)
    if n == 0:
        return 0.0
    cx, cy, _ = c.rounded()
    order = np.argsort(np.arctan2(pts[:, 1] - cy, pts[:, 0] - cx), kind="stable")
    hit = em.bits[pts[order, 1], pts[order, 0]]
    idx = np.flatnonzero(hit)
    if len(idx) == 0:
        return 0.0
    # cyclic gaps (unsupported points) between consecutive hits
    gaps = np.diff(np.append(idx, idx[0] + n)) - 1
    if np.all(gaps <= max_gap):
        return 1.0
    # start right after a gap that breaks a run and walk around once
    breaks = np.flatnonzero(gaps > max_gap)
    start = (breaks[0] + 1) % len(idx)
    pos = np.roll(idx, -start)
    pos = np.where(pos < pos[0], pos + n, pos)
    split = np.flatnonzero(np.diff(pos) - 1 > max_gap) + 1
    best = 0
    for run in np.split(pos, split):
        best = max(best, int(run[-1] - run[0] + 1))
    return best / n


def continuity_check(c: Circle, em: EdgeMap, continuity_min: float = 0.15) -> bool:
    """Whether the circle's support contains a long enough contiguous arc."""
    return longest_arc_fraction(c, em) >= continuity_min


def detect_multiple(
    em: EdgeMap,
    cfg: DetectorConfig | None = None,
    seed=0,
    max_circles: int = 10,
    *,
    detect: Callable[..., DetectionResult] | None = None,
) -> list[DetectionResult]:
    """Extract circles one by one, masking each before searching again.

    Stops when the best score falls under ``cfg.m_th``, when
    ``max_circles`` circles were accepted, or when fewer than three edge
    pixels remain. Detections without a long enough contiguous arc are
    masked but not reported. An empty list means no circle was detected.

    ``detect`` replaces the single-circle search (called as
    ``detect(em, seed)``); it defaults to :func:`detect_one` with ``cfg``.
    """
    cfg = cfg or DetectorConfig()
    if detect is None:
        def detect(m, s):
            return detect_one(m, cfg, s)

    if isinstance(seed, np.random.Generator):
        seed = int(seed.integers(2**63))
    base = np.random.SeedSequence(seed)
    found: list[DetectionResult] = []
    current = em
    while len(found) < max_circles and current.edge_count() >= 3:
        sub = int(base.spawn(1)[0].generate_state(1, np.uint64)[0])
        try:
            res = detect(current, sub)
        except (NoCandidatesError, InsufficientDataError):
            break
        if res.beta < cfg.m_th:
            break
        before = current.edge_count()
        masked = mask_circle(current, res.circle, cfg.mask_width)
        if continuity_check(res.circle, current, cfg.continuity_min):
            found.append(res)
        if masked.edge_count() == before:
            break
        current = masked
    return found
