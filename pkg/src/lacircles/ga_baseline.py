"""Genetic-algorithm circle detector used as the comparison baseline.

Individuals encode three indices into the sampled edge points as one
binary genome. Fitness is the fraction of uniformly spaced boundary
samples that fall on edge pixels. Selection is fitness-proportional with
elitism, followed by single-point crossover and bit-inversion mutation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .detector import DetectionResult, DetectorConfig
from .edgemap import EdgeMap, sample_edge_points
from .errors import InsufficientDataError
from .geometry import Circle, circles_from_triples

__all__ = [
    "GAConfig",
    "GARun",
    "uniform_test_points",
    "roulette_select",
    "ga_evolve",
    "ga_detect",
]


@dataclass(frozen=True)
class GAConfig:
    population: int = 70
    crossover_prob: float = 0.55
    mutation_prob: float = 0.10
    elite: int = 2
    generations: int = 200
    ns_test_points: int = 100

    def __post_init__(self):
        if not 0.0 <= self.crossover_prob <= 1.0:
            raise ValueError("crossover_prob must lie in [0, 1]")
        if not 0.0 <= self.mutation_prob <= 1.0:
            raise ValueError("mutation_prob must lie in [0, 1]")
        if not 0 <= self.elite < self.population:
            raise ValueError("elite must be smaller than the population")
        if self.generations < 0:
            raise ValueError("generations must be non-negative")
        if self.ns_test_points < 4:
            raise ValueError("ns_test_points must be at least 4")


def uniform_test_points(c: Circle, ns: int, width: int | None = None, height: int | None = None) -> np.ndarray:
    """``ns`` boundary samples at angles ``2*pi*i/ns``, rounded to pixels.

    Samples outside a given ``width`` x ``height`` image are dropped.
    Duplicates created by rounding are kept, since scores divide by ``ns``.
    """
    if ns < 4:
        raise ValueError("ns must be at least 4")
    ang = 2.0 * np.pi * np.arange(ns) / ns
    x = np.floor(c.x0 + c.r * np.cos(ang) + 0.5).astype(np.int64)
    y = np.floor(c.y0 + c.r * np.sin(ang) + 0.5).astype(np.int64)
    pts = np.stack([x, y], axis=1)
    if width is not None and height is not None:
        pts = pts[(x >= 0) & (x < width) & (y >= 0) & (y < height)]
    return pts


def roulette_select(fitness, k: int, rng: np.random.Generator) -> np.ndarray:
    """Draw ``k`` indices with probability proportional to fitness.

    An all-zero fitness vector falls back to uniform selection.
    """
    f = np.asarray(fitness, dtype=np.float64)
    total = f.sum()
    if not total > 0:
        return rng.integers(0, len(f), size=k)
    cum = np.cumsum(f / total)
    idx = np.searchsorted(cum, rng.random(k), side="right")
    return np.minimum(idx, len(f) - 1)


def _fitness_batch(circles: np.ndarray, ok: np.ndarray, em: EdgeMap, ns: int) -> np.ndarray:
    """Fraction of ``ns`` boundary samples on edge pixels, per circle row."""
    fit = np.zeros(len(circles))
    if not ok.any():
        return fit
    c = circles[ok]
    ang = 2.0 * np.pi * np.arange(ns) / ns
    x = np.floor(c[:, 0:1] + c[:, 2:3] * np.cos(ang) + 0.5).astype(np.int64)
    y = np.floor(c[:, 1:2] + c[:, 2:3] * np.sin(ang) + 0.5).astype(np.int64)
    inside = (x >= 0) & (x < em.width) & (y >= 0) & (y < em.height)
    hits = np.zeros_like(inside)
    hits[inside] = em.bits[y[inside], x[inside]]
    fit[ok] = hits.sum(axis=1) / ns
    return fit


@dataclass
class GARun:
    """Outcome of :func:`ga_evolve` with per-generation diagnostics."""

    genome: np.ndarray
    triple: tuple[int, int, int] | None
    circle: Circle | None
    fitness: float
    best_history: list[float] = field(default_factory=list)
    population_sizes: list[int] = field(default_factory=list)
    final_fitness: np.ndarray | None = None
    evaluated: int = 0


def ga_evolve(pts, em: EdgeMap, cfg: GAConfig, detector_cfg: DetectorConfig, rng: np.random.Generator) -> GARun:
    """Evolve a population of index triples over the sampled points."""
    pts = np.asarray(pts, dtype=np.int64)
    n = len(pts)
    bits = max(1, math.ceil(math.log2(n)))
    length = 3 * bits
    weights = 1 << np.arange(bits - 1, -1, -1)
    r_lo, r_hi = detector_cfg.radius_bounds(em.width, em.height)
    cache: dict[tuple[int, int, int], tuple[float, tuple]] = {}

    def evaluate(pop: np.ndarray) -> np.ndarray:
        idx = pop.reshape(len(pop), 3, bits).astype(np.int64) @ weights
        feasible = (idx < n).all(axis=1)
        feasible &= (idx[:, 0] != idx[:, 1]) & (idx[:, 1] != idx[:, 2]) & (idx[:, 0] != idx[:, 2])
        safe = np.where(feasible[:, None], idx, np.array([0, 1, 2]))
        circles, valid = circles_from_triples(pts, safe)
        ok = feasible & valid & (circles[:, 2] > r_lo) & (circles[:, 2] < r_hi)
        fit = _fitness_batch(circles, ok, em, cfg.ns_test_points)
        for i in np.flatnonzero(ok):
            key = tuple(int(v) for v in np.sort(idx[i]))
            cache.setdefault(key, (fit[i], tuple(circles[i])))
        return fit

    pop = rng.random((cfg.population, length)) < 0.5
    fit = evaluate(pop)
    history, sizes = [float(fit.max())], [len(pop)]
    for _ in range(cfg.generations):
        order = np.argsort(-fit, kind="stable")
        elite = pop[order[: cfg.elite]]
        n_child = cfg.population - cfg.elite
        parents = roulette_select(fit, 2 * ((n_child + 1) // 2), rng).reshape(-1, 2)
        children = []
        for a, b in parents:
            ca, cb = pop[a].copy(), pop[b].copy()
            if rng.random() < cfg.crossover_prob:
                cut = int(rng.integers(1, length))
                ca[cut:], cb[cut:] = pop[b][cut:], pop[a][cut:]
            children.extend((ca, cb))
        children = np.array(children[:n_child]).reshape(n_child, length)
        flip = rng.random(n_child) < cfg.mutation_prob
        pos = rng.integers(0, length, size=n_child)
        children[flip, pos[flip]] ^= True
        pop = np.concatenate([elite, children]) if cfg.elite else children
        fit = evaluate(pop)
        history.append(float(fit.max()))
        sizes.append(len(pop))

    best = int(np.argmax(fit))
    idx = pop[best].reshape(3, bits).astype(np.int64) @ weights
    key = tuple(int(v) for v in np.sort(idx))
    if fit[best] > 0 and key in cache:
        circle = Circle(*(float(v) for v in cache[key][1]))
        triple = key
    else:
        circle, triple = None, None
    return GARun(pop[best].copy(), triple, circle, float(fit[best]), history, sizes, fit, len(cache))


def ga_detect(em: EdgeMap, cfg: GAConfig | None = None, detector_cfg: DetectorConfig | None = None, seed=0) -> DetectionResult:
    """Best circle found by the GA, with its fitness reported as ``beta``.

    ``probability`` is the roulette share of the winning individual in the
    final population.
    """
    cfg = cfg or GAConfig()
    detector_cfg = detector_cfg or DetectorConfig()
    if em.edge_count() < 3:
        raise InsufficientDataError(f"edge map has {em.edge_count()} edge pixels; a circle needs 3")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    pts = sample_edge_points(em, detector_cfg.sample_fraction, detector_cfg.min_sample, rng)
    run = ga_evolve(pts, em, cfg, detector_cfg, rng)
    circle = run.circle
    if circle is None:
        # nothing feasible was ever found: zero-score placeholder
        circle = Circle(em.width / 2.0, em.height / 2.0, detector_cfg.r_min + 1.0)
    total = run.final_fitness.sum()
    share = float(run.fitness / total) if total > 0 else 0.0
    return DetectionResult(
        circle=circle,
        beta=run.fitness,
        probability=min(1.0, share),
        iterations=cfg.generations,
        n_candidates=run.evaluated,
        seed=seed if isinstance(seed, (int, np.integer)) else None,
    )
