"""Circle geometry: three-point circle fitting and midpoint rasterization.

Coordinates follow image conventions throughout: ``x`` is the column index
and ``y`` the row index, both 0-based.
"""

from __future__ import annotations

import math
from functools import lru_cache
from typing import NamedTuple

import numpy as np

from .errors import CollinearPointsError, DegenerateRadiusError

#: Rejection threshold on the (scaled) determinant, in squared-pixel units.
COLLINEAR_EPS = 1e-9


class Circle(NamedTuple):
    """A circle with sub-pixel center ``(x0, y0)`` and radius ``r``."""

    x0: float
    y0: float
    r: float

    def rounded(self) -> tuple[int, int, int]:
        """Nearest-integer ``(x0, y0, r)``, as used for rasterization."""
        return _round_half_up(self.x0), _round_half_up(self.y0), _round_half_up(self.r)


def _round_half_up(v: float) -> int:
    # Python's round() is banker's rounding; pixel grids want half-up.
    return int(math.floor(v + 0.5))


def circle_from_three_points(p1, p2, p3, eps: float = COLLINEAR_EPS) -> Circle:
    """Circle through three points.

    The center is obtained from the ratio of two 2x2 determinants over
    ``D = 4((x2-x1)(y3-y1) - (x3-x1)(y2-y1))`` and the radius is the
    distance from the center to ``p1``.

    Parameters
    ----------
    p1, p2, p3 : pair of numbers
        Points as ``(x, y)``.
    eps : float
        Triples with ``|D| < eps`` are rejected as collinear.

    Raises
    ------
    CollinearPointsError
        If the points are collinear or two of them coincide.
    """
    x1, y1 = float(p1[0]), float(p1[1])
    # Work relative to p1: the determinants are translation invariant and
    # this avoids cancellation in the squared-norm differences.
    u = (float(p2[0]) - x1, float(p2[1]) - y1)
    v = (float(p3[0]) - x1, float(p3[1]) - y1)
    d = 4.0 * (u[0] * v[1] - v[0] * u[1])
    if not abs(d) >= eps:
        raise CollinearPointsError(f"points {p1}, {p2}, {p3} are collinear")
    su = u[0] * u[0] + u[1] * u[1]
    sv = v[0] * v[0] + v[1] * v[1]
    det_a = su * 2.0 * v[1] - 2.0 * u[1] * sv
    det_b = 2.0 * u[0] * sv - su * 2.0 * v[0]
    cx = det_a / d
    cy = det_b / d
    r = math.hypot(cx, cy)
    return Circle(cx + x1, cy + y1, r)


def circles_from_triples(pts: np.ndarray, triples: np.ndarray, eps: float = COLLINEAR_EPS):
    """Vectorized :func:`circle_from_three_points`.

    Parameters
    ----------
    pts : (N, 2) array
        Point coordinates as ``(x, y)`` rows.
    triples : (M, 3) int array
        Index triples into ``pts``.

    Returns
    -------
    circles : (M, 3) float array
        ``(x0, y0, r)`` per triple; rows for collinear triples are NaN.
    valid : (M,) bool array
        False where the triple is collinear.
    """
    pts = np.asarray(pts, dtype=np.float64)
    triples = np.asarray(triples, dtype=np.intp)
    p1 = pts[triples[:, 0]]
    u = pts[triples[:, 1]] - p1
    v = pts[triples[:, 2]] - p1
    d = 4.0 * (u[:, 0] * v[:, 1] - v[:, 0] * u[:, 1])
    valid = np.abs(d) >= eps
    su = np.einsum("ij,ij->i", u, u)
    sv = np.einsum("ij,ij->i", v, v)
    det_a = su * 2.0 * v[:, 1] - 2.0 * u[:, 1] * sv
    det_b = 2.0 * u[:, 0] * sv - su * 2.0 * v[:, 0]
    out = np.full((len(triples), 3), np.nan)
    with np.errstate(divide="ignore", invalid="ignore"):
        cx = det_a[valid] / d[valid]
        cy = det_b[valid] / d[valid]
    out[valid, 0] = cx + p1[valid, 0]
    out[valid, 1] = cy + p1[valid, 1]
    out[valid, 2] = np.hypot(cx, cy)
    return out, valid


def midpoint_octant(r: int) -> list[tuple[int, int]]:
    """First-octant offsets of the midpoint circle algorithm.

    Starts at ``(r, 0)`` and steps upwards-left with integer arithmetic
    only, stopping once the 45 degree diagonal is crossed.
    """
    x, y = r, 0
    d = 1 - r
    out = []
    while x >= y:
        out.append((x, y))
        y += 1
        if d < 0:
            d += 2 * y + 1
        else:
            x -= 1
            d += 2 * (y - x) + 1
    return out


def rasterize_circle(c: Circle, width: int, height: int) -> np.ndarray:
    """Test point set of a circle clipped to a ``width`` x ``height`` image.

    The center and radius are rounded to integers, the first octant is
    traced with the midpoint algorithm and reflected eight ways. Seam
    duplicates are emitted once and points outside the image dropped.

    Returns
    -------
    (N, 2) int array of ``(x, y)`` pixels, ``N`` being the in-bounds count.
    """
    cx, cy, r = c.rounded()
    if r < 1:
        raise DegenerateRadiusError(f"radius {c.r!r} rounds below 1")
    pts = ring_offsets(r) + np.array([cx, cy])
    inside = (pts[:, 0] >= 0) & (pts[:, 0] < width) & (pts[:, 1] >= 0) & (pts[:, 1] < height)
    return pts[inside]


@lru_cache(maxsize=1024)
def ring_offsets(r: int) -> np.ndarray:
    """Distinct midpoint-circle offsets for integer radius ``r``, ordered by octant."""
    octant = np.array(midpoint_octant(r), dtype=np.int64)
    a, b = octant[:, 0], octant[:, 1]
    # eight reflections, each traversed counter-clockwise
    offsets = np.concatenate(
        [
            np.stack([a, b], 1),
            np.stack([b, a], 1)[::-1],
            np.stack([-b, a], 1),
            np.stack([-a, b], 1)[::-1],
            np.stack([-a, -b], 1),
            np.stack([-b, -a], 1)[::-1],
            np.stack([b, -a], 1),
            np.stack([a, -b], 1)[::-1],
        ]
    )
    _, first = np.unique(offsets, axis=0, return_index=True)
    out = offsets[np.sort(first)]
    out.flags.writeable = False
    return out
