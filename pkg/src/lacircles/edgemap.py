"""Grayscale loading, Canny edge extraction and edge-point sampling."""

from __future__ import annotations

import math
import os
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .errors import DimensionError, ImageFormatError, InsufficientDataError

__all__ = [
    "GrayImage",
    "EdgeMap",
    "load_gray",
    "load_edge_map",
    "save_edge_map",
    "save_pgm",
    "canny",
    "sample_edge_points",
]


@dataclass(frozen=True)
class GrayImage:
    """8-bit grayscale image; ``pixels`` has shape ``(height, width)``."""

    pixels: np.ndarray

    def __post_init__(self):
        px = np.asarray(self.pixels)
        if px.ndim != 2 or px.size == 0:
            raise DimensionError(f"expected a non-empty 2-D array, got shape {px.shape}")
        object.__setattr__(self, "pixels", px.astype(np.uint8, copy=False))

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]


@dataclass(frozen=True)
class EdgeMap:
    """Binary edge raster; ``bits[y, x]`` is True on edge pixels."""

    bits: np.ndarray

    def __post_init__(self):
        b = np.asarray(self.bits)
        if b.ndim != 2:
            raise DimensionError(f"expected a 2-D array, got shape {b.shape}")
        b = b.astype(bool, copy=True)
        b.flags.writeable = False
        object.__setattr__(self, "bits", b)

    @property
    def width(self) -> int:
        return self.bits.shape[1]

    @property
    def height(self) -> int:
        return self.bits.shape[0]

    def edge_count(self) -> int:
        return int(np.count_nonzero(self.bits))

    def edge_points(self) -> np.ndarray:
        """All edge pixels as ``(x, y)`` rows in row-major scan order."""
        ys, xs = np.nonzero(self.bits)
        return np.stack([xs, ys], axis=1).astype(np.int64)

    def __eq__(self, other):
        if not isinstance(other, EdgeMap):
            return NotImplemented
        return self.bits.shape == other.bits.shape and bool(np.array_equal(self.bits, other.bits))

    __hash__ = None


# ---------------------------------------------------------------------------
# file I/O


def _read_pgm(data: bytes, path) -> tuple[np.ndarray, int]:
    magic = data[:2]
    # header: magic, width, height, maxval, separated by whitespace/comments
    fields = []
    pos = 2
    n = len(data)
    while len(fields) < 3:
        while pos < n and data[pos : pos + 1].isspace():
            pos += 1
        if pos < n and data[pos : pos + 1] == b"#":
            while pos < n and data[pos : pos + 1] not in (b"\n", b"\r"):
                pos += 1
            continue
        start = pos
        while pos < n and not data[pos : pos + 1].isspace() and data[pos : pos + 1] != b"#":
            pos += 1
        if start == pos:
            raise OSError(f"{path}: truncated PGM header")
        try:
            fields.append(int(data[start:pos]))
        except ValueError:
            raise ImageFormatError(f"{path}: malformed PGM header") from None
    width, height, maxval = fields
    if width < 1 or height < 1 or not 0 < maxval < 65536:
        raise ImageFormatError(f"{path}: bad PGM header {fields}")
    count = width * height
    if magic == b"P5":
        pos += 1  # single whitespace byte before the raster
        dtype = np.dtype(">u2") if maxval > 255 else np.dtype("u1")
        need = count * dtype.itemsize
        if n - pos < need:
            raise OSError(f"{path}: truncated PGM raster ({n - pos} of {need} bytes)")
        arr = np.frombuffer(data, dtype=dtype, count=count, offset=pos).astype(np.int64)
    else:
        body = data[pos:].split()
        if len(body) < count:
            raise OSError(f"{path}: truncated PGM raster ({len(body)} of {count} samples)")
        arr = np.array([int(v) for v in body[:count]], dtype=np.int64)
    return arr.reshape(height, width), 16 if maxval > 255 else 8


def _read_png(path) -> tuple[np.ndarray, int]:
    from PIL import Image

    try:
        with Image.open(path) as im:
            im.load()
            mode = im.mode
            if mode.startswith("I"):
                return np.asarray(im, dtype=np.int64), 16
            if mode in ("1", "L", "LA", "P", "RGB", "RGBA"):
                if mode in ("1", "L", "LA"):
                    return np.asarray(im.convert("L"), dtype=np.int64), 8
                rgb = np.asarray(im.convert("RGB"), dtype=np.float64)
                lum = rgb @ np.array([0.299, 0.587, 0.114])
                return np.floor(lum + 0.5).astype(np.int64), 8
            raise ImageFormatError(f"{path}: unsupported PNG mode {mode}")
    except (SyntaxError, ValueError) as exc:
        if isinstance(exc, ImageFormatError):
            raise
        raise OSError(f"{path}: cannot decode PNG: {exc}") from exc


_PNG_MAGIC = b"\x89PNG\r\n\x1a\n"


def _read_raster(path) -> tuple[np.ndarray, int]:
    """Raw samples and their bit depth (8 or 16)."""
    with open(path, "rb") as fh:
        data = fh.read()
    if data.startswith(_PNG_MAGIC):
        return _read_png(path)
    if data[:2] in (b"P2", b"P5"):
        return _read_pgm(data, path)
    if data[:1] == b"P" and data[1:2].isdigit():
        kind = "PNM " + data[:2].decode("ascii")
    else:
        kind = os.path.splitext(str(path))[1].lower().lstrip(".") or "unknown"
    raise ImageFormatError(f"{path}: unsupported image format {kind!r} (expected PGM or PNG)")


def load_gray(path) -> GrayImage:
    """Read a PGM (P2/P5) or PNG file as an 8-bit grayscale image.

    Color PNGs are reduced by luminance weighting and 16-bit samples are
    right-shifted to 8 bits.

    Raises
    ------
    OSError
        If the file cannot be read or is truncated.
    ImageFormatError
        If the format is not PGM or PNG.
    """
    arr, depth = _read_raster(path)
    if depth == 16:
        arr = arr >> 8
    return GrayImage(np.clip(arr, 0, 255).astype(np.uint8))


def load_edge_map(path) -> EdgeMap:
    """Read a binary raster where any nonzero sample is an edge."""
    arr, _ = _read_raster(path)
    return EdgeMap(arr != 0)


def save_pgm(path, pixels) -> None:
    """Write an 8-bit binary (P5) PGM."""
    px = np.asarray(pixels)
    if px.ndim != 2:
        raise DimensionError("PGM output needs a 2-D array")
    px = np.clip(px, 0, 255).astype(np.uint8)
    h, w = px.shape
    with open(path, "wb") as fh:
        fh.write(b"P5\n%d %d\n255\n" % (w, h))
        fh.write(px.tobytes())


def save_edge_map(path, em: EdgeMap) -> None:
    """Write an edge map as a P5 PGM with values 0 and 255."""
    save_pgm(path, em.bits.astype(np.uint8) * 255)


# ---------------------------------------------------------------------------
# Canny

_SOBEL_X = np.array([[-1, 0, 1], [-2, 0, 2], [-1, 0, 1]], dtype=np.float64)
_SOBEL_Y = _SOBEL_X.T


def canny(img: GrayImage, sigma: float = 1.0, low: float = 0.1, high: float = 0.3) -> EdgeMap:
    """Single-pixel edge map by the Canny pipeline.

    Gaussian smoothing, Sobel gradients, non-maximum suppression along the
    gradient direction quantized to four sectors, then double-threshold
    hysteresis with 8-connected linking. ``low`` and ``high`` are fractions
    of the maximum gradient magnitude.
    """
    if not sigma > 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    if not 0.0 <= low < high <= 1.0:
        raise ValueError(f"need 0 <= low < high <= 1, got low={low}, high={high}")
    truncate = 4.0
    support = 2 * int(truncate * sigma + 0.5) + 1
    if img.width < support or img.height < support:
        raise DimensionError(
            f"image {img.width}x{img.height} is smaller than the {support}-pixel Gaussian support"
        )

    smooth = ndimage.gaussian_filter(img.pixels.astype(np.float64), sigma, mode="nearest", truncate=truncate)
    gx = ndimage.correlate(smooth, _SOBEL_X, mode="nearest")
    gy = ndimage.correlate(smooth, _SOBEL_Y, mode="nearest")
    mag = np.hypot(gx, gy)
    peak = mag.max()
    if peak <= 1e-9 * 255:
        return EdgeMap(np.zeros_like(mag, dtype=bool))

    # sector 0: horizontal gradient, 1: 45 deg, 2: vertical, 3: 135 deg
    angle = np.rad2deg(np.arctan2(gy, gx)) % 180.0
    sector = (np.floor((angle + 22.5) / 45.0).astype(np.int64)) % 4
    padded = np.pad(mag, 1, mode="constant")
    h, w = mag.shape

    def shifted(dy, dx):
        return padded[1 + dy : 1 + dy + h, 1 + dx : 1 + dx + w]

    # neighbour offsets (dy, dx) along the gradient for each sector
    steps = {0: (0, 1), 1: (1, 1), 2: (1, 0), 3: (1, -1)}
    keep = np.zeros_like(mag, dtype=bool)
    for s, (dy, dx) in steps.items():
        fwd = shifted(dy, dx)
        bwd = shifted(-dy, -dx)
        # ties broken toward the forward neighbour to keep edges one pixel wide
        local = (mag > fwd) & (mag >= bwd)
        keep |= (sector == s) & local
    keep &= mag > 0

    lo = low * peak
    hi = high * peak
    weak = keep & (mag >= lo)
    strong = keep & (mag >= hi)
    labels, nlab = ndimage.label(weak, structure=np.ones((3, 3), dtype=bool))
    if nlab == 0:
        return EdgeMap(np.zeros_like(weak))
    seeded = np.zeros(nlab + 1, dtype=bool)
    seeded[np.unique(labels[strong])] = True
    seeded[0] = False
    return EdgeMap(seeded[labels])


# ---------------------------------------------------------------------------
# sampling


def sample_edge_points(em: EdgeMap, fraction: float = 0.05, min_count: int = 30, seed=0) -> np.ndarray:
    """Draw a working subset of edge pixels uniformly without replacement.

    The subset has ``max(ceil(fraction * N), min_count)`` points, capped at
    the total edge count ``N``. Candidates are enumerated in row-major order
    before the seeded draw, so the result is platform independent.

    Parameters
    ----------
    seed : int or numpy.random.Generator

    Returns
    -------
    (k, 2) int array of ``(x, y)`` rows.
    """
    if not 0.0 < fraction <= 1.0:
        raise ValueError(f"fraction must lie in (0, 1], got {fraction}")
    all_pts = em.edge_points()
    n = len(all_pts)
    if n < 3:
        raise InsufficientDataError(f"edge map has {n} edge pixels; a circle needs 3")
    k = min(n, max(math.ceil(fraction * n), int(min_count)))
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    idx = rng.choice(n, size=k, replace=False)
    return all_pts[idx]
