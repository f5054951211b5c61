"""From a grayscale picture to a circle: edge detection, then the automaton.

A rendered scene with a filled disk and a filled square goes through the
Canny stage (Gaussian smoothing, Sobel gradients, non-maximum suppression,
hysteresis). The square's straight sides give no consistent circle, but
smoothing rounds its corners into short arcs that small candidates can
latch onto. Which corners survive depends on the smoothing width.
"""

from pathlib import Path

from lacircles.bench import CircleShape, GroundTruthCircle, PolygonShape, SceneSpec, error_score, render_gray
from lacircles.cli import write_overlay
from lacircles.detector import detect_multiple
from lacircles.edgemap import GrayImage, canny, save_edge_map, save_pgm

OUT = Path(__file__).parent / "out"
OUT.mkdir(exist_ok=True)

scene = SceneSpec(200, 200, (CircleShape(130, 120, 45), PolygonShape(((15, 15), (75, 15), (75, 75), (15, 75)))))
gray = GrayImage(render_gray(scene))
save_pgm(OUT / "canny_input.pgm", gray.pixels)

for sigma, low, high in ((1.0, 0.1, 0.3), (2.0, 0.1, 0.3), (3.0, 0.1, 0.3)):
    edges = canny(gray, sigma, low, high)
    found = detect_multiple(edges, seed=1)
    summary = ", ".join(
        f"({r.circle.x0:.1f}, {r.circle.y0:.1f}, {r.circle.r:.1f}) ES {error_score(GroundTruthCircle(130, 120, 45), r.circle):.2f}"
        for r in found
    )
    print(f"sigma {sigma}, thresholds {low}/{high}: {edges.edge_count()} edge pixels -> {summary or 'none'}")

edges = canny(gray, sigma=2.0)
save_edge_map(OUT / "canny_edges.pgm", edges)
write_overlay(OUT / "canny_overlay.png", gray.pixels, detect_multiple(edges, seed=1))
