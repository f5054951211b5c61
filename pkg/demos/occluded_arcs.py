"""Partial circles: occlusions, arcs and circles cut by the image border.

The match score counts only in-bounds test points, and the continuity
check needs one long contiguous arc rather than a full ring, so partial
evidence is still enough to place the circle.
"""

from lacircles.bench import CircleShape, Occlusion, SceneSpec, error_score, generate_scene
from lacircles.detector import continuity_check, detect_one, longest_arc_fraction

cases = {
    "half hidden by a rectangle": SceneSpec(200, 200, (CircleShape(100, 100, 50),), 0.005, (Occlusion(100, 0, 199, 199),)),
    "quarter arc": SceneSpec(200, 200, (CircleShape(100, 100, 60, arc=(0, 90)),), 0.005),
    "cut by the border": SceneSpec(200, 200, (CircleShape(20, 100, 60),), 0.005),
}
for name, scene in cases.items():
    ok = 0
    for seed in range(10):
        edges, truths = generate_scene(scene, seed=seed)
        res = detect_one(edges, seed=seed)
        ok += error_score(truths[0], res.circle) < 1
    c = res.circle
    print(
        f"{name:<28} {ok}/10 seeds succeed; last run ({c.x0:.1f}, {c.y0:.1f}, {c.r:.1f}), beta {res.beta:.2f}, "
        f"longest arc {longest_arc_fraction(c, edges):.2f}, continuous {continuity_check(c, edges)}"
    )
