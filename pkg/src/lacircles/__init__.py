"""Circle detection in edge maps with a learning automaton.

Candidate circles through triples of sampled edge pixels form the action
set of a finite learning automaton; the fraction of each candidate's
rasterized circumference that lands on edge pixels is the reward.
"""

__version__ = "0.1.0"

from .automaton import best_action, init_uniform, lri_update, select_action
from .bench import (
    CircleShape,
    GroundTruthCircle,
    SceneSpec,
    error_score,
    generate_scene,
    run_trials,
)
from .detector import (
    DetectionResult,
    DetectorConfig,
    continuity_check,
    detect_multiple,
    detect_one,
    generate_candidates,
    mask_circle,
    match_score,
)
from .edgemap import EdgeMap, GrayImage, canny, load_edge_map, load_gray, sample_edge_points
from .errors import CircleDetectionError, NoCandidatesError
from .ga_baseline import GAConfig, ga_detect
from .geometry import Circle, circle_from_three_points, rasterize_circle

__all__ = [
    "Circle",
    "CircleDetectionError",
    "CircleShape",
    "DetectionResult",
    "DetectorConfig",
    "EdgeMap",
    "GAConfig",
    "GrayImage",
    "GroundTruthCircle",
    "NoCandidatesError",
    "SceneSpec",
    "best_action",
    "canny",
    "circle_from_three_points",
    "continuity_check",
    "detect_multiple",
    "detect_one",
    "error_score",
    "ga_detect",
    "generate_candidates",
    "generate_scene",
    "init_uniform",
    "load_edge_map",
    "load_gray",
    "lri_update",
    "mask_circle",
    "match_score",
    "rasterize_circle",
    "run_trials",
    "sample_edge_points",
    "select_action",
]
