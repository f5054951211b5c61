import io
import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lacircles.bench import (
    CircleShape,
    EllipseShape,
    GroundTruthCircle,
    LineShape,
    Occlusion,
    PolygonShape,
    SceneSpec,
    error_score,
    generate_scene,
    match_detections,
    parse_scene,
    render_gray,
    run_trials,
    write_records,
)
from lacircles.detector import DetectorConfig, detect_one, match_score
from lacircles.edgemap import GrayImage, canny
from lacircles.errors import SpecError
from lacircles.geometry import Circle, rasterize_circle

FAST = DetectorConfig(max_candidates=1500)


class TestGenerateScene:
    def test_single_circle(self):
        em, truths = generate_scene(SceneSpec(200, 200, (CircleShape(100, 100, 40),)))
        assert em.edge_count() == len(rasterize_circle(Circle(100, 100, 40), 200, 200))
        assert truths == [GroundTruthCircle(100, 100, 40)]

    def test_noise_count(self):
        clean, _ = generate_scene(SceneSpec(200, 200, (CircleShape(100, 100, 40),)))
        noisy, _ = generate_scene(SceneSpec(200, 200, (CircleShape(100, 100, 40),), 0.02), seed=5)
        assert abs(noisy.edge_count() - (clean.edge_count() + 800)) <= 1
        assert np.all(noisy.bits[clean.bits])

    def test_deterministic(self):
        spec = SceneSpec(150, 120, (CircleShape(60, 60, 30), LineShape((0, 0), (149, 119))), 0.03)
        assert generate_scene(spec, 7)[0] == generate_scene(spec, 7)[0]
        assert generate_scene(spec, 7)[0] != generate_scene(spec, 8)[0]

    def test_outside(self):
        with pytest.raises(SpecError, match="outside"):
            generate_scene(SceneSpec(100, 100, (CircleShape(500, 500, 10),)))

    def test_bad_noise(self):
        with pytest.raises(SpecError):
            SceneSpec(100, 100, (), 1.0)

    def test_ellipse_truth_cutoff(self):
        _, near = generate_scene(SceneSpec(200, 200, (EllipseShape(100, 100, 42, 38),)))
        _, far = generate_scene(SceneSpec(200, 200, (EllipseShape(100, 100, 60, 30),)))
        assert near == [GroundTruthCircle(100, 100, 40)]
        assert far == []

    def test_ellipse_closed(self):
        em, _ = generate_scene(SceneSpec(200, 200, (EllipseShape(100, 100, 80, 30, 25),)))
        from scipy import ndimage

        _, n = ndimage.label(em.bits, structure=np.ones((3, 3)))
        assert n == 1

    def test_polygon_and_line(self):
        em, truths = generate_scene(SceneSpec(50, 50, (PolygonShape(((5, 5), (40, 5), (40, 40))), LineShape((0, 49), (49, 49)))))
        assert truths == []
        assert em.bits[5, 5:41].all() and em.bits[49].all()

    def test_occlusion(self):
        spec = SceneSpec(200, 200, (CircleShape(100, 100, 40),), occlusions=(Occlusion(100, 0, 199, 199),))
        em, truths = generate_scene(spec)
        assert not em.bits[:, 100:].any()
        assert len(truths) == 1
        assert 0.4 < match_score(Circle(100, 100, 40), em) < 0.6

    def test_arc(self):
        em, _ = generate_scene(SceneSpec(200, 200, (CircleShape(100, 100, 40, arc=(0, 180)),)))
        ys, _ = np.nonzero(em.bits)
        assert ys.min() >= 100

    def test_thickness(self):
        thin, _ = generate_scene(SceneSpec(200, 200, (CircleShape(100, 100, 40),)))
        thick, _ = generate_scene(SceneSpec(200, 200, (CircleShape(100, 100, 40, thickness=3),)))
        assert thick.edge_count() > 2.5 * thin.edge_count()

    @settings(max_examples=50, deadline=None)
    @given(st.integers(20, 180), st.integers(20, 180), st.integers(2, 60))
    def test_truth_scores_one(self, x, y, r):
        em, truths = generate_scene(SceneSpec(200, 200, (CircleShape(x, y, r),)))
        assert match_score(Circle(*truths[0]), em) == 1.0


class TestParseScene:
    TEXT = """
    # three circles
    size 160 120
    circle 40 40 20
    circle 100 60 30 arc=0,270 thickness=2
    ellipse 80 80 10 12 15
    polygon 1,1 20,1 20,20
    line 0 0 10 10
    noise 0.02
    occlude 0 0 5 5
    """

    def test_full(self):
        spec = parse_scene(self.TEXT)
        assert (spec.width, spec.height, spec.noise_fraction) == (160, 120, 0.02)
        assert spec.shapes[0] == CircleShape(40, 40, 20)
        assert spec.shapes[1] == CircleShape(100, 60, 30, (0.0, 270.0), 2)
        assert spec.shapes[2] == EllipseShape(80, 80, 10, 12, 15)
        assert isinstance(spec.shapes[3], PolygonShape) and len(spec.shapes[3].vertices) == 3
        assert spec.occlusions == (Occlusion(0, 0, 5, 5),)

    @pytest.mark.parametrize(
        "text,line",
        [("circle 1 2\n", 1), ("size 10 10\nblob 3\n", 2), ("\n\npolygon 1,2 3,4\n", 3), ("noise x\n", 1)],
    )
    def test_errors_name_line(self, text, line):
        with pytest.raises(SpecError, match=f"line {line}"):
            parse_scene(text)


class TestErrorScore:
    t = GroundTruthCircle(100, 100, 40)

    def test_exact(self):
        assert error_score(self.t, Circle(100, 100, 40)) == 0

    def test_center_boundary(self):
        assert error_score(self.t, Circle(110, 110, 40)) == pytest.approx(1.0, abs=1e-12)

    def test_radius_boundary(self):
        assert error_score(self.t, Circle(100, 100, 50)) == pytest.approx(1.0, abs=1e-12)

    def test_bad_weights(self):
        with pytest.raises(ValueError):
            error_score(self.t, Circle(0, 0, 1), eta=0)

    @settings(max_examples=200)
    @given(
        st.tuples(*[st.floats(-50, 50)] * 3),
        st.integers(0, 2),
        st.floats(0.01, 10),
    )
    def test_monotone(self, delta, axis, extra):
        base = error_score(self.t, Circle(100 + delta[0], 100 + delta[1], 40 + delta[2]))
        assert base >= 0
        d = list(delta)
        d[axis] += math.copysign(extra, d[axis] if d[axis] != 0 else 1.0)
        assert error_score(self.t, Circle(100 + d[0], 100 + d[1], 40 + d[2])) > base


class TestMatchDetections:
    def test_nearest(self):
        truths = [GroundTruthCircle(0, 0, 5), GroundTruthCircle(100, 100, 5)]
        dets = [Circle(98, 99, 5), Circle(1, 1, 5)]
        assert match_detections(truths, dets) == [(0, 1), (1, 0)]

    def test_unmatched(self):
        truths = [GroundTruthCircle(0, 0, 5), GroundTruthCircle(100, 100, 5)]
        assert match_detections(truths, [Circle(90, 90, 5)]) == [(0, None), (1, 0)]


class TestRunTrials:
    spec = SceneSpec(200, 200, (CircleShape(100, 100, 40),), 0.02)

    def test_single_run_std_zero(self):
        st_ = run_trials(self.spec, "la", 1, 3, FAST)
        assert st_.std_es == 0 and st_.std_time_s == 0

    def test_deterministic(self):
        a = run_trials(self.spec, "la", 3, 10, FAST)
        b = run_trials(self.spec, "la", 3, 10, FAST)
        assert a.to_dict(timing=False) == b.to_dict(timing=False)
        assert [r.to_dict(False) for r in a.records] == [r.to_dict(False) for r in b.records]

    def test_success_rate_recomputable(self):
        st_ = run_trials(self.spec, "la", 6, 0, FAST, reuse_scene=False)
        assert st_.success_rate == pytest.approx(100 * sum(r.es < 1 for r in st_.records) / 6)
        assert [r.seed for r in st_.records] == list(range(6))

    def test_log_fields(self):
        st_ = run_trials(self.spec, "la", 2, 0, FAST)
        buf = io.StringIO()
        write_records(buf, st_, timing=True)
        lines = [json.loads(x) for x in buf.getvalue().splitlines()]
        assert list(lines[0]) == ["record", "seed", "method", "x", "y", "r", "beta", "es", "time_s"]
        assert lines[-1]["record"] == "summary" and lines[-1]["runs"] == 2

    def test_bad_method(self):
        with pytest.raises(ValueError):
            run_trials(self.spec, "hough", 1)

    @pytest.mark.slow
    def test_clean_circle_all_succeed(self):
        st_ = run_trials(SceneSpec(200, 200, (CircleShape(100, 100, 40),)), "la", 65, 0)
        assert st_.success_rate == 100
        assert st_.mean_es < 0.5


class TestRenderGray:
    def test_canny_recovers_circle(self):
        spec = SceneSpec(200, 200, (CircleShape(100, 100, 40),))
        em = canny(GrayImage(render_gray(spec)))
        res = detect_one(em, seed=0)
        assert error_score(GroundTruthCircle(100, 100, 40), res.circle) < 1

    def test_levels(self):
        img = render_gray(SceneSpec(50, 50, (PolygonShape(((10, 10), (30, 10), (30, 30), (10, 30))),)))
        assert img.dtype == np.uint8 and img[20, 20] == 200 and img[0, 0] == 40
