import math

import numpy as np
import pytest
from PIL import Image
from scipy import ndimage

from lacircles.edgemap import (
    EdgeMap,
    GrayImage,
    canny,
    load_edge_map,
    load_gray,
    sample_edge_points,
    save_edge_map,
    save_pgm,
)
from lacircles.errors import DimensionError, ImageFormatError, InsufficientDataError


def write_ascii_pgm(path, arr, maxval=255):
    h, w = arr.shape
    body = "\n".join(" ".join(str(int(v)) for v in row) for row in arr)
    path.write_text(f"P2\n# hand written\n{w} {h}\n{maxval}\n{body}\n")


@pytest.fixture
def disk_image():
    yy, xx = np.mgrid[:64, :64]
    return GrayImage(((xx - 32) ** 2 + (yy - 32) ** 2 <= 20**2) * 255)


class TestLoadGray:
    def test_ascii_pgm(self, tmp_path):
        f = tmp_path / "a.pgm"
        write_ascii_pgm(f, np.arange(6).reshape(2, 3))
        img = load_gray(f)
        assert (img.width, img.height) == (3, 2)
        np.testing.assert_array_equal(img.pixels.ravel(), [0, 1, 2, 3, 4, 5])

    def test_binary_pgm_roundtrip(self, tmp_path):
        arr = np.random.default_rng(0).integers(0, 256, (17, 23))
        save_pgm(tmp_path / "b.pgm", arr)
        np.testing.assert_array_equal(load_gray(tmp_path / "b.pgm").pixels, arr)

    def test_png_matches_pgm(self, tmp_path):
        arr = np.random.default_rng(1).integers(0, 256, (12, 9)).astype(np.uint8)
        Image.fromarray(arr, mode="L").save(tmp_path / "x.png")
        save_pgm(tmp_path / "x.pgm", arr)
        np.testing.assert_array_equal(load_gray(tmp_path / "x.png").pixels, load_gray(tmp_path / "x.pgm").pixels)

    def test_color_png_luminance(self, tmp_path):
        rgb = np.zeros((2, 2, 3), dtype=np.uint8)
        rgb[0, 0] = (255, 0, 0)
        rgb[0, 1] = (0, 255, 0)
        rgb[1, 0] = (0, 0, 255)
        rgb[1, 1] = (100, 150, 200)
        Image.fromarray(rgb, mode="RGB").save(tmp_path / "c.png")
        px = load_gray(tmp_path / "c.png").pixels
        expected = [[76, 150], [29, math.floor(0.299 * 100 + 0.587 * 150 + 0.114 * 200 + 0.5)]]
        np.testing.assert_array_equal(px, expected)

    def test_sixteen_bit_pgm(self, tmp_path):
        f = tmp_path / "w.pgm"
        write_ascii_pgm(f, np.array([[0, 256, 65535]]), maxval=65535)
        np.testing.assert_array_equal(load_gray(f).pixels, [[0, 1, 255]])

    def test_sixteen_bit_png(self, tmp_path):
        arr = np.array([[0, 512, 65535]], dtype=np.uint16)
        Image.fromarray(arr).save(tmp_path / "w.png")
        np.testing.assert_array_equal(load_gray(tmp_path / "w.png").pixels, [[0, 2, 255]])

    def test_truncated(self, tmp_path):
        f = tmp_path / "t.pgm"
        f.write_bytes(b"P5\n10 10\n255\n" + bytes(20))
        with pytest.raises(OSError):
            load_gray(f)

    def test_missing(self, tmp_path):
        with pytest.raises(OSError):
            load_gray(tmp_path / "nope.pgm")

    def test_unsupported_format(self, tmp_path):
        f = tmp_path / "x.ppm"
        f.write_bytes(b"P6\n1 1\n255\n\x00\x00\x00")
        with pytest.raises(ImageFormatError, match="P6"):
            load_gray(f)


class TestEdgeMapIO:
    def test_nonzero_rule(self, tmp_path):
        f = tmp_path / "e.pgm"
        write_ascii_pgm(f, np.array([[0, 255], [0, 7]]))
        np.testing.assert_array_equal(load_edge_map(f).bits, [[False, True], [False, True]])

    def test_all_zero(self, tmp_path):
        save_pgm(tmp_path / "z.pgm", np.zeros((5, 5)))
        assert load_edge_map(tmp_path / "z.pgm").edge_count() == 0

    def test_roundtrip(self, tmp_path):
        bits = np.random.default_rng(2).random((30, 40)) < 0.1
        em = EdgeMap(bits)
        save_edge_map(tmp_path / "r.pgm", em)
        assert load_edge_map(tmp_path / "r.pgm") == em
        raw = (tmp_path / "r.pgm").read_bytes()
        assert raw.startswith(b"P5\n40 30\n255\n")
        assert set(raw[len(b"P5\n40 30\n255\n"):]) <= {0, 255}


class TestCanny:
    def test_constant(self):
        assert canny(GrayImage(np.full((32, 32), 128))).edge_count() == 0

    def test_disk_ring(self, disk_image):
        em = canny(disk_image, 1.0, 0.1, 0.3)
        ys, xs = np.nonzero(em.bits)
        d = np.hypot(xs - 32, ys - 32)
        assert len(d) > 100
        assert d.min() >= 18 and d.max() <= 22
        # closed: one 8-connected component enclosing the center
        _, n = ndimage.label(em.bits, structure=np.ones((3, 3)))
        assert n == 1
        inside, _ = ndimage.label(~em.bits)
        assert inside[32, 32] != inside[0, 0]

    def test_vertical_step(self):
        img = GrayImage(np.tile(np.r_[np.zeros(32), np.full(32, 255)], (64, 1)))
        em = canny(img)
        rows = em.bits[4:-4]
        assert np.all(rows.sum(axis=1) == 1)
        assert len(set(np.argmax(rows, axis=1))) == 1

    def test_subset_of_low_threshold(self, disk_image):
        from lacircles.edgemap import _SOBEL_X, _SOBEL_Y

        em = canny(disk_image, 1.0, 0.2, 0.4)
        smooth = ndimage.gaussian_filter(disk_image.pixels.astype(float), 1.0, mode="nearest", truncate=4.0)
        mag = np.hypot(
            ndimage.correlate(smooth, _SOBEL_X, mode="nearest"),
            ndimage.correlate(smooth, _SOBEL_Y, mode="nearest"),
        )
        assert np.all(mag[em.bits] >= 0.2 * mag.max())

    def test_too_small(self):
        with pytest.raises(DimensionError):
            canny(GrayImage(np.zeros((5, 5))), sigma=1.0)

    @pytest.mark.parametrize("low,high", [(0.3, 0.1), (-0.1, 0.5), (0.2, 1.5)])
    def test_bad_thresholds(self, disk_image, low, high):
        with pytest.raises(ValueError):
            canny(disk_image, 1.0, low, high)

    def test_deterministic(self, disk_image):
        assert canny(disk_image) == canny(disk_image)


class TestSampleEdgePoints:
    @pytest.fixture
    def hundred(self):
        bits = np.zeros((50, 50), dtype=bool)
        idx = np.random.default_rng(5).choice(2500, 100, replace=False)
        bits.ravel()[idx] = True
        return EdgeMap(bits)

    def test_five_percent(self, hundred):
        pts = sample_edge_points(hundred, 0.05, 3, seed=1)
        assert len(pts) == 5
        assert len({tuple(p) for p in pts}) == 5
        assert hundred.bits[pts[:, 1], pts[:, 0]].all()

    def test_floor(self, hundred):
        assert len(sample_edge_points(hundred, 0.05, 30, seed=1)) == 30

    def test_exhaustive(self, hundred):
        pts = sample_edge_points(hundred, 1.0, 3, seed=4)
        assert {tuple(p) for p in pts} == {tuple(p) for p in hundred.edge_points()}

    def test_cap_at_total(self, hundred):
        assert len(sample_edge_points(hundred, 0.05, 500, seed=0)) == 100

    def test_deterministic(self, hundred):
        np.testing.assert_array_equal(sample_edge_points(hundred, seed=9), sample_edge_points(hundred, seed=9))

    def test_insufficient(self):
        bits = np.zeros((10, 10), dtype=bool)
        bits[2, 3] = bits[5, 5] = True
        with pytest.raises(InsufficientDataError):
            sample_edge_points(EdgeMap(bits))
