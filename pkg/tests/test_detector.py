import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import ndimage

from lgpca.boxes import BoundingBox
from lgpca.detector import (
    BackgroundSubtractor,
    DetectorParams,
    detect,
    foreground_mask,
    update_background,
)
from lgpca.errors import DimensionMismatch, InvalidThreshold
from lgpca.frameio import GrayFrame
from oracles import flood_fill_components


def square_frame(shape, squares):
    img = np.zeros(shape)
    for x, y, w, h in squares:
        img[y:y + h, x:x + w] = 1.0
    return img


def test_update_background_examples(rng):
    frame = rng.random((5, 5))
    bg = rng.random((5, 5))
    assert np.array_equal(update_background(bg, frame, 1.0).pixels, frame)
    assert np.array_equal(update_background(bg, bg, 0.3).pixels, bg)
    b = GrayFrame(np.zeros((3, 3)))
    for _ in range(3):
        b = update_background(b, np.ones((3, 3)), 0.05)
    np.testing.assert_allclose(b.pixels, 1 - 0.95 ** 3)
    np.testing.assert_allclose(b.pixels, 0.142625, atol=1e-12)
    with pytest.raises(DimensionMismatch):
        update_background(np.zeros((2, 2)), np.zeros((3, 3)), 0.5)


def test_identical_frame_no_detections(rng):
    f = rng.random((30, 30))
    assert detect(f, f, 0.12, 1) == []


def test_single_square():
    img = square_frame((40, 40), [(5, 5, 20, 20)])
    (d,) = detect(img, np.zeros((40, 40)), 0.5, 10)
    assert d.box == BoundingBox(5, 5, 20, 20)
    assert d.area == 400
    assert d.centroid == pytest.approx((14.5, 14.5))


def test_two_squares_match_flood_fill():
    img = square_frame((40, 60), [(3, 4, 10, 10), (15, 20, 10, 10)])
    dets = detect(img, np.zeros_like(img), 0.5, 10)
    comps = flood_fill_components(foreground_mask(img, np.zeros_like(img), 0.5))
    assert len(dets) == len(comps) == 2
    for det, comp in zip(dets, sorted(comps, key=lambda c: min(c))):
        ys = [p[0] for p in comp]
        xs = [p[1] for p in comp]
        assert det.area == len(comp)
        assert det.box == BoundingBox(min(xs), min(ys), max(xs) - min(xs) + 1, max(ys) - min(ys) + 1)
        assert det.centroid == pytest.approx((np.mean(xs), np.mean(ys)))


def test_opening_removes_speckle_and_min_area():
    img = square_frame((30, 30), [(2, 2, 12, 12)])
    img[25, 25] = 1.0  # isolated pixel: removed by the opening
    img[20:22, 3:9] = 1.0  # 2-pixel-thin bar: also removed
    dets = detect(img, np.zeros_like(img), 0.5, 1)
    assert [d.box for d in dets] == [BoundingBox(2, 2, 12, 12)]
    assert detect(img, np.zeros_like(img), 0.5, 145) == []


def test_border_component_keeps_extent():
    img = square_frame((20, 20), [(0, 0, 6, 5), (14, 15, 6, 5)])
    dets = detect(img, np.zeros_like(img), 0.5, 1)
    assert [d.box for d in dets] == [BoundingBox(0, 0, 6, 5), BoundingBox(14, 15, 6, 5)]
    assert all(d.box.within(20, 20) for d in dets)


@settings(max_examples=30, deadline=None)
@given(dx=st.integers(-8, 8), dy=st.integers(-8, 8))
def test_translation_covariance(dx, dy):
    base = [(15, 15, 7, 9), (28, 12, 5, 5)]
    a = detect(square_frame((50, 50), base), np.zeros((50, 50)), 0.5, 4)
    moved = [(x + dx, y + dy, w, h) for x, y, w, h in base]
    b = detect(square_frame((50, 50), moved), np.zeros((50, 50)), 0.5, 4)
    key = lambda d: (d.box.x, d.box.y)
    for da, db in zip(sorted(a, key=key), sorted(b, key=key)):
        assert (db.box.x - da.box.x, db.box.y - da.box.y) == (dx, dy)
        assert db.centroid == pytest.approx((da.centroid[0] + dx, da.centroid[1] + dy))
        assert db.area == da.area


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_random_masks_against_oracle(seed):
    rng = np.random.default_rng(seed)
    img = (ndimage.uniform_filter(rng.random((24, 24)), 3) > 0.55).astype(float)
    dets = detect(img, np.zeros_like(img), 0.5, 1)
    comps = flood_fill_components(foreground_mask(img, np.zeros_like(img), 0.5))
    assert sorted(d.area for d in dets) == sorted(len(c) for c in comps)
    assert dets == sorted(dets, key=lambda d: (d.box.y, d.box.x, d.box.h, d.box.w, d.area))
    for d in dets:
        assert 0 < d.area <= d.box.area
        assert d.box.x <= d.centroid[0] <= d.box.x + d.box.w - 1
        assert d.box.y <= d.centroid[1] <= d.box.y + d.box.h - 1


def test_invalid_threshold():
    with pytest.raises(InvalidThreshold):
        detect(np.zeros((4, 4)), np.zeros((4, 4)), 1.5, 1)
    with pytest.raises(InvalidThreshold):
        detect(np.zeros((4, 4)), np.zeros((4, 4)), 0.0, 1)


def test_background_subtractor_seeds_on_first_frame():
    sub = BackgroundSubtractor(DetectorParams(diff_threshold=0.3, min_area=4, alpha=0.02))
    empty = np.full((20, 20), 0.2)
    assert sub.apply(empty) == []
    moving = empty.copy()
    moving[5:10, 5:10] = 0.9
    (d,) = sub.apply(moving)
    assert d.box == BoundingBox(5, 5, 5, 5)
