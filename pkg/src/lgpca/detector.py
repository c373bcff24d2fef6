"""Moving-object detection by running-average background subtraction.

Stand-in for a tensor-subspace detector: only its output contract (box,
centroid, area per moving object) matters downstream. The foreground mask
is ``|frame - background| > diff_threshold``, cleaned by one 3x3 opening,
split into 8-connected components, and filtered by area.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .boxes import BoundingBox
from .errors import DimensionMismatch, InvalidParams, InvalidThreshold
from .frameio import GrayFrame

EIGHT_NEIGHBORS = np.ones((3, 3), dtype=bool)


@dataclass(frozen=True)
class Detection:
    box: BoundingBox
    centroid: tuple[float, float]  # (cx, cy)
    area: int


@dataclass(frozen=True)
class DetectorParams:
    diff_threshold: float = 0.12
    min_area: int = 60
    alpha: float = 0.02

    def validate(self) -> None:
        if not 0.0 < self.diff_threshold < 1.0:
            raise InvalidThreshold(f"diff_threshold must lie in (0, 1), got {self.diff_threshold}")
        if not 0.0 < self.alpha <= 1.0:
            raise InvalidParams(f"alpha must lie in (0, 1], got {self.alpha}")
        if self.min_area < 1:
            raise InvalidParams(f"min_area must be >= 1, got {self.min_area}")


def _pixels(frame) -> np.ndarray:
    return frame.pixels if isinstance(frame, GrayFrame) else np.asarray(frame, dtype=np.float64)


def update_background(bg, frame, alpha: float) -> GrayFrame:
    b, f = _pixels(bg), _pixels(frame)
    if b.shape != f.shape:
        raise DimensionMismatch(f"background {b.shape} vs frame {f.shape}")
    if not 0.0 < alpha <= 1.0:
        raise InvalidParams(f"alpha must lie in (0, 1], got {alpha}")
    if alpha == 1.0:
        return GrayFrame(f)
    # b + alpha (f - b) leaves b bit-exact where f == b
    return GrayFrame(np.clip(b + alpha * (f - b), 0.0, 1.0))


def foreground_mask(frame, bg, diff_threshold: float) -> np.ndarray:
    """Thresholded difference after one 3x3 opening (erosion then dilation)."""
    f, b = _pixels(frame), _pixels(bg)
    if f.shape != b.shape:
        raise DimensionMismatch(f"frame {f.shape} vs background {b.shape}")
    if not 0.0 < diff_threshold < 1.0:
        raise InvalidThreshold(f"diff_threshold must lie in (0, 1), got {diff_threshold}")
    mask = np.abs(f - b) > diff_threshold
    return ndimage.binary_opening(mask, structure=EIGHT_NEIGHBORS)


def detect(frame, bg, diff_threshold: float = 0.12, min_area: int = 60) -> list[Detection]:
    """Connected foreground blobs, sorted by the (y, x) of their boxes."""
    mask = foreground_mask(frame, bg, diff_threshold)
    labels, count = ndimage.label(mask, structure=EIGHT_NEIGHBORS)
    detections = []
    for idx, slc in enumerate(ndimage.find_objects(labels), start=1):
        if slc is None:
            continue
        ys, xs = np.nonzero(labels[slc] == idx)
        area = len(xs)
        if area < min_area:
            continue
        y0, x0 = slc[0].start, slc[1].start
        box = BoundingBox(x0, y0, slc[1].stop - x0, slc[0].stop - y0)
        centroid = (float(xs.mean() + x0), float(ys.mean() + y0))
        detections.append(Detection(box, centroid, int(area)))
    detections.sort(key=lambda d: (d.box.y, d.box.x, d.box.h, d.box.w, d.area))
    return detections


class BackgroundSubtractor:
    """Running-average background model; the first frame seeds the background.

    Each call to :meth:`apply` first blends the frame into the background and
    then detects against the updated background.
    """

    def __init__(self, params: DetectorParams | None = None):
        self.params = params or DetectorParams()
        self.params.validate()
        self.background: GrayFrame | None = None

    def apply(self, frame) -> list[Detection]:
        frame = frame if isinstance(frame, GrayFrame) else GrayFrame(frame)
        if self.background is None:
            self.background = frame
        else:
            self.background = update_background(self.background, frame, self.params.alpha)
        return detect(frame, self.background, self.params.diff_threshold, self.params.min_area)
