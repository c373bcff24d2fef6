"""Seeded synthetic surveillance scenes with known ground truth.

Textured sprites (a checkerboard "vehicle", a vertically striped "human")
translate over a mid-gray background with Gaussian pixel noise. Sprite
textures are zero-mean around the background level, so the running-average
background does not absorb them into ghost blobs. Each scenario also
produces training crops rendered the way the recognizer crops detections.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .boxes import BoundingBox
from .config import PipelineConfig
from .errors import UnknownScenario
from .evaluation import GroundTruthObject
from .frameio import GrayFrame, resize_bilinear, save_pgm

BACKGROUND_LEVEL = 0.5
NOISE_SIGMA = 0.02
FRAME_WIDTH, FRAME_HEIGHT = 160, 120
TRAIN_CROPS_PER_CLASS = 40
KEYFRAME_STEP = 5

SPRITE_SIZE = {"vehicle": (40, 24), "human": (16, 36)}  # (w, h)


@dataclass(frozen=True)
class SpriteTrack:
    label: str
    start: int
    end: int  # inclusive
    x0: float
    y0: float
    vx: float
    vy: float = 0.0

    def box_at(self, frame: int) -> BoundingBox:
        w, h = SPRITE_SIZE[self.label]
        t = frame - self.start
        return BoundingBox(int(round(self.x0 + self.vx * t)), int(round(self.y0 + self.vy * t)), w, h)

    def visible(self, frame: int) -> bool:
        return self.start <= frame <= self.end


@dataclass(frozen=True)
class Scenario:
    name: str
    num_frames: int
    contrast: float
    objects: tuple[SpriteTrack, ...]


_BASIC_OBJECTS = (
    SpriteTrack("vehicle", 3, 57, 5, 10, 2.0),
    SpriteTrack("human", 10, 80, 20, 70, 1.5),
    SpriteTrack("vehicle", 70, 140, 115, 12, -1.5),
    SpriteTrack("human", 90, 145, 130, 72, -2.0),
)

SCENARIOS = {
    "two_class_basic": Scenario("two_class_basic", 150, 0.35, _BASIC_OBJECTS),
    "three_object": Scenario("three_object", 120, 0.35, (
        SpriteTrack("vehicle", 4, 60, 5, 8, 2.0),
        SpriteTrack("human", 8, 100, 10, 72, 1.4),
        SpriteTrack("vehicle", 50, 115, 110, 40, -1.5),
    )),
    "low_contrast": Scenario("low_contrast", 150, 0.13, _BASIC_OBJECTS),
}


def sprite_texture(label: str, contrast: float) -> np.ndarray:
    """Zero-mean +-contrast texture of the sprite's size."""
    w, h = SPRITE_SIZE[label]
    yy, xx = np.mgrid[0:h, 0:w]
    if label == "vehicle":
        pattern = (xx // 4 + yy // 4) % 2
    elif label == "human":
        pattern = (xx // 2) % 2
    else:
        raise UnknownScenario(f"no texture for label {label!r}")
    return np.where(pattern == 1, contrast, -contrast)


def _noisy_background(rng, height, width) -> np.ndarray:
    return BACKGROUND_LEVEL + rng.normal(0.0, NOISE_SIGMA, size=(height, width))


def render_frame(scenario: Scenario, index: int, rng) -> np.ndarray:
    img = _noisy_background(rng, FRAME_HEIGHT, FRAME_WIDTH)
    for obj in scenario.objects:
        if obj.visible(index):
            b = obj.box_at(index)
            img[b.y:b.y + b.h, b.x:b.x + b.w] += sprite_texture(obj.label, scenario.contrast)
    return np.clip(img, 0.0, 1.0)


def render_training_crop(label: str, contrast: float, config: PipelineConfig, rng) -> np.ndarray:
    """Sprite on fresh noise with the recognizer's box padding, resized to the crop size."""
    w, h = SPRITE_SIZE[label]
    px, py = int(round(config.box_pad * w)), int(round(config.box_pad * h))
    canvas = _noisy_background(rng, h + 2 * py, w + 2 * px)
    gain = contrast * rng.uniform(0.9, 1.1)
    canvas[py:py + h, px:px + w] += sprite_texture(label, gain)
    crop = resize_bilinear(np.clip(canvas, 0.0, 1.0), config.crop_size, config.crop_size)
    return np.clip(crop, 0.0, 1.0)


def ground_truth(scenario: Scenario) -> list[GroundTruthObject]:
    out = []
    for i, obj in enumerate(scenario.objects):
        frames = list(range(obj.start, obj.end + 1, KEYFRAME_STEP))
        out.append(GroundTruthObject(f"obj{i}", obj.label, {f: obj.box_at(f) for f in frames}))
    return out


def generate(config: PipelineConfig, out_dir, scenario: str) -> Path:
    """Write ``train/<class>/``, ``sequence/`` and ``truth.jsonl`` under ``out_dir``."""
    if scenario not in SCENARIOS:
        raise UnknownScenario(f"unknown scenario {scenario!r}; choose from {sorted(SCENARIOS)}")
    sc = SCENARIOS[scenario]
    out = Path(out_dir)
    rng = np.random.default_rng([config.seed, sorted(SCENARIOS).index(scenario)])

    labels = sorted({o.label for o in sc.objects})
    for label in labels:
        class_dir = out / "train" / label
        class_dir.mkdir(parents=True, exist_ok=True)
        for i in range(TRAIN_CROPS_PER_CLASS):
            crop = render_training_crop(label, sc.contrast, config, rng)
            save_pgm(GrayFrame(crop), class_dir / f"crop_{i:03d}.pgm")

    seq_dir = out / "sequence"
    seq_dir.mkdir(parents=True, exist_ok=True)
    for i in range(sc.num_frames):
        save_pgm(GrayFrame(render_frame(sc, i, rng)), seq_dir / f"frame_{i:06d}.pgm")

    with open(out / "truth.jsonl", "w", encoding="utf-8", newline="\n") as fh:
        for obj in ground_truth(sc):
            fh.write(json.dumps(obj.to_json()) + "\n")
    return out
