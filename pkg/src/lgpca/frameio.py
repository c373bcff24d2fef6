"""Reading frames and training crops, writing annotated frames and JSONL results."""
from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
from PIL import Image

from .boxes import BoundingBox
from .errors import (
    BoxOutOfBounds,
    DimensionZero,
    EmptyDirectory,
    InconsistentDimensions,
    NumberingGap,
    ParseError,
    UnreadableFile,
    UnsupportedFormat,
)

PNG_SIGNATURE = b"\x89PNG\r\n\x1a\n"
FRAME_PATTERN = re.compile(r"^frame_(\d{6})\.(pgm|png)$")
IMAGE_SUFFIXES = (".pgm", ".png")


@dataclass(frozen=True)
class GrayFrame:
    """Grayscale image with intensities in [0, 1], stored as a (height, width) float64 array."""

    pixels: np.ndarray

    def __post_init__(self):
        px = np.array(self.pixels, dtype=np.float64)
        if px.ndim != 2:
            raise ValueError(f"expected a 2-D pixel array, got shape {px.shape}")
        if px.shape[0] == 0 or px.shape[1] == 0:
            raise DimensionZero(f"frame has zero size {px.shape}")
        if not np.all(np.isfinite(px)) or px.min() < 0.0 or px.max() > 1.0:
            raise ValueError("intensities must lie in [0, 1]")
        px.setflags(write=False)
        object.__setattr__(self, "pixels", px)

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @classmethod
    def from_uint8(cls, data: np.ndarray) -> GrayFrame:
        return cls(np.asarray(data, dtype=np.float64) / 255.0)

    def to_uint8(self) -> np.ndarray:
        return np.rint(self.pixels * 255.0).astype(np.uint8)


@dataclass
class FrameSequence:
    frames: list[GrayFrame]
    source_id: str = ""
    frame_rate_hint: float | None = None
    paths: list[Path] = field(default_factory=list, repr=False)

    def __post_init__(self):
        shapes = {f.pixels.shape for f in self.frames}
        if len(shapes) > 1:
            raise InconsistentDimensions(f"frames have mixed sizes: {sorted(shapes)}")

    def __len__(self) -> int:
        return len(self.frames)

    def __iter__(self):
        return iter(self.frames)

    def __getitem__(self, i):
        return self.frames[i]


# -- reading -----------------------------------------------------------------

def _read_pgm(data: bytes, path) -> np.ndarray:
    # header: magic, width, height, maxval separated by whitespace, '#' comments allowed
    tokens = []
    pos = 2
    n = len(data)
    while len(tokens) < 3:
        while pos < n and data[pos:pos + 1].isspace():
            pos += 1
        if pos < n and data[pos:pos + 1] == b"#":
            while pos < n and data[pos:pos + 1] not in (b"\n", b"\r"):
                pos += 1
            continue
        start = pos
        while pos < n and not data[pos:pos + 1].isspace() and data[pos:pos + 1] != b"#":
            pos += 1
        if start == pos:
            raise UnreadableFile(f"{path}: truncated PGM header")
        tokens.append(data[start:pos])
    # exactly one whitespace byte separates maxval from the raster
    if pos >= n or not data[pos:pos + 1].isspace():
        raise UnreadableFile(f"{path}: truncated PGM header")
    pos += 1
    try:
        width, height, maxval = (int(t) for t in tokens)
    except ValueError:
        raise UnreadableFile(f"{path}: malformed PGM header") from None
    if width == 0 or height == 0:
        raise DimensionZero(f"{path}: image is {width}x{height}")
    if maxval != 255:
        raise UnsupportedFormat(f"{path}: only maxval 255 is supported, got {maxval}")
    raster = data[pos:pos + width * height]
    if len(raster) < width * height:
        raise UnreadableFile(f"{path}: truncated PGM raster")
    return np.frombuffer(raster, dtype=np.uint8).reshape(height, width)


def _read_png(path) -> np.ndarray:
    try:
        with Image.open(path) as im:
            im.load()
            mode = im.mode
            arr = np.asarray(im)
    except (OSError, SyntaxError) as exc:
        raise UnreadableFile(f"{path}: {exc}") from exc
    if arr.size == 0:
        raise DimensionZero(f"{path}: empty image")
    if mode == "L":
        return arr.astype(np.float64)
    if mode == "LA":
        return arr[..., 0].astype(np.float64)
    if mode in ("RGB", "RGBA"):
        rgb = arr[..., :3].astype(np.float64)
        return 0.299 * rgb[..., 0] + 0.587 * rgb[..., 1] + 0.114 * rgb[..., 2]
    raise UnsupportedFormat(f"{path}: PNG mode {mode!r} is not 8-bit grayscale or RGB")


def load_frame(path) -> GrayFrame:
    """Load a binary PGM (P5, maxval 255) or 8-bit PNG as a GrayFrame.

    RGB input is collapsed to luma with weights 0.299, 0.587, 0.114.
    """
    path = Path(path)
    try:
        data = path.read_bytes()
    except OSError as exc:
        raise UnreadableFile(f"{path}: {exc}") from exc
    if data[:2] == b"P5":
        counts = _read_pgm(data, path).astype(np.float64)
    elif data[:8] == PNG_SIGNATURE:
        counts = _read_png(path)
    else:
        raise UnsupportedFormat(f"{path}: not a binary PGM or PNG file")
    return GrayFrame(np.clip(counts / 255.0, 0.0, 1.0))


def load_sequence(directory) -> FrameSequence:
    """Load ``frame_%06d.pgm|png`` files, which must be numbered 0..N-1 without gaps."""
    directory = Path(directory)
    if not directory.is_dir():
        raise UnreadableFile(f"{directory}: not a directory")
    indexed = {}
    for p in directory.iterdir():
        m = FRAME_PATTERN.match(p.name)
        if not m:
            continue
        idx = int(m.group(1))
        if idx in indexed:
            raise NumberingGap(f"{directory}: frame index {idx} appears twice")
        indexed[idx] = p
    if not indexed:
        raise EmptyDirectory(f"{directory}: no frame_%06d.pgm|png files")
    order = sorted(indexed)
    if order != list(range(len(order))):
        missing = next(i for i, j in enumerate(order) if i != j)
        raise NumberingGap(f"{directory}: frame {missing:06d} is missing")
    paths = [indexed[i] for i in order]
    frames = [load_frame(p) for p in paths]
    return FrameSequence(frames, source_id=directory.name, paths=paths)


def load_training_set(directory) -> dict[str, list[GrayFrame]]:
    """Load ``<class_name>/<crop>.pgm|png`` crops.

    ``directory`` may be the class root itself or a folder holding ``train/``.
    Classes and crops are returned in sorted filename order.
    """
    root = Path(directory)
    if (root / "train").is_dir():
        root = root / "train"
    if not root.is_dir():
        raise UnreadableFile(f"{root}: not a directory")
    classes = {}
    for class_dir in sorted(p for p in root.iterdir() if p.is_dir()):
        crops = sorted(p for p in class_dir.iterdir() if p.suffix.lower() in IMAGE_SUFFIXES)
        if not crops:
            raise EmptyDirectory(f"{class_dir}: class directory holds no crops")
        classes[class_dir.name] = [load_frame(p) for p in crops]
    if not classes:
        raise EmptyDirectory(f"{root}: no class directories")
    return classes


# -- writing -----------------------------------------------------------------

def save_pgm(frame: GrayFrame, path) -> None:
    """Write a binary PGM, quantizing by round(p * 255)."""
    data = frame.to_uint8()
    header = f"P5\n{frame.width} {frame.height}\n255\n".encode("ascii")
    Path(path).write_bytes(header + data.tobytes())


def write_annotated(frame: GrayFrame, boxes: Sequence[tuple[BoundingBox, str | None]]) -> GrayFrame:
    """Return a copy of ``frame`` with a 1-pixel border of intensity 1.0 on each box.

    The border lies on the box's own outermost rows and columns. Labels are not
    rasterized; they belong in the JSONL sidecar.
    """
    out = np.array(frame.pixels)
    for box, _label in boxes:
        if not box.within(frame.width, frame.height):
            raise BoxOutOfBounds(f"{box} exceeds {frame.width}x{frame.height} frame")
        x0, y0 = box.x, box.y
        x1, y1 = box.x + box.w - 1, box.y + box.h - 1
        out[y0, x0:x1 + 1] = 1.0
        out[y1, x0:x1 + 1] = 1.0
        out[y0:y1 + 1, x0] = 1.0
        out[y0:y1 + 1, x1] = 1.0
    return GrayFrame(out)


def detection_record(box: BoundingBox, centroid, area: int, track_id: int,
                     label: str | None, angle_distance: float | None) -> dict:
    return {
        "box": box.as_list(),
        "centroid": [float(centroid[0]), float(centroid[1])],
        "area": int(area),
        "track_id": int(track_id),
        "label": label,
        "angle_distance": None if angle_distance is None else float(angle_distance),
    }


def write_jsonl(records: Iterable[dict], path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for rec in records:
            fh.write(json.dumps(rec, ensure_ascii=False))
            fh.write("\n")


def read_jsonl(path) -> list[dict]:
    out = []
    try:
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, 1):
                if not line.strip():
                    continue
                try:
                    out.append(json.loads(line))
                except json.JSONDecodeError as exc:
                    raise ParseError(f"{path}:{lineno}: {exc}") from exc
    except OSError as exc:
        raise UnreadableFile(f"{path}: {exc}") from exc
    return out


def resize_bilinear(image: np.ndarray, height: int, width: int) -> np.ndarray:
    """Bilinear resize using pixel-center alignment and edge clamping."""
    img = np.asarray(image, dtype=np.float64)
    in_h, in_w = img.shape
    if (in_h, in_w) == (height, width):
        return img.copy()

    def axis(n_in, n_out):
        pos = (np.arange(n_out) + 0.5) * (n_in / n_out) - 0.5
        pos = np.clip(pos, 0.0, n_in - 1)
        lo = np.floor(pos).astype(np.intp)
        hi = np.minimum(lo + 1, n_in - 1)
        return lo, hi, pos - lo

    y0, y1, wy = axis(in_h, height)
    x0, x1, wx = axis(in_w, width)
    top = img[y0][:, x0] * (1 - wx) + img[y0][:, x1] * wx
    bottom = img[y1][:, x0] * (1 - wx) + img[y1][:, x1] * wx
    return top * (1 - wy)[:, None] + bottom * wy[:, None]
