from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class BoundingBox:
    """Axis-aligned pixel box; covers columns x..x+w-1 and rows y..y+h-1."""

    x: int
    y: int
    w: int
    h: int

    def __post_init__(self):
        if self.w < 1 or self.h < 1:
            raise ValueError(f"box must have w, h >= 1, got {self.w}x{self.h}")

    @property
    def area(self) -> int:
        return self.w * self.h

    def within(self, width: int, height: int) -> bool:
        return (self.x >= 0 and self.y >= 0
                and self.x + self.w <= width and self.y + self.h <= height)

    def padded(self, frac: float, width: int, height: int) -> BoundingBox:
        """Grow by ``frac`` of the box size on every side, clipped to the frame."""
        px = int(round(frac * self.w))
        py = int(round(frac * self.h))
        x0 = max(0, self.x - px)
        y0 = max(0, self.y - py)
        x1 = min(width, self.x + self.w + px)
        y1 = min(height, self.y + self.h + py)
        return BoundingBox(x0, y0, x1 - x0, y1 - y0)

    def as_list(self) -> list[int]:
        return [self.x, self.y, self.w, self.h]


def iou(a: BoundingBox, b: BoundingBox) -> float:
    ix = min(a.x + a.w, b.x + b.w) - max(a.x, b.x)
    iy = min(a.y + a.h, b.y + b.h) - max(a.y, b.y)
    if ix <= 0 or iy <= 0:
        return 0.0
    inter = ix * iy
    return inter / (a.area + b.area - inter)
