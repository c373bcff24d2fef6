"""Track identities across frames from detection centroids and areas.

Association is greedy: all (track, detection) pairs that pass the centroid
gate and the area-ratio gate are sorted by centroid distance and accepted
while both sides are still free. This is not guaranteed to minimise the
total distance; see the tests for how far it can be from the optimum.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Sequence

from .detector import Detection
from .errors import EmptyLabel, InvalidParams


@dataclass(frozen=True)
class TrackerParams:
    gate_radius: float = 40.0
    area_ratio_max: float = 2.0
    max_misses: int = 5

    def validate(self) -> None:
        if not self.gate_radius > 0:
            raise InvalidParams(f"gate_radius must be positive, got {self.gate_radius}")
        if not self.area_ratio_max >= 1:
            raise InvalidParams(f"area_ratio_max must be >= 1, got {self.area_ratio_max}")
        if self.max_misses < 0:
            raise InvalidParams(f"max_misses must be >= 0, got {self.max_misses}")


@dataclass(frozen=True)
class Track:
    id: int
    centroid: tuple[float, float]
    area: int
    age: int = 1
    misses: int = 0
    # insertion order doubles as first-vote order for tie breaking
    label_votes: dict[str, int] = field(default_factory=dict)

    @property
    def label(self) -> str | None:
        """Majority label; ties go to the label voted for first."""
        best, best_count = None, 0
        for label, count in self.label_votes.items():
            if count > best_count:
                best, best_count = label, count
        return best


@dataclass(frozen=True)
class Association:
    tracks: list[Track]
    assignment: dict[int, int]  # detection index -> track id
    next_id: int


def pair_cost(track: Track, det: Detection, params: TrackerParams) -> float:
    dist = math.dist(track.centroid, det.centroid)
    if dist > params.gate_radius:
        return math.inf
    lo, hi = sorted((track.area, det.area))
    if lo <= 0 or hi / lo > params.area_ratio_max:
        return math.inf
    return dist


def greedy_match(costs: Sequence[Sequence[float]]) -> list[tuple[int, int]]:
    """Accept finite-cost (row, col) pairs in ascending cost order, one per row and column.

    Equal costs are resolved by (row, col) order.
    """
    pairs = sorted(
        (c, i, j) for i, row in enumerate(costs) for j, c in enumerate(row) if math.isfinite(c)
    )
    used_rows, used_cols, out = set(), set(), []
    for _, i, j in pairs:
        if i in used_rows or j in used_cols:
            continue
        used_rows.add(i)
        used_cols.add(j)
        out.append((i, j))
    return out


def associate(tracks: Sequence[Track], detections: Sequence[Detection], params: TrackerParams,
              next_id: int | None = None) -> Association:
    """Match detections to tracks, spawn tracks for leftovers, age out stale tracks.

    ``next_id`` is the first id handed to a new track; it defaults to one past
    the largest live id, which only guarantees uniqueness when no track has
    been dropped earlier. :class:`Tracker` keeps the counter across frames.
    """
    if next_id is None:
        next_id = max((t.id for t in tracks), default=-1) + 1
    costs = [[pair_cost(t, d, params) for d in detections] for t in tracks]
    matches = dict(greedy_match(costs))

    updated, assignment = [], {}
    for ti, track in enumerate(tracks):
        if ti in matches:
            det = detections[matches[ti]]
            assignment[matches[ti]] = track.id
            updated.append(replace(track, centroid=det.centroid, area=det.area,
                                   age=track.age + 1, misses=0))
        elif track.misses + 1 <= params.max_misses:
            updated.append(replace(track, age=track.age + 1, misses=track.misses + 1))
    for di, det in enumerate(detections):
        if di not in assignment:
            assignment[di] = next_id
            updated.append(Track(next_id, det.centroid, det.area))
            next_id += 1
    return Association(updated, dict(sorted(assignment.items())), next_id)


def vote_label(track: Track, label: str) -> Track:
    if not label:
        raise EmptyLabel("cannot vote for an empty label")
    votes = dict(track.label_votes)
    votes[label] = votes.get(label, 0) + 1
    return replace(track, label_votes=votes)


class Tracker:
    """Stateful wrapper that owns the live tracks and the id counter."""

    def __init__(self, params: TrackerParams | None = None):
        self.params = params or TrackerParams()
        self.params.validate()
        self.tracks: list[Track] = []
        self.next_id = 0

    def update(self, detections: Sequence[Detection]) -> dict[int, int]:
        result = associate(self.tracks, detections, self.params, self.next_id)
        self.tracks = result.tracks
        self.next_id = result.next_id
        return result.assignment

    def get(self, track_id: int) -> Track:
        for t in self.tracks:
            if t.id == track_id:
                return t
        raise KeyError(track_id)

    def vote(self, track_id: int, label: str) -> Track:
        for i, t in enumerate(self.tracks):
            if t.id == track_id:
                self.tracks[i] = vote_label(t, label)
                return self.tracks[i]
        raise KeyError(track_id)
