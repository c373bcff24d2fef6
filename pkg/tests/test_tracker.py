import math

import numpy as np
import pytest

from lgpca.boxes import BoundingBox
from lgpca.detector import Detection
from lgpca.errors import EmptyLabel
from lgpca.tracker import Track, Tracker, TrackerParams, associate, greedy_match, vote_label
from oracles import optimal_assignment

PARAMS = TrackerParams(gate_radius=20, area_ratio_max=1.5, max_misses=2)


def det(cx, cy, area):
    return Detection(BoundingBox(int(cx), int(cy), 1, 1), (float(cx), float(cy)), area)


def test_single_match_keeps_id():
    res = associate([Track(7, (10.0, 10.0), 400)], [det(12, 10, 398)], PARAMS, next_id=8)
    assert res.assignment == {0: 7}
    (t,) = res.tracks
    assert t.id == 7 and t.centroid == (12.0, 10.0) and t.area == 398 and t.age == 2


def test_gated_out_spawns_new_track():
    res = associate([Track(0, (10.0, 10.0), 400)], [det(60, 10, 400)], PARAMS, next_id=1)
    assert res.assignment == {0: 1}
    old, new = res.tracks
    assert old.id == 0 and old.misses == 1
    assert new.id == 1 and new.age == 1 and res.next_id == 2


def test_area_gate():
    res = associate([Track(0, (10.0, 10.0), 100)], [det(11, 10, 200)], PARAMS, next_id=1)
    assert res.assignment == {0: 1}


def test_two_by_two_example_matches_oracle():
    tracks = [Track(0, (0.0, 0.0), 100), Track(1, (10.0, 0.0), 100)]
    dets = [det(1, 0, 100), det(9, 0, 100)]
    res = associate(tracks, dets, PARAMS, next_id=2)
    assert res.assignment == {0: 0, 1: 1}
    costs = [[math.dist(t.centroid, d.centroid) for d in dets] for t in tracks]
    pairs, total = optimal_assignment(costs)
    assert sorted(pairs) == [(0, 0), (1, 1)] and total == pytest.approx(2.0)


def test_greedy_is_not_always_optimal():
    # greedy takes the cheapest pair (0,0) and is forced into the expensive (1,1)
    costs = [[0.9, 1.0], [1.1, 2.9]]
    g = greedy_match(costs)
    assert sorted(g) == [(0, 0), (1, 1)]
    _, best = optimal_assignment(costs)
    assert best == pytest.approx(2.1)
    assert sum(costs[i][j] for i, j in g) == pytest.approx(3.8)


def test_misses_and_dropping():
    tr = Tracker(PARAMS)
    tr.update([det(5, 5, 50)])
    for expected in (1, 2):
        tr.update([])
        assert tr.tracks[0].misses == expected
    tr.update([])
    assert tr.tracks == []
    tr.update([det(5, 5, 50)])
    assert tr.tracks[0].id == 1  # ids are never reused


def test_one_to_one_and_unique_ids(rng):
    tr = Tracker(TrackerParams(gate_radius=30, area_ratio_max=3.0, max_misses=1))
    seen = set()
    for _ in range(60):
        dets = [det(*rng.uniform(0, 80, 2), int(rng.integers(40, 100)))
                for _ in range(rng.integers(0, 5))]
        before = {t.id for t in tr.tracks}
        assign = tr.update(dets)
        assert sorted(assign) == list(range(len(dets)))
        assert len(set(assign.values())) == len(assign)
        new_ids = set(assign.values()) - before
        assert not (new_ids & seen)
        seen |= set(assign.values())
        assert len({t.id for t in tr.tracks}) == len(tr.tracks)


def test_deterministic_ties():
    tracks = [Track(0, (0.0, 0.0), 10), Track(1, (2.0, 0.0), 10)]
    dets = [det(1, 0, 10), det(1, 0, 10)]
    a = associate(tracks, dets, PARAMS, next_id=2)
    b = associate(tracks, dets, PARAMS, next_id=2)
    assert a == b and a.assignment == {0: 0, 1: 1}


def test_vote_label_rules():
    t = Track(0, (0.0, 0.0), 1)
    t = vote_label(t, "human")
    assert t.label == "human"
    t = Track(0, (0.0, 0.0), 1, label_votes={"human": 3, "vehicle": 1})
    assert vote_label(t, "vehicle").label == "human"
    t = Track(0, (0.0, 0.0), 1, label_votes={"human": 2, "vehicle": 1})
    assert vote_label(t, "vehicle").label == "human"
    t = Track(0, (0.0, 0.0), 1, label_votes={"vehicle": 1, "human": 2})
    assert vote_label(t, "vehicle").label == "vehicle"
    with pytest.raises(EmptyLabel):
        vote_label(t, "")
    assert Track(0, (0.0, 0.0), 1).label is None
