"""Recognition accuracy: per-sequence scoring and tabular reports."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .boxes import BoundingBox, iou
from .errors import EmptyCounts, EmptyList, NoGroundTruth, ParseError
from .tracker import Track, vote_label

IOU_MIN = 0.3


@dataclass(frozen=True)
class SequenceResult:
    sequence_id: str
    correct: int
    incorrect: int
    printed_accuracy: float | None = None  # a published figure to compare against, if any

    def __post_init__(self):
        if self.correct < 0 or self.incorrect < 0 or self.correct + self.incorrect < 1:
            raise EmptyCounts(f"{self.sequence_id}: need at least one recognition")

    @property
    def accuracy(self) -> float:
        return accuracy_percent(self.correct, self.incorrect)

    @property
    def flagged(self) -> bool:
        return (self.printed_accuracy is not None
                and round(self.accuracy, 1) != round(self.printed_accuracy, 1))


# Counts and accuracies as printed for the four benchmark sequences.
PUBLISHED_TABLE = (
    SequenceResult("Arial Fig 3", 25, 3, printed_accuracy=88.0),
    SequenceResult("OTCBVS Fig 7(a)", 43, 7, printed_accuracy=86.0),
    SequenceResult("Fig 8(a)", 23, 2, printed_accuracy=92.0),
    SequenceResult("Fig 8(b)", 24, 1, printed_accuracy=96.0),
)
PUBLISHED_OVERALL = 90.5


def accuracy_fraction(correct: int, incorrect: int) -> Fraction:
    if correct + incorrect < 1:
        raise EmptyCounts("accuracy needs at least one recognition")
    return Fraction(100 * correct, correct + incorrect)


def accuracy_percent(correct: int, incorrect: int) -> float:
    return float(accuracy_fraction(correct, incorrect))


def overall_accuracy(per_sequence: Sequence[float]) -> float:
    """Unweighted mean of per-sequence accuracy percentages."""
    if len(per_sequence) == 0:
        raise EmptyList("no sequences to average")
    return math.fsum(per_sequence) / len(per_sequence)


# -- ground truth and results parsing -----------------------------------------

@dataclass(frozen=True)
class GroundTruthObject:
    object_id: str
    label: str
    keyframes: dict[int, BoundingBox]

    @classmethod
    def from_json(cls, obj: Mapping) -> GroundTruthObject:
        try:
            keyframes = {int(k["frame"]): BoundingBox(*map(int, k["box"]))
                         for k in obj["keyframes"]}
            return cls(str(obj["object_id"]), str(obj["label"]), keyframes)
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"bad ground-truth object {obj!r}: {exc}") from exc

    def to_json(self) -> dict:
        return {
            "object_id": self.object_id,
            "label": self.label,
            "keyframes": [{"frame": f, "box": b.as_list()} for f, b in sorted(self.keyframes.items())],
        }


@dataclass(frozen=True)
class TrackSummary:
    track_id: int
    label: str | None
    boxes: dict[int, BoundingBox]


def summarize_tracks(records: Iterable[Mapping]) -> list[TrackSummary]:
    """Collapse per-frame result records into one summary per track id.

    Per-frame labels are replayed through :func:`vote_label` in frame order,
    so a track's label is its majority label (ties to the earliest voted).
    Null labels (Unknown) do not vote.
    """
    votes: dict[int, Track] = {}
    boxes: dict[int, dict[int, BoundingBox]] = {}
    try:
        for rec in sorted(records, key=lambda r: int(r["frame"])):
            frame = int(rec["frame"])
            for det in rec["detections"]:
                tid = int(det["track_id"])
                box = BoundingBox(*map(int, det["box"]))
                boxes.setdefault(tid, {})[frame] = box
                track = votes.setdefault(tid, Track(tid, (0.0, 0.0), 1))
                if det.get("label"):
                    votes[tid] = vote_label(track, det["label"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"bad result record: {exc}") from exc
    return [TrackSummary(tid, votes[tid].label, boxes[tid]) for tid in sorted(boxes)]


def _match_score(track: TrackSummary, gt: GroundTruthObject) -> float:
    shared = [f for f in gt.keyframes if f in track.boxes]
    if not shared:
        return 0.0
    return math.fsum(iou(track.boxes[f], gt.keyframes[f]) for f in shared) / len(shared)


def score_sequence(ground_truth: Sequence[GroundTruthObject], tracks: Sequence[TrackSummary],
                   sequence_id: str = "sequence") -> SequenceResult:
    """Count correct and incorrect recognitions in one sequence.

    Each track is matched to the ground-truth object with the highest mean
    keyframe IoU (at least 0.3). A track is correct when its label equals that
    object's label; unmatched and mislabeled tracks are incorrect. Ground-truth
    objects that no track matched also count as incorrect.
    """
    if not ground_truth:
        raise NoGroundTruth(f"{sequence_id}: no ground-truth objects")
    correct = incorrect = 0
    matched_gt = set()
    for track in sorted(tracks, key=lambda t: t.track_id):
        best, best_score = None, -1.0
        for gt in ground_truth:
            s = _match_score(track, gt)
            if s >= IOU_MIN and s > best_score:
                best, best_score = gt, s
        if best is None:
            incorrect += 1
            continue
        matched_gt.add(best.object_id)
        if track.label == best.label:
            correct += 1
        else:
            incorrect += 1
    incorrect += sum(1 for gt in ground_truth if gt.object_id not in matched_gt)
    return SequenceResult(sequence_id, correct, incorrect)


def load_ground_truth(rows: Iterable[Mapping]) -> list[GroundTruthObject]:
    return [GroundTruthObject.from_json(r) for r in rows]


# -- reports ------------------------------------------------------------------

def build_report(results: Sequence[SequenceResult]) -> dict:
    if not results:
        raise EmptyList("no sequence results")
    rows = []
    for r in results:
        row = {"sequence_id": r.sequence_id, "correct": r.correct, "incorrect": r.incorrect,
               "accuracy": round(r.accuracy, 1)}
        if r.printed_accuracy is not None:
            row["printed_accuracy"] = r.printed_accuracy
            row["flagged"] = r.flagged
        rows.append(row)
    report = {"rows": rows, "overall": round(overall_accuracy([r.accuracy for r in results]), 1)}
    if any(r.printed_accuracy is not None for r in results):
        printed = [r.printed_accuracy if r.printed_accuracy is not None else r.accuracy
                   for r in results]
        report["overall_printed"] = round(overall_accuracy(printed), 1)
    return report


def format_report(report: Mapping) -> str:
    headers = ("Input Sequences", "Correctly Recognized", "Incorrectly Recognized",
               "Recognition Accuracy")
    lines = []
    body = []
    for row in report["rows"]:
        acc = f"{row['accuracy']:.1f}"
        if row.get("flagged"):
            acc += f" (printed {row['printed_accuracy']:g})"
        body.append((row["sequence_id"], str(row["correct"]), str(row["incorrect"]), acc))
    overall = f"{report['overall']:.1f}"
    if "overall_printed" in report and report["overall_printed"] != report["overall"]:
        overall += f" (from printed column {report['overall_printed']:.1f})"
    body.append(("overall", "", "", overall))
    widths = [max(len(h), *(len(r[i]) for r in body)) for i, h in enumerate(headers)]
    fmt = "  ".join(f"{{:<{w}}}" for w in widths)
    lines.append(fmt.format(*headers).rstrip())
    lines.append("-" * (sum(widths) + 2 * (len(widths) - 1)))
    for r in body[:-1]:
        lines.append(fmt.format(*r).rstrip())
    lines.append("-" * (sum(widths) + 2 * (len(widths) - 1)))
    lines.append(fmt.format(*body[-1]).rstrip())
    return "\n".join(lines) + "\n"


def report_json(report: Mapping) -> str:
    return json.dumps(report, indent=2) + "\n"
