"""Training, sequence recognition and evaluation built from the individual modules."""
from __future__ import annotations

import logging
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np
from sklearn.pipeline import Pipeline

from .classifier import AngleNearestMeanClassifier, ClassLibrary, classify
from .config import PipelineConfig
from .detector import BackgroundSubtractor
from .errors import DimensionMismatch, ParseError
from .evaluation import (
    SequenceResult,
    build_report,
    load_ground_truth,
    score_sequence,
    summarize_tracks,
)
from .frameio import (
    FrameSequence,
    GrayFrame,
    detection_record,
    load_sequence,
    load_training_set,
    read_jsonl,
    save_pgm,
    write_annotated,
    write_jsonl,
)
from .loggabor import LogGaborFeatures
from .tracker import Tracker

log = logging.getLogger(__name__)


def make_feature_extractor(config: PipelineConfig) -> LogGaborFeatures:
    b = config.bank
    return LogGaborFeatures(
        crop_size=config.crop_size, num_scales=b.num_scales, num_orientations=b.num_orientations,
        min_wavelength=b.min_wavelength, scale_mult=b.scale_mult, sigma_ratio=b.sigma_ratio,
        d_theta_ratio=b.d_theta_ratio, pool=config.pool,
    )


def make_recognition_pipeline(config: PipelineConfig) -> Pipeline:
    """Log-Gabor features -> PCA + angle nearest-mean, as one scikit-learn estimator."""
    return Pipeline([
        ("loggabor", make_feature_extractor(config)),
        ("classify", AngleNearestMeanClassifier(n_components=config.pca_k,
                                                reject_threshold=config.reject_threshold)),
    ])


def train_model(config: PipelineConfig, crops_by_class: Mapping[str, Sequence]) -> ClassLibrary:
    images, labels = [], []
    for label, crops in crops_by_class.items():
        images.extend(crops)
        labels.extend([label] * len(crops))
    pipe = make_recognition_pipeline(config)
    pipe.fit(images, np.array(labels, dtype=object))
    lib = pipe.named_steps["classify"].library_
    log.info("trained %d classes on %d crops, rank %d", len(lib.labels), len(images), lib.pca.rank)
    return lib


class SequenceRecognizer:
    """Per-frame detect -> track -> crop -> classify -> vote loop.

    Frames must be fed in order; background and tracks are sequential state.
    """

    def __init__(self, config: PipelineConfig, library: ClassLibrary):
        self.config = config
        self.features = make_feature_extractor(config).fit()
        if self.features.n_features_out_ != library.pca.dim:
            raise DimensionMismatch(
                f"config produces {self.features.n_features_out_}-d features, "
                f"model expects {library.pca.dim}")
        self.library = library
        self.background = BackgroundSubtractor(config.detector)
        self.tracker = Tracker(config.tracker)
        self.frame_index = 0

    def process(self, frame: GrayFrame) -> tuple[dict, GrayFrame]:
        detections = self.background.apply(frame)
        assignment = self.tracker.update(detections)
        records, overlays = [], []
        for di, det in enumerate(detections):
            tid = assignment[di]
            crop_box = det.box.padded(self.config.box_pad, frame.width, frame.height)
            crop = frame.pixels[crop_box.y:crop_box.y + crop_box.h, crop_box.x:crop_box.x + crop_box.w]
            vec = self.features.transform_one(crop)
            label, dist = classify(vec, self.library)
            track = self.tracker.vote(tid, label) if label is not None else self.tracker.get(tid)
            records.append(detection_record(det.box, det.centroid, det.area, tid, label, dist))
            overlays.append((det.box, track.label))
        record = {"frame": self.frame_index, "detections": records}
        self.frame_index += 1
        return record, write_annotated(frame, overlays)


def recognize_sequence(config: PipelineConfig, library: ClassLibrary, sequence: FrameSequence):
    rec = SequenceRecognizer(config, library)
    return [rec.process(frame) for frame in sequence]


# -- file-level commands ------------------------------------------------------

def cmd_train(config: PipelineConfig, train_dir, model_out) -> ClassLibrary:
    lib = train_model(config, load_training_set(train_dir))
    lib.save(model_out)
    return lib


def cmd_recognize(config: PipelineConfig, model_path, sequence_dir, out_dir) -> list[dict]:
    library = ClassLibrary.load(model_path)
    sequence = load_sequence(sequence_dir)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    records = []
    for record, annotated in recognize_sequence(config, library, sequence):
        save_pgm(annotated, out / f"frame_{record['frame']:06d}.pgm")
        records.append(record)
    write_jsonl(records, out / "results.jsonl")
    return records


def sequence_name(results_path) -> str:
    p = Path(results_path)
    return p.parent.name if p.stem == "results" and p.parent.name else p.stem


def evaluate_files(pairs: Sequence[tuple[str, str]]) -> list[SequenceResult]:
    """Score (results.jsonl, truth.jsonl) pairs, one sequence per pair."""
    out = []
    for results_path, truth_path in pairs:
        truth = load_ground_truth(read_jsonl(truth_path))
        tracks = summarize_tracks(read_jsonl(results_path))
        out.append(score_sequence(truth, tracks, sequence_name(results_path)))
    return out


def rows_from_jsonl(path) -> list[SequenceResult]:
    """Precomputed per-sequence counts: ``{"sequence_id", "correct", "incorrect"[, "printed_accuracy"]}``."""
    rows = []
    for obj in read_jsonl(path):
        try:
            rows.append(SequenceResult(str(obj["sequence_id"]), int(obj["correct"]),
                                       int(obj["incorrect"]), obj.get("printed_accuracy")))
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"{path}: bad row {obj!r}: {exc}") from exc
    return rows


def cmd_evaluate(results: Sequence[SequenceResult]) -> dict:
    return build_report(results)
