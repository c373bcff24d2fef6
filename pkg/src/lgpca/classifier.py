"""Class library of mean projected features and angle-based nearest-mean classification."""
from __future__ import annotations

import math
import struct
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

from ._validation import check_vector
from .errors import (
    DimensionMismatch,
    InvalidThreshold,
    ModelVersionMismatch,
    TooFewClasses,
    UnreadableFile,
    ZeroVector,
)
from .subspace import PcaModel, fit_pca, project

NORM_FLOOR = 1e-12
DEFAULT_REJECT = math.pi / 4
MAGIC = b"LGPC"
FORMAT_VERSION = 1


def angle_distance(a, b) -> float:
    """Angle in radians between two nonzero vectors, in [0, pi]."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise DimensionMismatch(f"vectors have shapes {a.shape} and {b.shape}")
    na, nb = np.linalg.norm(a), np.linalg.norm(b)
    if na < NORM_FLOOR or nb < NORM_FLOOR:
        raise ZeroVector("angle is undefined for a zero vector")
    cos = float(np.dot(a, b) / (na * nb))
    return math.acos(min(1.0, max(-1.0, cos)))


def _angles_to_means(p: np.ndarray, means: np.ndarray) -> np.ndarray:
    # rows of `means` with zero norm can never be the nearest class
    norms = np.linalg.norm(means, axis=1)
    cos = means @ p / (np.where(norms < NORM_FLOOR, 1.0, norms) * np.linalg.norm(p))
    ang = np.arccos(np.clip(cos, -1.0, 1.0))
    ang[norms < NORM_FLOOR] = np.inf
    return ang


@dataclass(frozen=True)
class ClassLibrary:
    pca: PcaModel
    labels: tuple[str, ...]
    means: np.ndarray  # (n_classes, k)
    reject_threshold: float = DEFAULT_REJECT

    def __post_init__(self):
        if len(self.labels) != len(set(self.labels)) or any(not lab for lab in self.labels):
            raise ValueError("class labels must be unique and nonempty")
        if self.means.shape != (len(self.labels), self.pca.rank):
            raise DimensionMismatch(
                f"means have shape {self.means.shape}, expected ({len(self.labels)}, {self.pca.rank})")
        if not 0.0 < self.reject_threshold <= math.pi / 2:
            raise InvalidThreshold(
                f"reject_threshold must lie in (0, pi/2], got {self.reject_threshold}")

    def class_mean(self, label: str) -> np.ndarray:
        return self.means[self.labels.index(label)]

    # -- binary model file --------------------------------------------------

    def to_bytes(self) -> bytes:
        d, k = self.pca.dim, self.pca.rank
        le = np.dtype("<f8")
        parts = [
            MAGIC,
            struct.pack("<III", FORMAT_VERSION, d, k),
            self.pca.mean.astype(le).tobytes(),
            np.ascontiguousarray(self.pca.basis, dtype=le).tobytes(),
            self.pca.eigenvalues.astype(le).tobytes(),
            struct.pack("<dI", self.reject_threshold, len(self.labels)),
        ]
        for label, mean in zip(self.labels, self.means):
            raw = label.encode("utf-8")
            parts.append(struct.pack("<I", len(raw)))
            parts.append(raw)
            parts.append(mean.astype(le).tobytes())
        return b"".join(parts)

    @classmethod
    def from_bytes(cls, data: bytes) -> ClassLibrary:
        if data[:4] != MAGIC:
            raise ModelVersionMismatch("not a model library file (bad magic)")
        try:
            version, d, k = struct.unpack_from("<III", data, 4)
            if version != FORMAT_VERSION:
                raise ModelVersionMismatch(f"unsupported model version {version}")
            pos = 16

            def floats(count):
                nonlocal pos
                arr = np.frombuffer(data, dtype="<f8", count=count, offset=pos).astype(np.float64)
                pos += 8 * count
                return arr

            mean = floats(d)
            basis = floats(d * k).reshape(d, k)
            eigvals = floats(k)
            reject, n_classes = struct.unpack_from("<dI", data, pos)
            pos += 12
            labels, means = [], []
            for _ in range(n_classes):
                (length,) = struct.unpack_from("<I", data, pos)
                pos += 4
                raw = data[pos:pos + length]
                if len(raw) != length:
                    raise ValueError("truncated label")
                labels.append(raw.decode("utf-8"))
                pos += length
                means.append(floats(k))
        except (struct.error, ValueError) as exc:
            if isinstance(exc, ModelVersionMismatch):
                raise
            raise UnreadableFile(f"corrupt model library: {exc}") from exc
        if pos != len(data):
            raise UnreadableFile("model library has trailing bytes")
        pca = PcaModel(mean, basis, eigvals)
        return cls(pca, tuple(labels), np.array(means).reshape(n_classes, k), reject)

    def save(self, path) -> None:
        Path(path).write_bytes(self.to_bytes())

    @classmethod
    def load(cls, path) -> ClassLibrary:
        try:
            data = Path(path).read_bytes()
        except OSError as exc:
            raise UnreadableFile(f"{path}: {exc}") from exc
        return cls.from_bytes(data)


def train_library(features_by_class: Mapping[str, Sequence], k: int = 32,
                  reject_threshold: float = DEFAULT_REJECT, method: str = "auto") -> ClassLibrary:
    """Fit one PCA over all classes and store each class's mean projection.

    Class order in the library follows the mapping's iteration order.
    """
    if len(features_by_class) < 2:
        raise TooFewClasses(f"need at least 2 classes, got {len(features_by_class)}")
    labels, blocks = [], []
    for label, feats in features_by_class.items():
        arr = np.atleast_2d(np.asarray(feats, dtype=np.float64))
        if arr.size == 0:
            raise TooFewClasses(f"class {label!r} has no features")
        labels.append(label)
        blocks.append(arr)
    if len({b.shape[1] for b in blocks}) != 1:
        raise DimensionMismatch("all features must have the same length")
    pca = fit_pca(np.vstack(blocks), k, method)
    means = np.array([project(pca, b).mean(axis=0) for b in blocks])
    return ClassLibrary(pca, tuple(labels), means, reject_threshold)


def classify_projected(p, lib: ClassLibrary) -> tuple[str | None, float]:
    """Nearest class mean by angle for an already projected vector.

    Returns ``(None, distance)`` for Unknown: the nearest mean lies beyond
    the reject threshold. A zero ``p`` has no direction and is reported as
    Unknown at distance ``pi / 2``.
    """
    p = check_vector(p, lib.pca.rank, "projected vector")
    if np.linalg.norm(p) < NORM_FLOOR:
        return None, math.pi / 2
    angles = _angles_to_means(p, lib.means)
    best = int(np.argmin(angles))  # first minimum: ties go to library order
    dist = float(angles[best])
    if not math.isfinite(dist):
        return None, math.pi / 2
    if dist > lib.reject_threshold:
        return None, dist
    return lib.labels[best], dist


def classify(x, lib: ClassLibrary) -> tuple[str | None, float]:
    x = check_vector(x, lib.pca.dim)
    return classify_projected(project(lib.pca, x), lib)


class AngleNearestMeanClassifier(ClassifierMixin, BaseEstimator):
    """PCA projection followed by nearest class mean under angle distance.

    ``predict`` returns ``unknown_label`` for rejected samples.
    """

    def __init__(self, n_components=32, reject_threshold=DEFAULT_REJECT, pca_method="auto",
                 unknown_label=None):
        self.n_components = n_components
        self.reject_threshold = reject_threshold
        self.pca_method = pca_method
        self.unknown_label = unknown_label

    def fit(self, X, y):
        X, y = check_X_y(X, y, dtype=np.float64, y_numeric=False)
        self.classes_ = np.unique(y)
        # library labels are text; remember the original class objects for predict
        self.label_map_ = {str(c): c for c in self.classes_}
        grouped = {str(c): X[y == c] for c in self.classes_}
        self.library_ = train_library(grouped, self.n_components, self.reject_threshold,
                                      self.pca_method)
        self.n_features_in_ = X.shape[1]
        return self

    @classmethod
    def from_library(cls, lib: ClassLibrary, unknown_label=None) -> AngleNearestMeanClassifier:
        clf = cls(n_components=lib.pca.rank, reject_threshold=lib.reject_threshold,
                  unknown_label=unknown_label)
        clf.library_ = lib
        clf.classes_ = np.array(lib.labels, dtype=object)
        clf.label_map_ = {label: label for label in lib.labels}
        clf.n_features_in_ = lib.pca.dim
        return clf

    def angle_distances(self, X) -> np.ndarray:
        """Angle from each sample's projection to every class mean, shape (n, n_classes)."""
        check_is_fitted(self, "library_")
        X = check_array(X, dtype=np.float64)
        P = project(self.library_.pca, X)
        out = np.full((len(P), len(self.library_.labels)), math.pi / 2)
        for i, p in enumerate(P):
            if np.linalg.norm(p) >= NORM_FLOOR:
                out[i] = _angles_to_means(p, self.library_.means)
        return out

    def decision_function(self, X):
        return -self.angle_distances(X)

    def predict(self, X):
        check_is_fitted(self, "library_")
        X = check_array(X, dtype=np.float64)
        P = project(self.library_.pca, X)
        labels = [classify_projected(p, self.library_)[0] for p in P]
        mapped = [self.unknown_label if label is None else self.label_map_[label]
                  for label in labels]
        if any(label is None for label in labels) and self.unknown_label is None:
            out = np.empty(len(mapped), dtype=object)
            out[:] = mapped
            return out
        return np.asarray(mapped, dtype=np.result_type(self.classes_, np.asarray(mapped)))
