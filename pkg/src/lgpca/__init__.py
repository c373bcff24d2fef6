"""Moving-object recognition with Log-Gabor features, PCA and angle-based nearest-mean matching."""

from .classifier import (
    AngleNearestMeanClassifier,
    ClassLibrary,
    angle_distance,
    classify,
    classify_projected,
    train_library,
)
from .config import PipelineConfig, dump_config, load_config, parse_config
from .detector import BackgroundSubtractor, Detection, DetectorParams, detect, update_background
from .boxes import BoundingBox, iou
from .evaluation import accuracy_percent, overall_accuracy, score_sequence
from .frameio import GrayFrame, load_frame, load_sequence, write_annotated
from .loggabor import (
    LogGaborBankParams,
    LogGaborFeatures,
    apply_bank,
    build_bank,
    extract_features,
)
from .pipeline import make_recognition_pipeline
from .subspace import PcaModel, SnapshotPCA, fit_pca, project
from .tracker import Track, Tracker, TrackerParams, associate, vote_label

__version__ = "0.1.0"
