"""Input validation helpers shared by the estimators."""
from __future__ import annotations

import numpy as np

from .errors import DimensionMismatch


def check_images(X) -> list[np.ndarray]:
    """Coerce a batch of grayscale images into a list of 2-D float arrays.

    Accepts a 3-D array, or any sequence of 2-D arrays / GrayFrames (sizes may differ).
    """
    if isinstance(X, np.ndarray):
        if X.ndim == 2:
            raise ValueError("expected a batch of images; wrap a single image in a list")
        if X.ndim != 3:
            raise ValueError(f"expected a 3-D image stack, got shape {X.shape}")
        return [np.asarray(img, dtype=np.float64) for img in X]
    images = []
    for item in X:
        arr = np.asarray(getattr(item, "pixels", item), dtype=np.float64)
        if arr.ndim != 2 or arr.size == 0:
            raise ValueError(f"every image must be a non-empty 2-D array, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise ValueError("images must not contain NaN or inf")
        images.append(arr)
    if not images:
        raise ValueError("empty image batch")
    return images


def check_vector(x, dim: int, name: str = "x") -> np.ndarray:
    v = np.asarray(x, dtype=np.float64)
    if v.ndim != 1 or v.shape[0] != dim:
        raise DimensionMismatch(f"{name} must be a {dim}-vector, got shape {v.shape}")
    return v
