"""Frequency-domain Log-Gabor filter bank and pooled magnitude features.

Each filter is the product of a radial term that is Gaussian in log-frequency
and an angular term that is Gaussian in orientation::

    H(f, theta) = exp(-ln(f/f0)**2 / (2 ln(sigma_ratio)**2))
                * exp(-d(theta, theta0)**2 / (2 sigma_theta**2))

where ``d`` is the orientation difference wrapped modulo pi. The radial term
is zero at DC, so every filter rejects the mean intensity of the image.

Filter gains are stored in native FFT order (DC at index ``[0, 0]``, as
produced by :func:`numpy.fft.fftfreq`), so applying a filter is a plain
elementwise product with ``numpy.fft.fft2`` output.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import check_images
from .errors import CenterFrequencyTooHigh, DimensionMismatch, EmptyResponseList, InvalidParams
from .frameio import GrayFrame, resize_bilinear

NORM_FLOOR = 1e-12


@dataclass(frozen=True)
class LogGaborFilterSpec:
    f0: float
    theta0: float
    sigma_ratio: float
    sigma_theta: float

    def __post_init__(self):
        if not 0.0 < self.f0 <= 0.5:
            raise InvalidParams(f"f0 must lie in (0, 0.5], got {self.f0}")
        if not 0.0 < self.sigma_ratio < 1.0:
            raise InvalidParams(f"sigma_ratio must lie in (0, 1), got {self.sigma_ratio}")
        if not self.sigma_theta > 0.0:
            raise InvalidParams(f"sigma_theta must be positive, got {self.sigma_theta}")
        if not 0.0 <= self.theta0 < math.pi:
            raise InvalidParams(f"theta0 must lie in [0, pi), got {self.theta0}")


@dataclass(frozen=True)
class LogGaborBankParams:
    num_scales: int = 4
    num_orientations: int = 6
    min_wavelength: float = 3.0
    scale_mult: float = 2.1
    sigma_ratio: float = 0.55
    d_theta_ratio: float = 1.2

    def validate(self) -> None:
        if self.num_scales < 1 or self.num_orientations < 1:
            raise InvalidParams("need at least one scale and one orientation")
        if not self.scale_mult > 1.0:
            raise InvalidParams(f"scale_mult must exceed 1, got {self.scale_mult}")
        if not 0.0 < self.sigma_ratio < 1.0:
            raise InvalidParams(f"sigma_ratio must lie in (0, 1), got {self.sigma_ratio}")
        if not self.d_theta_ratio > 0.0:
            raise InvalidParams(f"d_theta_ratio must be positive, got {self.d_theta_ratio}")
        if self.min_wavelength < 2:
            raise CenterFrequencyTooHigh(
                f"min_wavelength {self.min_wavelength} puts the first scale above Nyquist")

    @property
    def sigma_theta(self) -> float:
        return math.pi / self.num_orientations * self.d_theta_ratio

    def center_frequency(self, scale: int) -> float:
        return 1.0 / (self.min_wavelength * self.scale_mult ** scale)

    def orientation(self, index: int) -> float:
        return index * math.pi / self.num_orientations


@dataclass(frozen=True)
class FrequencyFilter:
    gains: np.ndarray
    spec: LogGaborFilterSpec

    @property
    def height(self) -> int:
        return self.gains.shape[0]

    @property
    def width(self) -> int:
        return self.gains.shape[1]

    def spatial_kernel(self) -> np.ndarray:
        """Complex spatial-domain kernel whose circular convolution equals this filter."""
        return np.fft.ifft2(self.gains)


@dataclass(frozen=True)
class LogGaborBank:
    filters: tuple[FrequencyFilter, ...]
    params: LogGaborBankParams

    @property
    def shape(self) -> tuple[int, int]:
        return self.filters[0].gains.shape

    def __len__(self) -> int:
        return len(self.filters)

    def gain_stack(self) -> np.ndarray:
        return np.stack([f.gains for f in self.filters])


def octave_bandwidth(sigma_ratio: float) -> float:
    """Octaves between the two radial half-gain frequencies.

    Solving ``H_f(f) = 1/2`` gives ``ln(f/f0) = +-ln(sigma_ratio) sqrt(2 ln 2)``.
    """
    return 2.0 * abs(math.log(sigma_ratio)) * math.sqrt(2.0 * math.log(2.0)) / math.log(2.0)


def radial_component(f, spec: LogGaborFilterSpec):
    f = np.asarray(f, dtype=np.float64)
    out = np.zeros(f.shape)
    pos = f > 0
    log_ratio = np.log(f[pos] / spec.f0)
    out[pos] = np.exp(-log_ratio ** 2 / (2.0 * math.log(spec.sigma_ratio) ** 2))
    return out if out.ndim else float(out)


def wrap_orientation(delta):
    """Wrap an orientation difference into [-pi/2, pi/2)."""
    return np.mod(np.asarray(delta, dtype=np.float64) + math.pi / 2, math.pi) - math.pi / 2


def angular_component(theta, spec: LogGaborFilterSpec):
    d = wrap_orientation(np.asarray(theta, dtype=np.float64) - spec.theta0)
    out = np.exp(-d ** 2 / (2.0 * spec.sigma_theta ** 2))
    return out if out.ndim else float(out)


def frequency_grid(width: int, height: int) -> tuple[np.ndarray, np.ndarray]:
    """Radius (cycles/pixel) and orientation folded into [0, pi), in FFT order."""
    u = np.fft.fftfreq(width)
    v = np.fft.fftfreq(height)
    uu, vv = np.meshgrid(u, v)
    radius = np.hypot(uu, vv)
    theta = np.mod(np.arctan2(vv, uu), math.pi)
    return radius, theta


def build_bank(params: LogGaborBankParams, width: int, height: int) -> LogGaborBank:
    params.validate()
    if width < 4 or height < 4:
        raise InvalidParams(f"filter size must be at least 4x4, got {width}x{height}")
    radius, theta = frequency_grid(width, height)
    filters = []
    for s in range(params.num_scales):
        f0 = params.center_frequency(s)
        if f0 > 0.5:
            raise CenterFrequencyTooHigh(f"scale {s} has f0 = {f0} > 0.5")
        for o in range(params.num_orientations):
            spec = LogGaborFilterSpec(f0, params.orientation(o), params.sigma_ratio,
                                      params.sigma_theta)
            gains = radial_component(radius, spec) * angular_component(theta, spec)
            gains[0, 0] = 0.0
            gains.setflags(write=False)
            filters.append(FrequencyFilter(gains, spec))
    return LogGaborBank(tuple(filters), params)


def _pixels(frame) -> np.ndarray:
    return frame.pixels if isinstance(frame, GrayFrame) else np.asarray(frame, dtype=np.float64)


def apply_bank_complex(frame, bank: LogGaborBank) -> np.ndarray:
    """Complex filter responses, shape (num_filters, height, width), in bank order."""
    img = _pixels(frame)
    if img.shape != bank.shape:
        raise DimensionMismatch(f"frame is {img.shape}, bank expects {bank.shape}")
    spectrum = np.fft.fft2(img)
    return np.fft.ifft2(bank.gain_stack() * spectrum, axes=(-2, -1))


def apply_bank(frame, bank: LogGaborBank) -> list[np.ndarray]:
    """Magnitude of each filter's response, same size as the frame."""
    return list(np.abs(apply_bank_complex(frame, bank)))


def extract_features(responses: Sequence[np.ndarray], pool: int) -> np.ndarray:
    """Average-pool each response over ``pool x pool`` blocks and concatenate.

    Responses are zero-padded at the bottom/right to a multiple of ``pool``.
    The result is scaled to unit Euclidean norm, or left all-zero if its norm
    is below 1e-12. Layout is (filter, pooled_row, pooled_col) flattened, so
    scale-major when the responses come from :func:`apply_bank`.
    """
    if len(responses) == 0:
        raise EmptyResponseList("no filter responses to pool")
    if pool < 1:
        raise InvalidParams(f"pool factor must be >= 1, got {pool}")
    stack = np.asarray(responses, dtype=np.float64)
    n, h, w = stack.shape
    ph, pw = -(-h // pool), -(-w // pool)
    padded = np.zeros((n, ph * pool, pw * pool))
    padded[:, :h, :w] = stack
    pooled = padded.reshape(n, ph, pool, pw, pool).mean(axis=(2, 4))
    vec = pooled.ravel()
    norm = np.linalg.norm(vec)
    if norm < NORM_FLOOR:
        return np.zeros_like(vec)
    return vec / norm


class LogGaborFeatures(TransformerMixin, BaseEstimator):
    """Resize images to a square crop and map them to pooled Log-Gabor magnitudes.

    ``X`` is a sequence of 2-D grayscale images (arrays or GrayFrames); they
    may differ in size, since each is resized to ``crop_size`` first. The
    output has ``num_scales * num_orientations * ceil(crop_size / pool)**2``
    columns.
    """

    def __init__(self, crop_size=64, num_scales=4, num_orientations=6, min_wavelength=3.0,
                 scale_mult=2.1, sigma_ratio=0.55, d_theta_ratio=1.2, pool=4):
        self.crop_size = crop_size
        self.num_scales = num_scales
        self.num_orientations = num_orientations
        self.min_wavelength = min_wavelength
        self.scale_mult = scale_mult
        self.sigma_ratio = sigma_ratio
        self.d_theta_ratio = d_theta_ratio
        self.pool = pool

    def _bank_params(self) -> LogGaborBankParams:
        return LogGaborBankParams(self.num_scales, self.num_orientations, self.min_wavelength,
                                  self.scale_mult, self.sigma_ratio, self.d_theta_ratio)

    def fit(self, X=None, y=None):
        if self.crop_size % self.pool:
            raise InvalidParams(f"crop_size {self.crop_size} is not a multiple of pool {self.pool}")
        self.bank_ = build_bank(self._bank_params(), self.crop_size, self.crop_size)
        side = self.crop_size // self.pool
        self.n_features_out_ = len(self.bank_) * side * side
        return self

    def transform_one(self, image) -> np.ndarray:
        img = resize_bilinear(_pixels(image), self.crop_size, self.crop_size)
        return extract_features(apply_bank(img, self.bank_), self.pool)

    def transform(self, X):
        check_is_fitted(self, "bank_")
        images = check_images(X)
        out = np.empty((len(images), self.n_features_out_))
        for i, img in enumerate(images):
            out[i] = self.transform_one(img)
        return out
