"""Pipeline configuration in a flat ``key = value`` text format.

Blank lines and ``#`` comments are ignored. Missing keys take their
defaults; unknown keys are an error.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

from .detector import DetectorParams
from .errors import InvalidParams, ParseError, UnreadableFile
from .loggabor import LogGaborBankParams
from .tracker import TrackerParams

# (config key, section, attribute, type); the order here is the file order
KEYS = (
    ("crop_size", None, "crop_size", int),
    ("scales", "bank", "num_scales", int),
    ("orientations", "bank", "num_orientations", int),
    ("min_wavelength", "bank", "min_wavelength", float),
    ("scale_mult", "bank", "scale_mult", float),
    ("sigma_ratio", "bank", "sigma_ratio", float),
    ("d_theta_ratio", "bank", "d_theta_ratio", float),
    ("pool", None, "pool", int),
    ("pca_k", None, "pca_k", int),
    ("reject_threshold", None, "reject_threshold", float),
    ("diff_threshold", "detector", "diff_threshold", float),
    ("min_area", "detector", "min_area", int),
    ("alpha", "detector", "alpha", float),
    ("gate_radius", "tracker", "gate_radius", float),
    ("area_ratio_max", "tracker", "area_ratio_max", float),
    ("max_misses", "tracker", "max_misses", int),
    ("box_pad", None, "box_pad", float),
    ("seed", None, "seed", int),
)


@dataclass(frozen=True)
class PipelineConfig:
    crop_size: int = 64
    bank: LogGaborBankParams = field(default_factory=LogGaborBankParams)
    pool: int = 4
    pca_k: int = 32
    reject_threshold: float = math.pi / 4
    detector: DetectorParams = field(default_factory=DetectorParams)
    tracker: TrackerParams = field(default_factory=TrackerParams)
    box_pad: float = 0.1
    seed: int = 0

    def validate(self) -> None:
        if self.pool < 1 or self.crop_size < 4 or self.crop_size % self.pool:
            raise InvalidParams(
                f"crop_size ({self.crop_size}) must be >= 4 and a multiple of pool ({self.pool})")
        if self.pca_k < 1:
            raise InvalidParams(f"pca_k must be >= 1, got {self.pca_k}")
        if not 0.0 < self.reject_threshold <= math.pi / 2:
            raise InvalidParams(f"reject_threshold must lie in (0, pi/2], got {self.reject_threshold}")
        if self.box_pad < 0:
            raise InvalidParams(f"box_pad must be >= 0, got {self.box_pad}")
        self.bank.validate()
        self.detector.validate()
        self.tracker.validate()


def _parse_value(key, typ, raw, lineno):
    try:
        if typ is int:
            return int(raw)
        return float(raw)
    except ValueError:
        raise ParseError(f"line {lineno}: {key} expects {typ.__name__}, got {raw!r}") from None


def parse_config(text: str) -> PipelineConfig:
    by_key = {k: (section, attr, typ) for k, section, attr, typ in KEYS}
    top, sections = {}, {"bank": {}, "detector": {}, "tracker": {}}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParseError(f"line {lineno}: expected 'key = value'")
        key, raw = (s.strip() for s in line.split("=", 1))
        if key not in by_key:
            raise ParseError(f"line {lineno}: unknown key {key!r}")
        section, attr, typ = by_key[key]
        target = top if section is None else sections[section]
        if attr in target:
            raise ParseError(f"line {lineno}: duplicate key {key!r}")
        target[attr] = _parse_value(key, typ, raw, lineno)
    config = PipelineConfig(
        bank=LogGaborBankParams(**sections["bank"]),
        detector=DetectorParams(**sections["detector"]),
        tracker=TrackerParams(**sections["tracker"]),
        **top,
    )
    config.validate()
    return config


def dump_config(config: PipelineConfig) -> str:
    lines = []
    for key, section, attr, typ in KEYS:
        owner = config if section is None else getattr(config, section)
        value = getattr(owner, attr)
        lines.append(f"{key} = {int(value) if typ is int else repr(float(value))}")
    return "\n".join(lines) + "\n"


def load_config(path) -> PipelineConfig:
    if path is None:
        return PipelineConfig()
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UnreadableFile(f"{path}: {exc}") from exc
    return parse_config(text)


def config_keys() -> list[str]:
    return [k for k, *_ in KEYS]


__all__ = ["PipelineConfig", "parse_config", "dump_config", "load_config", "config_keys"]
