"""Record types shared across the toolkit."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

CONTEXT_MODES = ("raw", "bb", "vibe")
LOGITS_DIM = 400
DEFAULT_FEATURE_DIM = 128

UNIT_NORM_TOL = 1e-6


class DataError(ValueError):
    """An input record or file violates one of the on-disk format contracts."""


def _as_float_vec(values, name: str) -> np.ndarray:
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != 1:
        raise DataError(f"{name} must be a flat vector, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise DataError(f"{name} contains non-finite values")
    return arr


@dataclass
class Detection:
    """One per-frame candidate box with confidence and appearance feature.

    ``bbox`` is (cx, cy, w, h) in pixels.  ``feature`` must be unit length
    within 1e-6; loaders normalize before constructing.
    """

    frame_index: int
    bbox: np.ndarray
    confidence: float
    feature: np.ndarray

    def __post_init__(self):
        if self.frame_index < 0:
            raise DataError(f"frame_index must be >= 0, got {self.frame_index}")
        self.bbox = _as_float_vec(self.bbox, "bbox")
        if self.bbox.shape != (4,):
            raise DataError(f"bbox must have 4 entries (cx, cy, w, h), got {self.bbox.shape[0]}")
        if self.bbox[2] <= 0 or self.bbox[3] <= 0:
            raise DataError(
                f"bbox width/height must be positive, got w={self.bbox[2]}, h={self.bbox[3]}"
            )
        if not (0.0 <= self.confidence <= 1.0):
            raise DataError(f"confidence must be in [0, 1], got {self.confidence}")
        self.feature = _as_float_vec(self.feature, "feature")
        norm = float(np.linalg.norm(self.feature))
        if abs(norm - 1.0) > UNIT_NORM_TOL:
            raise DataError(f"feature must be unit-norm (|norm-1| <= {UNIT_NORM_TOL}), got norm={norm}")


def normalize_feature(values) -> np.ndarray:
    """Scale a raw appearance vector to unit length; zero vectors are rejected."""
    arr = _as_float_vec(values, "feature")
    norm = float(np.linalg.norm(arr))
    if norm == 0.0:
        raise DataError("feature has zero norm and cannot be normalized")
    if abs(norm - 1.0) > UNIT_NORM_TOL:
        arr = arr / norm
    return arr


@dataclass
class ClipRecord:
    """Embedding vector for one runner x recording point x context mode clip."""

    runner_id: str
    rp_id: int
    context_mode: str
    logits: np.ndarray  # float32, length 400

    def __post_init__(self):
        if self.context_mode not in CONTEXT_MODES:
            raise DataError(
                f"context_mode must be one of {CONTEXT_MODES}, got {self.context_mode!r}"
            )
        arr = np.asarray(self.logits, dtype=np.float32)
        if arr.ndim != 1 or arr.shape[0] != LOGITS_DIM:
            raise DataError(
                f"logits must have exactly {LOGITS_DIM} entries, got "
                f"{arr.shape[0] if arr.ndim == 1 else arr.shape}"
            )
        if not np.all(np.isfinite(arr)):
            raise DataError("logits contain non-finite values")
        self.logits = arr

    @property
    def key(self) -> tuple[str, int, str]:
        return (self.runner_id, self.rp_id, self.context_mode)


@dataclass(frozen=True)
class SplitRecord:
    """Elapsed race time (seconds) for one runner at one recording point."""

    runner_id: str
    rp_id: int
    split_time: float

    def __post_init__(self):
        if self.split_time <= 0:
            raise DataError(
                f"split_time must be positive, got {self.split_time} for runner {self.runner_id!r}"
            )


@dataclass(frozen=True)
class RPInfo:
    """Recording-point metadata: course position, opening time, annotation count."""

    rp_id: int
    km: float
    start_rec_time: str  # "hh:mm" offset from race start
    annotated_runners: int
    footage_frames: int | None = None


@dataclass
class FrameBuffer:
    """A decoded RGB frame: row-major uint8 pixels of shape (height, width, 3)."""

    width: int
    height: int
    pixels: np.ndarray
    channels: int = 3

    def __post_init__(self):
        if self.width <= 0 or self.height <= 0:
            raise DataError(f"frame dimensions must be positive, got {self.width}x{self.height}")
        if self.channels != 3:
            raise DataError(f"only 3-channel frames are supported, got {self.channels}")
        arr = np.asarray(self.pixels, dtype=np.uint8)
        expected = self.width * self.height * self.channels
        if arr.size != expected:
            raise DataError(
                f"pixel buffer has {arr.size} values, expected {expected} "
                f"for {self.width}x{self.height}x{self.channels}"
            )
        self.pixels = arr.reshape(self.height, self.width, self.channels)

    @classmethod
    def from_array(cls, pixels) -> "FrameBuffer":
        arr = np.asarray(pixels, dtype=np.uint8)
        if arr.ndim != 3 or arr.shape[2] != 3:
            raise DataError(f"expected an (h, w, 3) array, got shape {arr.shape}")
        return cls(width=arr.shape[1], height=arr.shape[0], pixels=arr)
