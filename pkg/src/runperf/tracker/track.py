"""Single-track state: Kalman estimate, appearance gallery, lifecycle."""

from __future__ import annotations

import enum
from collections import deque

import numpy as np

from .kalman import KalmanFilter, KalmanState

DEFAULT_GALLERY_SIZE = 100


class TrackStatus(enum.Enum):
    TENTATIVE = "tentative"
    CONFIRMED = "confirmed"
    DELETED = "deleted"


class Track:
    """One tracked target.

    A track starts tentative and is confirmed after ``n_init`` consecutive
    hits.  A tentative track that misses a frame is deleted immediately; a
    confirmed track survives ``max_age`` consecutive misses.  The gallery
    keeps the most recent appearance features (bounded ring buffer).
    """

    def __init__(
        self,
        track_id: int,
        state: KalmanState,
        first_frame: int,
        feature: np.ndarray | None = None,
        n_init: int = 3,
        max_age: int = 30,
        gallery_size: int = DEFAULT_GALLERY_SIZE,
    ):
        self.track_id = track_id
        self.state = state
        self.first_frame = first_frame
        self.first_bbox = state.bbox.copy()
        self.n_init = n_init
        self.max_age = max_age
        self.gallery: deque[np.ndarray] = deque(maxlen=gallery_size)
        if feature is not None:
            self.gallery.append(np.asarray(feature, dtype=np.float64))
        self.status = TrackStatus.TENTATIVE
        self.hits = 1
        self.age = 1
        self.frames_since_update = 0
        self.last_bbox = state.bbox.copy()
        self.last_source = "match"

    @property
    def is_tentative(self) -> bool:
        return self.status is TrackStatus.TENTATIVE

    @property
    def is_confirmed(self) -> bool:
        return self.status is TrackStatus.CONFIRMED

    @property
    def is_deleted(self) -> bool:
        return self.status is TrackStatus.DELETED

    def predict(self, kf: KalmanFilter) -> None:
        self.state = kf.predict(self.state)
        self.age += 1
        self.frames_since_update += 1

    def update(self, kf: KalmanFilter, bbox, feature: np.ndarray | None = None) -> None:
        """Incorporate a matched detection."""
        self.state = kf.update(self.state, bbox)
        if feature is not None:
            self.gallery.append(np.asarray(feature, dtype=np.float64))
        self.hits += 1
        self.frames_since_update = 0
        self.last_bbox = self.state.bbox.copy()
        self.last_source = "match"
        if self.status is TrackStatus.TENTATIVE and self.hits >= self.n_init:
            self.status = TrackStatus.CONFIRMED

    def update_backup(self, kf: KalmanFilter, bbox, noise_scale: float = 4.0) -> None:
        """Incorporate a backup proposal as a low-trust measurement.

        Does not touch frames_since_update: backup support keeps the estimate
        alive but never counts as a real observation.
        """
        self.state = kf.update(self.state, bbox, noise_scale=noise_scale)
        self.last_bbox = self.state.bbox.copy()
        self.last_source = "backup"

    def mark_missed(self) -> None:
        if self.status is TrackStatus.TENTATIVE:
            self.status = TrackStatus.DELETED
        elif self.frames_since_update > self.max_age:
            self.status = TrackStatus.DELETED

    def appearance_cost(self, features: np.ndarray) -> np.ndarray:
        """Min cosine distance between gallery entries and each feature row."""
        if not self.gallery:
            raise ValueError(f"track {self.track_id} has an empty appearance gallery")
        features = np.atleast_2d(np.asarray(features, dtype=np.float64))
        gallery = np.stack(tuple(self.gallery))
        sims = gallery @ features.T
        return 1.0 - sims.max(axis=0)
