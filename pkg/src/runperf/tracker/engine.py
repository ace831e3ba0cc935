"""Tracking-by-detection engine.

Per frame: predict every live track, associate detections to confirmed
tracks in a cascade ordered by frames_since_update (most recently seen
first), then to tentative tracks, update matches, spawn tentative tracks
from leftover detections, and retire stale tracks.  The association cost is
the minimum cosine distance against each track's appearance gallery; pairs
outside the chi-square Mahalanobis gate are forbidden.  A configurable
``motion_weight`` blends the squared Mahalanobis distance into the cost
(0 by default, gating only).

When the runner of interest goes unmatched, a backup tracker may propose a
box that is fused into the Kalman state as a low-trust measurement and
reported with source "backup".
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..dataio.types import Detection
from .assignment import GATED_COST, assign
from .backup import BackupTracker, bbox_iou
from .kalman import CHI2_GATE_4DOF, KalmanFilter
from .track import Track, TrackStatus


@dataclass(frozen=True)
class TrackerConfig:
    max_age: int = 30
    n_init: int = 3
    gallery_size: int = 100
    gate_threshold: float = CHI2_GATE_4DOF
    motion_weight: float = 0.0   # blend of squared Mahalanobis into the cost
    backup_noise_scale: float = 4.0

    def __post_init__(self):
        if self.max_age < 1:
            raise ValueError("max_age must be >= 1")
        if self.n_init < 1:
            raise ValueError("n_init must be >= 1")
        if self.gallery_size < 1:
            raise ValueError("gallery_size must be >= 1")
        if self.gate_threshold <= 0:
            raise ValueError("gate_threshold must be positive")
        if not 0.0 <= self.motion_weight <= 1.0:
            raise ValueError("motion_weight must be in [0, 1]")
        if self.backup_noise_scale <= 0:
            raise ValueError("backup_noise_scale must be positive")


@dataclass(frozen=True)
class TrackEmission:
    frame_index: int
    track_id: int
    bbox: tuple[float, float, float, float]
    source: str  # "match" or "backup"


def appearance_cost(track: Track, detection: Detection) -> float:
    """Minimum cosine distance between the detection feature and the gallery."""
    return float(track.appearance_cost(detection.feature[None, :])[0])


def select_runner_of_interest(tracks, seed_bbox) -> int:
    """Pick the confirmed track whose first bbox best overlaps the seed box.

    Ties break toward the lower id.  Raises if no confirmed track overlaps
    the seed at all.
    """
    best_id = None
    best_iou = 0.0
    for track in tracks:
        if track.status is not TrackStatus.CONFIRMED:
            continue
        iou = bbox_iou(track.first_bbox, seed_bbox)
        if iou > best_iou or (iou == best_iou and iou > 0.0 and track.track_id < best_id):
            best_iou = iou
            best_id = track.track_id
    if best_id is None:
        raise ValueError("no confirmed track overlaps the seed bbox")
    return best_id


class Tracker:
    """Multi-target tracker over one video sequence (single-threaded)."""

    def __init__(self, config: TrackerConfig | None = None, roi_seed_bbox=None):
        self.config = config or TrackerConfig()
        self.kf = KalmanFilter()
        self.tracks: list[Track] = []       # live (not deleted) tracks
        self.all_tracks: list[Track] = []   # every track ever created
        self.roi_seed_bbox = None if roi_seed_bbox is None else tuple(
            float(v) for v in roi_seed_bbox
        )
        self.roi_id: int | None = None
        self._next_id = 1

    def _new_track(self, detection: Detection, frame_index: int) -> Track:
        state = self.kf.initiate(detection.bbox)
        track = Track(
            self._next_id,
            state,
            frame_index,
            feature=detection.feature,
            n_init=self.config.n_init,
            max_age=self.config.max_age,
            gallery_size=self.config.gallery_size,
        )
        self._next_id += 1
        self.tracks.append(track)
        self.all_tracks.append(track)
        return track

    def _cost_row(self, track: Track, detections: list[Detection]) -> np.ndarray:
        features = np.stack([d.feature for d in detections])
        cost = track.appearance_cost(features)
        boxes = [d.bbox for d in detections]
        maha = self.kf.gating_distance(track.state, boxes)
        if self.config.motion_weight > 0.0:
            w = self.config.motion_weight
            cost = (1.0 - w) * cost + w * maha
        cost = cost.copy()
        cost[maha > self.config.gate_threshold] = GATED_COST
        return cost

    def _associate(self, tracks: list[Track], detections: list[Detection]):
        """Gated assignment of one cascade level; returns matches and leftovers."""
        if not tracks or not detections:
            return [], list(range(len(detections)))
        cost = np.stack([self._cost_row(t, detections) for t in tracks])
        result = assign(cost)
        matches = [(tracks[ti], di) for ti, di in result.matches]
        return matches, sorted(result.unmatched_detections)

    def step(
        self,
        frame_index: int,
        detections: list[Detection],
        backup: BackupTracker | None = None,
    ) -> list[TrackEmission]:
        """Advance one frame and return the boxes to report."""
        for track in self.tracks:
            track.predict(self.kf)

        detections = list(detections)
        unmatched = list(range(len(detections)))
        all_matches: list[tuple[Track, int]] = []

        # Cascade over confirmed tracks, most recently updated first, then
        # one final level for tentative tracks.
        confirmed = [t for t in self.tracks if t.is_confirmed]
        tentative = [t for t in self.tracks if t.is_tentative]
        levels = [
            [t for t in confirmed if t.frames_since_update == age]
            for age in range(1, self.config.max_age + 1)
        ]
        levels.append(tentative)
        for level in levels:
            if not unmatched:
                break
            candidates = [detections[i] for i in unmatched]
            matches, leftover_local = self._associate(level, candidates)
            all_matches.extend((t, unmatched[i]) for t, i in matches)
            unmatched = [unmatched[i] for i in leftover_local]

        matched_tracks = {t.track_id for t, _ in all_matches}
        for track, det_index in all_matches:
            det = detections[det_index]
            track.update(self.kf, det.bbox, det.feature)
        for track in self.tracks:
            if track.track_id not in matched_tracks:
                track.mark_missed()
        for det_index in unmatched:
            self._new_track(detections[det_index], frame_index)

        emissions = [
            TrackEmission(frame_index, t.track_id, tuple(float(v) for v in t.state.bbox), "match")
            for t in self.tracks
            if t.is_confirmed and t.track_id in matched_tracks
        ]

        self._update_roi(frame_index, matched_tracks, backup, emissions)
        self.tracks = [t for t in self.tracks if not t.is_deleted]
        emissions.sort(key=lambda e: e.track_id)
        return emissions

    def _update_roi(self, frame_index, matched_tracks, backup, emissions) -> None:
        if self.roi_seed_bbox is not None and self.roi_id is None:
            try:
                self.roi_id = select_runner_of_interest(self.tracks, self.roi_seed_bbox)
            except ValueError:
                return  # nothing confirmed overlaps the seed yet; keep waiting
        if self.roi_id is None:
            return
        roi = next((t for t in self.tracks if t.track_id == self.roi_id), None)
        if roi is None or roi.is_deleted:
            return
        if roi.track_id in matched_tracks:
            if backup is not None:
                backup.observe(frame_index, roi.last_bbox)
        elif backup is not None and roi.is_confirmed:
            proposal = backup.propose(frame_index)
            if proposal is not None:
                roi.update_backup(self.kf, proposal, self.config.backup_noise_scale)
                emissions.append(
                    TrackEmission(
                        frame_index,
                        roi.track_id,
                        tuple(float(v) for v in roi.state.bbox),
                        "backup",
                    )
                )


def run_sequence(
    frames: dict[int, list[Detection]],
    config: TrackerConfig | None = None,
    roi_seed_bbox=None,
    backup: BackupTracker | None = None,
) -> tuple[Tracker, list[TrackEmission]]:
    """Run a tracker over a whole frame-indexed detection map.

    Every frame index from the minimum to the maximum key is stepped, with an
    empty detection list for gaps, so dropout frames still advance the
    filter.
    """
    tracker = Tracker(config, roi_seed_bbox=roi_seed_bbox)
    emissions: list[TrackEmission] = []
    if frames:
        lo, hi = min(frames), max(frames)
        for frame_index in range(lo, hi + 1):
            emissions.extend(tracker.step(frame_index, frames.get(frame_index, []), backup))
    return tracker, emissions
