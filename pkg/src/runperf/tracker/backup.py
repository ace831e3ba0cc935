"""Backup single-target trackers for frames where detection drops out.

A backup tracker watches the runner of interest.  Whenever the main pipeline
has a confident box it calls :meth:`BackupTracker.observe`; when detection
fails it asks :meth:`BackupTracker.propose` for a candidate box.  Proposals
are only trusted while they overlap the last accepted box (IoU at least
``min_iou``), after which the backup is considered lost until re-seeded.
"""

from __future__ import annotations

import abc

import numpy as np


def bbox_iou(a, b) -> float:
    """IoU of two (cx, cy, w, h) boxes."""
    acx, acy, aw, ah = (float(v) for v in a)
    bcx, bcy, bw, bh = (float(v) for v in b)
    ax1, ay1, ax2, ay2 = acx - aw / 2, acy - ah / 2, acx + aw / 2, acy + ah / 2
    bx1, by1, bx2, by2 = bcx - bw / 2, bcy - bh / 2, bcx + bw / 2, bcy + bh / 2
    iw = min(ax2, bx2) - max(ax1, bx1)
    ih = min(ay2, by2) - max(ay1, by1)
    if iw <= 0 or ih <= 0:
        return 0.0
    inter = iw * ih
    union = aw * ah + bw * bh - inter
    if union <= 0:
        return 0.0
    return inter / union


def iou_matrix(boxes_a, boxes_b) -> np.ndarray:
    out = np.zeros((len(boxes_a), len(boxes_b)))
    for i, a in enumerate(boxes_a):
        for j, b in enumerate(boxes_b):
            out[i, j] = bbox_iou(a, b)
    return out


class BackupTracker(abc.ABC):
    """Interface for pluggable single-target fallback trackers."""

    @abc.abstractmethod
    def observe(self, frame_index: int, bbox) -> None:
        """Record a trusted box for the target at ``frame_index``."""

    @abc.abstractmethod
    def propose(self, frame_index: int):
        """Return a candidate (cx, cy, w, h) for ``frame_index`` or None."""


class ConstantVelocityBackup(BackupTracker):
    """Extrapolates the last two observed boxes at constant velocity.

    Velocity is anchored to the last two real observations.  A proposal is
    accepted only while it overlaps the last known box (the most recent
    observation, or the previously accepted proposal once a gap has begun)
    with IoU at least ``min_iou``; an accepted proposal becomes the new last
    known box, so steady extrapolation can carry a long gap while a single
    wild jump ends the takeover.
    """

    def __init__(self, min_iou: float = 0.1):
        self.min_iou = min_iou
        self._last: tuple[int, np.ndarray] | None = None
        self._prev: tuple[int, np.ndarray] | None = None
        self._reference: np.ndarray | None = None

    def observe(self, frame_index: int, bbox) -> None:
        box = np.array([float(v) for v in bbox])
        self._prev = self._last
        self._last = (frame_index, box)
        self._reference = box

    def propose(self, frame_index: int):
        if self._last is None or self._reference is None:
            return None
        last_frame, last_box = self._last
        if self._prev is None:
            candidate = last_box.copy()
        else:
            prev_frame, prev_box = self._prev
            span = last_frame - prev_frame
            if span <= 0:
                candidate = last_box.copy()
            else:
                velocity = (last_box - prev_box) / span
                candidate = last_box + velocity * (frame_index - last_frame)
        if candidate[2] <= 0 or candidate[3] <= 0:
            return None
        if bbox_iou(candidate, self._reference) < self.min_iou:
            return None
        self._reference = candidate.copy()
        return candidate
