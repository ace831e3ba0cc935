"""Tracking-by-detection: Kalman filtering, gated appearance association,
optimal assignment, track lifecycle, and backup-tracker fusion."""

from .assignment import GATED_COST, AssignmentResult, assign, solve
from .backup import BackupTracker, ConstantVelocityBackup, bbox_iou, iou_matrix
from .engine import (
    TrackEmission,
    Tracker,
    TrackerConfig,
    appearance_cost,
    run_sequence,
    select_runner_of_interest,
)
from .kalman import (
    CHI2_GATE_4DOF,
    KalmanFilter,
    KalmanState,
    bbox_to_measurement,
    mahalanobis_squared,
)
from .track import Track, TrackStatus

__all__ = [
    "GATED_COST",
    "AssignmentResult",
    "assign",
    "solve",
    "BackupTracker",
    "ConstantVelocityBackup",
    "bbox_iou",
    "iou_matrix",
    "TrackEmission",
    "Tracker",
    "TrackerConfig",
    "appearance_cost",
    "run_sequence",
    "select_runner_of_interest",
    "CHI2_GATE_4DOF",
    "KalmanFilter",
    "KalmanState",
    "bbox_to_measurement",
    "mahalanobis_squared",
    "Track",
    "TrackStatus",
]
