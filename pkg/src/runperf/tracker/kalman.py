"""Constant-velocity Kalman filter over (cx, cy, aspect, height) boxes.

State is the 8-vector (cx, cy, a, h, vcx, vcy, va, vh) with a = w/h.  Noise
standard deviations scale with box height: ``pos_std_weight * h`` for the
measured quantities and ``vel_std_weight * h`` for the velocities.  The
update uses the Joseph form so covariances stay symmetric PSD across long
predict/update chains.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# 0.95 quantile of chi-square with 4 degrees of freedom
CHI2_GATE_4DOF = 9.4877

STATE_DIM = 8
MEAS_DIM = 4


@dataclass
class KalmanState:
    mean: np.ndarray         # (8,)
    covariance: np.ndarray   # (8, 8)

    def __post_init__(self):
        self.mean = np.asarray(self.mean, dtype=np.float64).reshape(STATE_DIM)
        self.covariance = np.asarray(self.covariance, dtype=np.float64).reshape(
            STATE_DIM, STATE_DIM
        )

    @property
    def bbox(self) -> np.ndarray:
        """Current (cx, cy, w, h)."""
        cx, cy, a, h = self.mean[:4]
        return np.array([cx, cy, a * h, h])


def bbox_to_measurement(bbox) -> np.ndarray:
    cx, cy, w, h = (float(v) for v in bbox)
    if w <= 0 or h <= 0:
        raise ValueError(f"measurement needs positive width/height, got w={w}, h={h}")
    return np.array([cx, cy, w / h, h])


def mahalanobis_squared(mean: np.ndarray, covariance: np.ndarray, points: np.ndarray) -> np.ndarray:
    """Squared Mahalanobis distance of each row of ``points`` from ``mean``."""
    points = np.atleast_2d(np.asarray(points, dtype=np.float64))
    try:
        chol = np.linalg.cholesky(covariance)
    except np.linalg.LinAlgError as exc:
        raise ValueError("singular innovation covariance") from exc
    diff = points - np.asarray(mean, dtype=np.float64)
    z = np.linalg.solve(chol, diff.T)
    return np.sum(z * z, axis=0)


class KalmanFilter:
    def __init__(self, pos_std_weight: float = 1.0 / 20, vel_std_weight: float = 1.0 / 160):
        self.pos_std_weight = pos_std_weight
        self.vel_std_weight = vel_std_weight
        self._motion = np.eye(STATE_DIM)
        self._measure = np.eye(MEAS_DIM, STATE_DIM)

    def _motion_matrix(self, dt: float) -> np.ndarray:
        F = np.eye(STATE_DIM)
        for i in range(MEAS_DIM):
            F[i, MEAS_DIM + i] = dt
        return F

    def _process_noise(self, h: float, dt: float) -> np.ndarray:
        std = np.array(
            [
                self.pos_std_weight * h,
                self.pos_std_weight * h,
                1e-2,
                self.pos_std_weight * h,
                self.vel_std_weight * h,
                self.vel_std_weight * h,
                1e-5,
                self.vel_std_weight * h,
            ]
        )
        return np.diag(np.square(std)) * dt

    def _measurement_noise(self, h: float, noise_scale: float = 1.0) -> np.ndarray:
        std = noise_scale * np.array(
            [
                self.pos_std_weight * h,
                self.pos_std_weight * h,
                1e-1,
                self.pos_std_weight * h,
            ]
        )
        return np.diag(np.square(std))

    def initiate(self, bbox) -> KalmanState:
        z = bbox_to_measurement(bbox)
        mean = np.zeros(STATE_DIM)
        mean[:MEAS_DIM] = z
        h = z[3]
        std = np.array(
            [
                2 * self.pos_std_weight * h,
                2 * self.pos_std_weight * h,
                1e-2,
                2 * self.pos_std_weight * h,
                10 * self.vel_std_weight * h,
                10 * self.vel_std_weight * h,
                1e-5,
                10 * self.vel_std_weight * h,
            ]
        )
        return KalmanState(mean=mean, covariance=np.diag(np.square(std)))

    def predict(self, state: KalmanState, dt: float = 1.0) -> KalmanState:
        F = self._motion_matrix(dt)
        mean = F @ state.mean
        cov = F @ state.covariance @ F.T + self._process_noise(state.mean[3], dt)
        cov = 0.5 * (cov + cov.T)
        return KalmanState(mean=mean, covariance=cov)

    def project(self, state: KalmanState, noise_scale: float = 1.0) -> tuple[np.ndarray, np.ndarray]:
        """Predicted measurement mean and innovation covariance."""
        H = self._measure
        mean = H @ state.mean
        cov = H @ state.covariance @ H.T + self._measurement_noise(state.mean[3], noise_scale)
        return mean, 0.5 * (cov + cov.T)

    def update(self, state: KalmanState, bbox, noise_scale: float = 1.0) -> KalmanState:
        z = bbox_to_measurement(bbox)
        H = self._measure
        R = self._measurement_noise(state.mean[3], noise_scale)
        proj_mean, S = self.project(state, noise_scale)
        try:
            chol = np.linalg.cholesky(S)
        except np.linalg.LinAlgError as exc:
            raise ValueError("singular innovation covariance") from exc
        # gain = P H' S^-1 via two triangular solves
        PHt = state.covariance @ H.T
        gain = np.linalg.solve(chol.T, np.linalg.solve(chol, PHt.T)).T
        mean = state.mean + gain @ (z - proj_mean)
        ImKH = np.eye(STATE_DIM) - gain @ H
        cov = ImKH @ state.covariance @ ImKH.T + gain @ R @ gain.T
        cov = 0.5 * (cov + cov.T)
        return KalmanState(mean=mean, covariance=cov)

    def gating_distance(self, state: KalmanState, bboxes) -> np.ndarray:
        zs = np.array([bbox_to_measurement(b) for b in bboxes])
        mean, S = self.project(state)
        return mahalanobis_squared(mean, S, zs)

    def gate(self, state: KalmanState, bboxes, threshold: float = CHI2_GATE_4DOF) -> np.ndarray:
        """Boolean mask: True where a box is within the chi-square gate."""
        if len(bboxes) == 0:
            return np.zeros(0, dtype=bool)
        return self.gating_distance(state, bboxes) <= threshold
