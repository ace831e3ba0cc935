"""Confusion matrices and ROC curves (trapezoid AUC, macro one-vs-rest)."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


def confusion_matrix(y_true, y_pred, C: int) -> np.ndarray:
    """C x C count matrix; rows are true classes, columns predictions."""
    y_true = np.asarray(y_true, dtype=np.int64)
    y_pred = np.asarray(y_pred, dtype=np.int64)
    if y_true.shape != y_pred.shape:
        raise ValueError(f"shape mismatch: {y_true.shape} vs {y_pred.shape}")
    for name, arr in (("true", y_true), ("predicted", y_pred)):
        if arr.size and (arr.min() < 1 or arr.max() > C):
            raise ValueError(f"{name} labels must lie in [1, {C}]")
    matrix = np.zeros((C, C), dtype=np.int64)
    np.add.at(matrix, (y_true - 1, y_pred - 1), 1)
    return matrix


@dataclass(frozen=True)
class ROCCurve:
    fpr: np.ndarray
    tpr: np.ndarray
    thresholds: np.ndarray
    auc: float


def roc_curve(scores, positive) -> ROCCurve:
    """ROC points at every distinct score, plus trapezoid AUC.

    ``positive`` is a boolean mask (or 0/1) over the same examples; a point
    (fpr, tpr) is produced per distinct score threshold, predicting positive
    at score >= threshold, with a leading (0, 0) at threshold +inf.
    """
    scores = np.asarray(scores, dtype=np.float64)
    positive = np.asarray(positive).astype(bool)
    if scores.shape != positive.shape or scores.ndim != 1:
        raise ValueError("scores and positive must be matching 1-D arrays")
    n_pos = int(positive.sum())
    n_neg = len(positive) - n_pos
    if n_pos == 0 or n_neg == 0:
        raise ValueError("ROC needs both classes present")

    order = np.argsort(-scores, kind="stable")
    sorted_scores = scores[order]
    pos_sorted = positive[order].astype(np.float64)
    tp = np.cumsum(pos_sorted)
    fp = np.cumsum(1.0 - pos_sorted)
    # keep the last index of each run of equal scores
    keep = np.r_[np.flatnonzero(np.diff(sorted_scores) != 0.0), len(sorted_scores) - 1]
    tpr = np.r_[0.0, tp[keep] / n_pos]
    fpr = np.r_[0.0, fp[keep] / n_neg]
    thresholds = np.r_[np.inf, sorted_scores[keep]]
    auc = float(np.sum(np.diff(fpr) * (tpr[1:] + tpr[:-1]) * 0.5))
    return ROCCurve(fpr=fpr, tpr=tpr, thresholds=thresholds, auc=auc)


def roc_analysis(proba: np.ndarray, y_true, C: int) -> dict:
    """ROC summary over class-probability rows.

    Binary: one curve, positive class = label C (the slowest category).
    C > 2: one one-vs-rest curve per class, AUC macro-averaged.
    """
    proba = np.asarray(proba, dtype=np.float64)
    y_true = np.asarray(y_true, dtype=np.int64)
    if proba.ndim != 2 or proba.shape[1] != C:
        raise ValueError(f"proba must be (n, {C}), got {proba.shape}")
    if proba.shape[0] != y_true.shape[0]:
        raise ValueError("proba and labels disagree on the number of examples")
    if C == 2:
        labels = [2]
    else:
        labels = list(range(1, C + 1))
    curves = []
    for label in labels:
        curve = roc_curve(proba[:, label - 1], y_true == label)
        curves.append((label, curve))
    auc = float(np.mean([c.auc for _, c in curves]))
    return {
        "auc": auc,
        "curves": [
            {
                "positive_label": label,
                "fpr": curve.fpr.tolist(),
                "tpr": curve.tpr.tolist(),
                "thresholds": [float(t) if np.isfinite(t) else None for t in curve.thresholds],
                "auc": curve.auc,
            }
            for label, curve in curves
        ],
    }
