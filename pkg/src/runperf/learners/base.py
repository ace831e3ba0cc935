"""Shared model plumbing: input checks, softmax, the prediction contract."""

from __future__ import annotations

import numpy as np

MODEL_KINDS = (
    "boosted",
    "decision_tree",
    "random_forest",
    "logistic_regression",
    "linear_svm",
)


def softmax(raw: np.ndarray) -> np.ndarray:
    raw = np.asarray(raw, dtype=np.float64)
    shifted = raw - raw.max(axis=-1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=-1, keepdims=True)


def cross_entropy(proba: np.ndarray, y0: np.ndarray) -> float:
    """Mean negative log-likelihood; y0 holds 0-based class indices."""
    picked = proba[np.arange(len(y0)), y0]
    return float(-np.mean(np.log(np.clip(picked, 1e-300, None))))


def one_hot(y0: np.ndarray, n_classes: int) -> np.ndarray:
    out = np.zeros((len(y0), n_classes))
    out[np.arange(len(y0)), y0] = 1.0
    return out


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))


class TrainedModel:
    """Base classifier: labels are 1..C, probabilities sum to 1.

    Subclasses implement ``_proba(X)`` over a validated 2-D batch; the
    argmax tie-break is always the lowest label.
    """

    kind: str = ""

    def __init__(self, C: int, feature_dim: int):
        self.C = int(C)
        self.feature_dim = int(feature_dim)

    def _check_input(self, x) -> tuple[np.ndarray, bool]:
        arr = np.asarray(x, dtype=np.float64)
        single = arr.ndim == 1
        if single:
            arr = arr[None, :]
        if arr.ndim != 2 or arr.shape[1] != self.feature_dim:
            raise ValueError(
                f"expected {self.feature_dim} features, got input of shape {np.shape(x)}"
            )
        if not np.all(np.isfinite(arr)):
            raise ValueError("input contains non-finite values")
        return np.ascontiguousarray(arr), single

    def _proba(self, X: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def predict_proba(self, x) -> np.ndarray:
        X, single = self._check_input(x)
        proba = self._proba(X)
        return proba[0] if single else proba

    def predict(self, x):
        X, single = self._check_input(x)
        labels = np.argmax(self._proba(X), axis=1) + 1
        return int(labels[0]) if single else labels

    def payload(self) -> dict:
        """JSON-ready parameters; inverse of ``from_payload``."""
        raise NotImplementedError

    @classmethod
    def from_payload(cls, payload: dict) -> "TrainedModel":
        raise NotImplementedError


def extract_xy(data, C: int | None = None) -> tuple[np.ndarray, np.ndarray, int]:
    """Accept a DatasetSlice or an (X, labels) pair; labels are 1..C.

    Returns float64 X, 0-based int64 class indices, and the class count.
    """
    if hasattr(data, "X") and hasattr(data, "y"):
        X = np.asarray(data.X, dtype=np.float64)
        y = np.asarray(data.y, dtype=np.int64)
        if C is None:
            C = int(getattr(data, "C", y.max()))
    else:
        X, y = data
        X = np.asarray(X, dtype=np.float64)
        y = np.asarray(y, dtype=np.int64)
        if C is None:
            C = int(y.max())
    if X.ndim != 2:
        raise ValueError(f"X must be 2-D, got shape {X.shape}")
    if len(X) != len(y):
        raise ValueError(f"{len(X)} rows but {len(y)} labels")
    if len(X) < 2:
        raise ValueError("need at least 2 training examples")
    if y.min() < 1 or y.max() > C:
        raise ValueError(f"labels must lie in [1, {C}], got [{y.min()}, {y.max()}]")
    if len(np.unique(y)) < 2:
        raise ValueError("training data contains a single class")
    return np.ascontiguousarray(X), y - 1, C
