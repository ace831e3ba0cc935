"""Baseline classifiers: decision tree, random forest, logistic regression,
linear SVM, plus the dispatcher that trains any model kind by name."""

from __future__ import annotations

import numpy as np

from ..perf import CategoryLabel
from ._split import apply_tree, grow_gini_tree, presort_features
from .base import MODEL_KINDS, TrainedModel, extract_xy, make_rng, one_hot, softmax
from .boosting import BoostedEnsembleParams, train_boosted


class DecisionTreeModel(TrainedModel):
    kind = "decision_tree"

    def __init__(self, C, feature_dim, feature, threshold, counts):
        super().__init__(C, feature_dim)
        self.feature = np.asarray(feature, dtype=np.int64)
        self.threshold = np.asarray(threshold, dtype=np.float64)
        self.counts = np.asarray(counts, dtype=np.float64)  # (heap, C) leaf counts

    def _proba(self, X: np.ndarray) -> np.ndarray:
        leaves = apply_tree(X, self.feature, self.threshold)
        counts = self.counts[leaves]
        return counts / counts.sum(axis=1, keepdims=True)

    def payload(self) -> dict:
        return {
            "feature": self.feature.tolist(),
            "threshold": self.threshold.tolist(),
            "counts": self.counts.tolist(),
        }

    @classmethod
    def from_payload(cls, payload: dict) -> "DecisionTreeModel":
        return cls(
            payload["C"],
            payload["feature_dim"],
            payload["feature"],
            payload["threshold"],
            payload["counts"],
        )


def train_decision_tree(data, max_depth: int = 12, min_samples_leaf: int = 1,
                        C: int | None = None) -> DecisionTreeModel:
    if max_depth < 1:
        raise ValueError("max_depth must be >= 1")
    X, y0, C = extract_xy(data, C)
    sorted_idx = presort_features(X)
    candidates = np.arange(X.shape[1], dtype=np.int64)
    feature, threshold, counts = grow_gini_tree(
        X, sorted_idx, y0, C, candidates, max_depth, min_samples_leaf
    )
    return DecisionTreeModel(C, X.shape[1], feature, threshold, counts)


class RandomForestModel(TrainedModel):
    kind = "random_forest"

    def __init__(self, C, feature_dim, trees):
        super().__init__(C, feature_dim)
        self.trees = trees  # list of (feature, threshold, counts)

    def _proba(self, X: np.ndarray) -> np.ndarray:
        total = np.zeros((X.shape[0], self.C))
        for feature, threshold, counts in self.trees:
            leaves = apply_tree(X, feature, threshold)
            picked = counts[leaves]
            total += picked / picked.sum(axis=1, keepdims=True)
        return total / len(self.trees)

    def payload(self) -> dict:
        return {
            "trees": [
                {
                    "feature": feature.tolist(),
                    "threshold": threshold.tolist(),
                    "counts": counts.tolist(),
                }
                for feature, threshold, counts in self.trees
            ],
        }

    @classmethod
    def from_payload(cls, payload: dict) -> "RandomForestModel":
        trees = [
            (
                np.asarray(t["feature"], dtype=np.int64),
                np.asarray(t["threshold"], dtype=np.float64),
                np.asarray(t["counts"], dtype=np.float64),
            )
            for t in payload["trees"]
        ]
        return cls(payload["C"], payload["feature_dim"], trees)


def train_random_forest(
    data,
    n_trees: int = 100,
    max_depth: int = 12,
    min_samples_leaf: int = 1,
    bootstrap: bool = True,
    feature_fraction: float | None = None,
    seed: int = 0,
    C: int | None = None,
) -> RandomForestModel:
    """Bagged Gini trees; each tree sees a bootstrap sample and a random
    feature subset (default sqrt(F) features per tree)."""
    if n_trees < 1:
        raise ValueError("n_trees must be >= 1")
    if max_depth < 1:
        raise ValueError("max_depth must be >= 1")
    if feature_fraction is not None and not 0.0 < feature_fraction <= 1.0:
        raise ValueError("feature_fraction must be in (0, 1]")
    X, y0, C = extract_xy(data, C)
    n, F = X.shape
    n_feat = int(round(np.sqrt(F))) if feature_fraction is None else max(
        1, int(round(feature_fraction * F))
    )
    n_feat = min(max(n_feat, 1), F)
    rng = make_rng(seed)
    trees = []
    for _ in range(n_trees):
        if bootstrap:
            rows = rng.integers(0, n, size=n)
            Xb = np.ascontiguousarray(X[rows])
            yb = y0[rows]
        else:
            Xb, yb = X, y0
        if n_feat < F:
            candidates = np.sort(rng.permutation(F)[:n_feat]).astype(np.int64)
        else:
            candidates = np.arange(F, dtype=np.int64)
        sorted_idx = presort_features(Xb)
        feature, threshold, counts = grow_gini_tree(
            Xb, sorted_idx, yb, C, candidates, max_depth, min_samples_leaf
        )
        trees.append((feature, threshold, counts))
    return RandomForestModel(C, F, trees)


class LogisticRegressionModel(TrainedModel):
    kind = "logistic_regression"

    def __init__(self, C, feature_dim, weights, bias):
        super().__init__(C, feature_dim)
        self.weights = np.asarray(weights, dtype=np.float64)  # (F, C)
        self.bias = np.asarray(bias, dtype=np.float64)        # (C,)

    def _proba(self, X: np.ndarray) -> np.ndarray:
        return softmax(X @ self.weights + self.bias)

    def payload(self) -> dict:
        return {"weights": self.weights.tolist(), "bias": self.bias.tolist()}

    @classmethod
    def from_payload(cls, payload: dict) -> "LogisticRegressionModel":
        return cls(payload["C"], payload["feature_dim"], payload["weights"], payload["bias"])


def train_logistic_regression(
    data,
    step_size: float = 0.5,
    n_iters: int = 300,
    l2: float = 1e-3,
    C: int | None = None,
) -> LogisticRegressionModel:
    """Full-batch gradient descent on softmax cross-entropy with L2."""
    if step_size <= 0 or n_iters < 1 or l2 < 0:
        raise ValueError("step_size must be > 0, n_iters >= 1, l2 >= 0")
    X, y0, C = extract_xy(data, C)
    n, F = X.shape
    onehot = one_hot(y0, C)
    W = np.zeros((F, C))
    b = np.zeros(C)
    for _ in range(n_iters):
        err = softmax(X @ W + b) - onehot
        W -= step_size * (X.T @ err / n + l2 * W)
        b -= step_size * err.mean(axis=0)
    return LogisticRegressionModel(C, F, W, b)


class LinearSVMModel(TrainedModel):
    kind = "linear_svm"

    def __init__(self, C, feature_dim, weights, bias):
        super().__init__(C, feature_dim)
        self.weights = np.asarray(weights, dtype=np.float64)  # (F, C)
        self.bias = np.asarray(bias, dtype=np.float64)        # (C,)

    def decision_function(self, x) -> np.ndarray:
        X, single = self._check_input(x)
        margins = X @ self.weights + self.bias
        return margins[0] if single else margins

    def _proba(self, X: np.ndarray) -> np.ndarray:
        # hinge margins carry no calibrated probability; softmax over the
        # one-vs-rest margins gives a valid simplex point for ranking
        return softmax(X @ self.weights + self.bias)

    def payload(self) -> dict:
        return {"weights": self.weights.tolist(), "bias": self.bias.tolist()}

    @classmethod
    def from_payload(cls, payload: dict) -> "LinearSVMModel":
        return cls(payload["C"], payload["feature_dim"], payload["weights"], payload["bias"])


def train_linear_svm(
    data,
    step_size: float = 0.1,
    n_iters: int = 500,
    l2: float = 1e-3,
    C: int | None = None,
) -> LinearSVMModel:
    """One-vs-rest hinge loss by full-batch subgradient descent."""
    if step_size <= 0 or n_iters < 1 or l2 < 0:
        raise ValueError("step_size must be > 0, n_iters >= 1, l2 >= 0")
    X, y0, C = extract_xy(data, C)
    n, F = X.shape
    signs = 2.0 * one_hot(y0, C) - 1.0  # (n, C) in {-1, +1}
    W = np.zeros((F, C))
    b = np.zeros(C)
    for _ in range(n_iters):
        margins = X @ W + b
        active = (margins * signs < 1.0).astype(np.float64) * signs
        W -= step_size * (l2 * W - X.T @ active / n)
        b -= step_size * (-active.mean(axis=0))
    return LinearSVMModel(C, F, W, b)


def train_baseline(kind: str, data, C: int | None = None, **hyperparams) -> TrainedModel:
    """Train one of the four baseline kinds by name."""
    trainers = {
        "decision_tree": train_decision_tree,
        "random_forest": train_random_forest,
        "logistic_regression": train_logistic_regression,
        "linear_svm": train_linear_svm,
    }
    if kind not in trainers:
        raise ValueError(f"unknown baseline kind {kind!r}; expected one of {sorted(trainers)}")
    return trainers[kind](data, C=C, **hyperparams)


def train_model(kind: str, data, C: int | None = None, **hyperparams) -> TrainedModel:
    """Train any model kind, boosted ensemble included."""
    if kind == "boosted":
        params = BoostedEnsembleParams(**hyperparams) if hyperparams else None
        return train_boosted(data, params, C=C)
    if kind not in MODEL_KINDS:
        raise ValueError(f"unknown model kind {kind!r}; expected one of {sorted(MODEL_KINDS)}")
    return train_baseline(kind, data, C=C, **hyperparams)


def predict(model: TrainedModel, x) -> CategoryLabel:
    """Label for a single example, ties to the lower label."""
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim != 1:
        raise ValueError(f"expected a single feature vector, got shape {arr.shape}")
    return CategoryLabel(model.predict(arr), model.C)


def predict_proba(model: TrainedModel, x) -> np.ndarray:
    """Class-probability vector for a single example."""
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim != 1:
        raise ValueError(f"expected a single feature vector, got shape {arr.shape}")
    return model.predict_proba(arr)
