"""Gradient-boosted trees with softmax cross-entropy loss.

Each round fits one regression tree per class to the negative gradient of
the multiclass cross-entropy (g = p - onehot, h = p(1-p)); leaf values take
a single Newton step -G/(H+lam).  Raw scores start at zero and accumulate
learning_rate * leaf value, so predict_proba is softmax over the summed
tree outputs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._split import apply_tree, grow_gradient_tree, presort_features
from .base import TrainedModel, cross_entropy, extract_xy, make_rng, one_hot, softmax


@dataclass(frozen=True)
class BoostedEnsembleParams:
    n_rounds: int = 200
    max_depth: int = 7
    learning_rate: float = 0.1
    l2: float = 1.0
    min_samples_leaf: int = 1
    feature_subsample: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if self.n_rounds < 1:
            raise ValueError("n_rounds must be >= 1")
        if self.max_depth < 1:
            raise ValueError("max_depth must be >= 1")
        if not 0.0 < self.learning_rate <= 1.0:
            raise ValueError("learning_rate must be in (0, 1]")
        if self.l2 < 0:
            raise ValueError("l2 must be >= 0")
        if self.min_samples_leaf < 1:
            raise ValueError("min_samples_leaf must be >= 1")
        if not 0.0 < self.feature_subsample <= 1.0:
            raise ValueError("feature_subsample must be in (0, 1]")


class BoostedTreesModel(TrainedModel):
    kind = "boosted"

    def __init__(self, C, feature_dim, params: BoostedEnsembleParams, trees, loss_history):
        super().__init__(C, feature_dim)
        self.params = params
        # trees[round][class] = (feature, threshold, value) heap arrays
        self.trees = trees
        self.loss_history = loss_history

    def raw_margin(self, x) -> np.ndarray:
        X, single = self._check_input(x)
        raw = self._raw(X)
        return raw[0] if single else raw

    def _raw(self, X: np.ndarray) -> np.ndarray:
        raw = np.zeros((X.shape[0], self.C))
        lr = self.params.learning_rate
        for per_class in self.trees:
            for k, (feature, threshold, value) in enumerate(per_class):
                leaves = apply_tree(X, feature, threshold)
                raw[:, k] += lr * value[leaves]
        return raw

    def _proba(self, X: np.ndarray) -> np.ndarray:
        return softmax(self._raw(X))

    def payload(self) -> dict:
        return {
            "params": {
                "n_rounds": self.params.n_rounds,
                "max_depth": self.params.max_depth,
                "learning_rate": self.params.learning_rate,
                "l2": self.params.l2,
                "min_samples_leaf": self.params.min_samples_leaf,
                "feature_subsample": self.params.feature_subsample,
                "seed": self.params.seed,
            },
            "loss_history": list(self.loss_history),
            "trees": [
                [
                    {
                        "feature": feature.tolist(),
                        "threshold": threshold.tolist(),
                        "value": value.tolist(),
                    }
                    for feature, threshold, value in per_class
                ]
                for per_class in self.trees
            ],
        }

    @classmethod
    def from_payload(cls, payload: dict) -> "BoostedTreesModel":
        params = BoostedEnsembleParams(**payload["params"])
        trees = [
            [
                (
                    np.asarray(t["feature"], dtype=np.int64),
                    np.asarray(t["threshold"], dtype=np.float64),
                    np.asarray(t["value"], dtype=np.float64),
                )
                for t in per_class
            ]
            for per_class in payload["trees"]
        ]
        return cls(payload["C"], payload["feature_dim"], params, trees, payload["loss_history"])


def train_boosted(data, params: BoostedEnsembleParams | None = None, C: int | None = None) -> BoostedTreesModel:
    """Fit the boosted ensemble; deterministic for a given params.seed."""
    params = params or BoostedEnsembleParams()
    X, y0, C = extract_xy(data, C)
    n, F = X.shape
    sorted_idx = presort_features(X)
    onehot = one_hot(y0, C)
    rng = make_rng(params.seed)
    n_sub = max(1, int(round(params.feature_subsample * F)))

    raw = np.zeros((n, C))
    trees = []
    loss_history = [cross_entropy(softmax(raw), y0)]
    for _ in range(params.n_rounds):
        proba = softmax(raw)
        grad = proba - onehot
        hess = proba * (1.0 - proba)
        if n_sub < F:
            candidates = np.sort(rng.permutation(F)[:n_sub]).astype(np.int64)
        else:
            candidates = np.arange(F, dtype=np.int64)
        per_class = []
        for k in range(C):
            feature, threshold, value = grow_gradient_tree(
                X,
                sorted_idx,
                np.ascontiguousarray(grad[:, k]),
                np.ascontiguousarray(hess[:, k]),
                candidates,
                params.max_depth,
                params.l2,
                params.min_samples_leaf,
            )
            leaves = apply_tree(X, feature, threshold)
            raw[:, k] += params.learning_rate * value[leaves]
            per_class.append((feature, threshold, value))
        trees.append(per_class)
        loss_history.append(cross_entropy(softmax(raw), y0))

    return BoostedTreesModel(C, F, params, trees, loss_history)
