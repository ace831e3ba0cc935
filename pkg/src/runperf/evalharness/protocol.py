"""Repeated stratified cross-validation protocol.

Each of ``iterations`` iterations reshuffles the data into ``folds``
stratified folds, trains on k-1 folds and tests on the held-out fold,
cycling all folds.  Iteration accuracy is the unweighted mean of its fold
accuracies; the report carries mean and population std across iterations in
percent, the confusion matrix pooled over every test prediction, and ROC
curves over the pooled class probabilities.

Per-iteration seeds derive from the master seed and the iteration index
alone, so iterations are order-independent: sequential and thread-parallel
runs produce byte-identical reports.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ..learners.base import MODEL_KINDS
from ..learners.baselines import train_model
from ..perf import DatasetSlice
from .folds import stratified_kfold
from .metrics import confusion_matrix, roc_analysis

TASKS = ("current", "next")


@dataclass(frozen=True)
class ProtocolConfig:
    iterations: int = 100
    folds: int = 4
    master_seed: int = 0
    classifier: str = "logistic_regression"
    classifier_params: dict = field(default_factory=dict)
    C: int = 2
    task: str = "current"
    rp_ids: tuple = ()
    context_mode: str = "raw"
    std_mode: str = "population"  # or "sample"

    def __post_init__(self):
        if self.iterations < 1:
            raise ValueError("iterations must be >= 1")
        if self.folds < 2:
            raise ValueError("folds must be >= 2")
        if self.classifier not in MODEL_KINDS:
            raise ValueError(
                f"unknown classifier {self.classifier!r}; expected one of {sorted(MODEL_KINDS)}"
            )
        if self.task not in TASKS:
            raise ValueError(f"task must be one of {TASKS}, got {self.task!r}")
        if self.std_mode not in ("population", "sample"):
            raise ValueError(f"std_mode must be 'population' or 'sample', got {self.std_mode!r}")

    def to_dict(self) -> dict:
        return {
            "iterations": self.iterations,
            "folds": self.folds,
            "master_seed": self.master_seed,
            "classifier": self.classifier,
            "classifier_params": dict(self.classifier_params),
            "C": self.C,
            "task": self.task,
            "rp_ids": list(self.rp_ids),
            "context_mode": self.context_mode,
            "std_mode": self.std_mode,
        }


@dataclass
class EvalReport:
    config: dict
    accuracy_mean: float            # percent, across iterations
    accuracy_std: float             # percent, across iterations
    fold_accuracy_std: float        # percent, across all iteration x fold cells
    iteration_accuracies: list      # percent, one per iteration
    pooled_accuracy: float          # percent, trace/total of the pooled confusion
    confusion: list                 # C x C pooled counts
    per_iteration_confusion: list   # list of C x C counts
    roc: dict                       # {"auc": float, "curves": [...]}

    def to_dict(self) -> dict:
        return {
            "config": self.config,
            "accuracy_mean": self.accuracy_mean,
            "accuracy_std": self.accuracy_std,
            "fold_accuracy_std": self.fold_accuracy_std,
            "iteration_accuracies": self.iteration_accuracies,
            "pooled_accuracy": self.pooled_accuracy,
            "confusion": self.confusion,
            "per_iteration_confusion": self.per_iteration_confusion,
            "roc": self.roc,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))


def _iteration_seed_sequence(master_seed: int, iteration: int) -> np.random.SeedSequence:
    return np.random.SeedSequence(master_seed, spawn_key=(iteration,))


def _run_iteration(X: np.ndarray, y: np.ndarray, config: ProtocolConfig, iteration: int):
    seq = _iteration_seed_sequence(config.master_seed, iteration)
    rng = np.random.Generator(np.random.PCG64(seq))
    folds = stratified_kfold(y, config.folds, rng)
    # skip the words PCG64 seeds from, so model seeds are not reused state
    fold_seeds = seq.generate_state(config.folds + 4)[4:]

    fold_accuracies = []
    y_true_parts, y_pred_parts, proba_parts = [], [], []
    for f, test_idx in enumerate(folds):
        train_mask = np.ones(len(y), dtype=bool)
        train_mask[test_idx] = False
        params = dict(config.classifier_params)
        if config.classifier in ("boosted", "random_forest") and "seed" not in params:
            params["seed"] = int(fold_seeds[f])
        model = train_model(
            config.classifier, (X[train_mask], y[train_mask]), C=config.C, **params
        )
        proba = model.predict_proba(X[test_idx])
        pred = np.argmax(proba, axis=1) + 1
        fold_accuracies.append(float(np.mean(pred == y[test_idx])))
        y_true_parts.append(y[test_idx])
        y_pred_parts.append(pred)
        proba_parts.append(proba)

    y_true = np.concatenate(y_true_parts)
    y_pred = np.concatenate(y_pred_parts)
    return (
        np.array(fold_accuracies),
        confusion_matrix(y_true, y_pred, config.C),
        y_true,
        np.concatenate(proba_parts),
    )


def run_protocol(data: DatasetSlice | tuple, config: ProtocolConfig, workers: int | None = None) -> EvalReport:
    """Run the full protocol; ``workers`` > 1 evaluates iterations in threads."""
    if hasattr(data, "X") and hasattr(data, "y"):
        X = np.asarray(data.X, dtype=np.float64)
        y = np.asarray(data.y, dtype=np.int64)
        if data.C != config.C:
            raise ValueError(f"dataset has C={data.C} but the protocol expects C={config.C}")
    else:
        X, y = data
        X = np.asarray(X, dtype=np.float64)
        y = np.asarray(y, dtype=np.int64)

    indices = range(config.iterations)
    if workers is not None and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda it: _run_iteration(X, y, config, it), indices))
    else:
        results = [_run_iteration(X, y, config, it) for it in indices]

    iter_accuracies = np.array([res[0].mean() for res in results])
    all_fold_accuracies = np.concatenate([res[0] for res in results])
    pooled_confusion = np.zeros((config.C, config.C), dtype=np.int64)
    for res in results:
        pooled_confusion += res[1]
    pooled_y = np.concatenate([res[2] for res in results])
    pooled_proba = np.vstack([res[3] for res in results])

    ddof = 0 if config.std_mode == "population" or config.iterations < 2 else 1
    total = int(pooled_confusion.sum())
    return EvalReport(
        config=config.to_dict(),
        accuracy_mean=float(iter_accuracies.mean() * 100.0),
        accuracy_std=float(iter_accuracies.std(ddof=ddof) * 100.0),
        fold_accuracy_std=float(all_fold_accuracies.std(ddof=ddof) * 100.0),
        iteration_accuracies=[float(a * 100.0) for a in iter_accuracies],
        pooled_accuracy=float(np.trace(pooled_confusion) / total * 100.0),
        confusion=pooled_confusion.tolist(),
        per_iteration_confusion=[res[1].tolist() for res in results],
        roc=roc_analysis(pooled_proba, pooled_y, config.C),
    )
