"""Versioned JSON model serialization.

The encoding is canonical (sorted keys, compact separators, shortest
round-trip float repr), so training with the same data and seed yields
byte-identical files on any platform.
"""

from __future__ import annotations

import json
from pathlib import Path

from .base import TrainedModel
from .baselines import (
    DecisionTreeModel,
    LinearSVMModel,
    LogisticRegressionModel,
    RandomForestModel,
)
from .boosting import BoostedTreesModel

MODEL_FORMAT = "runperf-model"
MODEL_VERSION = 1

_REGISTRY = {
    cls.kind: cls
    for cls in (
        BoostedTreesModel,
        DecisionTreeModel,
        RandomForestModel,
        LogisticRegressionModel,
        LinearSVMModel,
    )
}


def model_to_dict(model: TrainedModel) -> dict:
    return {
        "format": MODEL_FORMAT,
        "version": MODEL_VERSION,
        "kind": model.kind,
        "C": model.C,
        "feature_dim": model.feature_dim,
        "payload": model.payload(),
    }


def model_to_json(model: TrainedModel) -> str:
    return json.dumps(model_to_dict(model), sort_keys=True, separators=(",", ":"))


def save_model(path, model: TrainedModel) -> None:
    Path(path).write_text(model_to_json(model) + "\n", encoding="utf-8")


def model_from_dict(doc: dict) -> TrainedModel:
    if doc.get("format") != MODEL_FORMAT:
        raise ValueError(f"not a model file (format={doc.get('format')!r})")
    if doc.get("version") != MODEL_VERSION:
        raise ValueError(f"unsupported model version {doc.get('version')!r}")
    kind = doc.get("kind")
    if kind not in _REGISTRY:
        raise ValueError(f"unknown model kind {kind!r}")
    payload = dict(doc["payload"])
    payload["C"] = doc["C"]
    payload["feature_dim"] = doc["feature_dim"]
    return _REGISTRY[kind].from_payload(payload)


def load_model(path) -> TrainedModel:
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    return model_from_dict(doc)
