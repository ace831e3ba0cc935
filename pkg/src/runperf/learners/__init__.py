"""From-scratch classifiers over clip embeddings: gradient-boosted trees
and the four baselines (decision tree, random forest, logistic regression,
linear SVM), with canonical JSON serialization."""

from .base import MODEL_KINDS, TrainedModel, cross_entropy, one_hot, softmax
from .baselines import (
    DecisionTreeModel,
    LinearSVMModel,
    LogisticRegressionModel,
    RandomForestModel,
    predict,
    predict_proba,
    train_baseline,
    train_decision_tree,
    train_linear_svm,
    train_logistic_regression,
    train_model,
    train_random_forest,
)
from .boosting import BoostedEnsembleParams, BoostedTreesModel, train_boosted
from .serialize import load_model, model_to_dict, model_to_json, save_model

__all__ = [
    "MODEL_KINDS",
    "TrainedModel",
    "cross_entropy",
    "one_hot",
    "softmax",
    "DecisionTreeModel",
    "LinearSVMModel",
    "LogisticRegressionModel",
    "RandomForestModel",
    "predict",
    "predict_proba",
    "train_baseline",
    "train_decision_tree",
    "train_linear_svm",
    "train_logistic_regression",
    "train_model",
    "train_random_forest",
    "BoostedEnsembleParams",
    "BoostedTreesModel",
    "train_boosted",
    "load_model",
    "model_to_dict",
    "model_to_json",
    "save_model",
]
