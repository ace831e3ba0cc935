"""Evaluation protocol: repeated stratified k-fold cross-validation with
accuracy aggregation, confusion matrices, ROC curves, and ablation tables."""

from .ablation import AblationRow, ablation_csv, ablation_table, format_cell
from .folds import stratified_kfold
from .metrics import ROCCurve, confusion_matrix, roc_analysis, roc_curve
from .plots import save_confusion_svg, save_roc_svg
from .protocol import TASKS, EvalReport, ProtocolConfig, run_protocol

__all__ = [
    "AblationRow",
    "ablation_csv",
    "ablation_table",
    "format_cell",
    "stratified_kfold",
    "ROCCurve",
    "confusion_matrix",
    "roc_analysis",
    "roc_curve",
    "save_confusion_svg",
    "save_roc_svg",
    "TASKS",
    "EvalReport",
    "ProtocolConfig",
    "run_protocol",
]
