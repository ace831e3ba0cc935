"""SVG plot emission for ROC curves and confusion matrices.

Rendering is deterministic: the SVG hash salt is pinned and creation dates
are stripped, so identical reports produce identical plot bytes.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
matplotlib.rcParams["svg.hashsalt"] = "runperf"

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)
import numpy as np


def save_roc_svg(roc: dict, path) -> None:
    fig, ax = plt.subplots(figsize=(5, 5))
    for curve in roc["curves"]:
        ax.plot(
            curve["fpr"],
            curve["tpr"],
            drawstyle="steps-post",
            label=f"class {curve['positive_label']} (AUC {curve['auc']:.3f})",
        )
    ax.plot([0, 1], [0, 1], linestyle="--", color="gray", linewidth=1)
    ax.set_xlabel("false positive rate")
    ax.set_ylabel("true positive rate")
    ax.set_xlim(-0.02, 1.02)
    ax.set_ylim(-0.02, 1.02)
    ax.legend(loc="lower right", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)


def save_confusion_svg(confusion, path) -> None:
    matrix = np.asarray(confusion, dtype=np.int64)
    C = matrix.shape[0]
    fig, ax = plt.subplots(figsize=(4.5, 4))
    im = ax.imshow(matrix, cmap="Blues")
    for i in range(C):
        for j in range(C):
            threshold = matrix.max() / 2 if matrix.max() > 0 else 0
            ax.text(
                j,
                i,
                str(int(matrix[i, j])),
                ha="center",
                va="center",
                color="white" if matrix[i, j] > threshold else "black",
                fontsize=9,
            )
    labels = [str(c) for c in range(1, C + 1)]
    ax.set_xticks(range(C), labels)
    ax.set_yticks(range(C), labels)
    ax.set_xlabel("predicted category")
    ax.set_ylabel("true category")
    fig.colorbar(im, ax=ax, shrink=0.8)
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
