"""Stratified k-fold splitting with deterministic tie-breaking."""

from __future__ import annotations

import numpy as np

from ..learners.base import make_rng


def stratified_kfold(labels, k: int, seed) -> list[np.ndarray]:
    """Partition indices into k folds with per-class counts within 1.

    Each class's indices are shuffled and dealt out: floor(n_c / k) to every
    fold, then the remainder one by one to whichever fold is currently
    smallest (lowest fold index on ties).  ``seed`` may be an integer or a
    numpy Generator.
    """
    labels = np.asarray(labels)
    if labels.ndim != 1:
        raise ValueError(f"labels must be 1-D, got shape {labels.shape}")
    if k < 2:
        raise ValueError(f"need at least 2 folds, got {k}")
    rng = seed if isinstance(seed, np.random.Generator) else make_rng(int(seed))

    classes = np.unique(labels)
    for c in classes:
        count = int(np.sum(labels == c))
        if count < k:
            raise ValueError(
                f"class {c} has {count} member(s); stratified {k}-fold needs at least {k}"
            )

    folds: list[list[int]] = [[] for _ in range(k)]
    for c in classes:
        idx = np.flatnonzero(labels == c)
        perm = rng.permutation(idx)
        base = len(idx) // k
        pos = 0
        for f in range(k):
            folds[f].extend(int(i) for i in perm[pos : pos + base])
            pos += base
        while pos < len(idx):
            sizes = [len(f) for f in folds]
            smallest = int(np.argmin(sizes))
            folds[smallest].append(int(perm[pos]))
            pos += 1
    return [np.array(sorted(f), dtype=np.int64) for f in folds]
