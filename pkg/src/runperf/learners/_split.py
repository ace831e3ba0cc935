"""Tree-growing kernels shared by the boosted ensemble and the tree baselines.

Trees are grown level by level over a fixed-size heap layout (root 0,
children 2i+1 / 2i+2) so one pass over presorted feature columns evaluates
every candidate split at the current depth.  Split search is exact greedy
over sorted values with midpoint thresholds; ties break toward the lowest
feature index, then the lowest threshold (features are scanned ascending
and thresholds ascending, with a strictly-greater gain test).

These loops are the training hot path; they compile under numba unless the
JIT switch in ``_accel`` is off, in which case the same code runs in plain
Python (see benchmarks/bench_kernels.py).
"""

from __future__ import annotations

import numpy as np

from .._accel import njit


def presort_features(X: np.ndarray) -> np.ndarray:
    """Stable per-feature argsort, shape (F, n); computed once per fit."""
    return np.ascontiguousarray(np.argsort(X, axis=0, kind="stable").T)


@njit(cache=True)
def grow_gradient_tree(X, sorted_idx, g, h, feat_candidates, max_depth, lam, min_samples_leaf):
    """Regression tree on gradient/hessian pairs with Newton leaf values.

    Gain for a split is the standard second-order objective reduction
    G_L^2/(H_L+lam) + G_R^2/(H_R+lam) - G^2/(H+lam); leaves get -G/(H+lam).
    Returns (feature, threshold, value) heap arrays; feature -1 marks a leaf.
    """
    n = X.shape[0]
    heap_size = 2 ** (max_depth + 1) - 1
    feature = np.full(heap_size, -1, dtype=np.int64)
    threshold = np.zeros(heap_size, dtype=np.float64)
    node_of = np.zeros(n, dtype=np.int64)

    for depth in range(max_depth):
        first = 2 ** depth - 1
        end = first + 2 ** depth
        g_node = np.zeros(heap_size, dtype=np.float64)
        h_node = np.zeros(heap_size, dtype=np.float64)
        cnt = np.zeros(heap_size, dtype=np.int64)
        for i in range(n):
            nd = node_of[i]
            if first <= nd < end:
                g_node[nd] += g[i]
                h_node[nd] += h[i]
                cnt[nd] += 1
        # zero-gain ties are accepted (XOR-style symmetry needs the split to
        # expose structure one level deeper); negative gains never split
        best_gain = np.full(heap_size, -1e-12, dtype=np.float64)
        best_feat = np.full(heap_size, -1, dtype=np.int64)
        best_thr = np.zeros(heap_size, dtype=np.float64)
        g_left = np.zeros(heap_size, dtype=np.float64)
        h_left = np.zeros(heap_size, dtype=np.float64)
        cnt_left = np.zeros(heap_size, dtype=np.int64)
        last_x = np.zeros(heap_size, dtype=np.float64)
        for fi in range(feat_candidates.shape[0]):
            f = feat_candidates[fi]
            for nd in range(first, end):
                g_left[nd] = 0.0
                h_left[nd] = 0.0
                cnt_left[nd] = 0
            for k in range(n):
                i = sorted_idx[f, k]
                nd = node_of[i]
                if nd < first or nd >= end or cnt[nd] < 2:
                    continue
                x = X[i, f]
                if cnt_left[nd] > 0 and x > last_x[nd]:
                    thr = 0.5 * (last_x[nd] + x)
                    if thr < x:  # rounding may collapse the midpoint onto x
                        nl = cnt_left[nd]
                        nr = cnt[nd] - nl
                        if nl >= min_samples_leaf and nr >= min_samples_leaf:
                            gl = g_left[nd]
                            hl = h_left[nd]
                            gr = g_node[nd] - gl
                            hr = h_node[nd] - hl
                            gain = (
                                gl * gl / (hl + lam)
                                + gr * gr / (hr + lam)
                                - g_node[nd] * g_node[nd] / (h_node[nd] + lam)
                            )
                            if gain > best_gain[nd]:
                                best_gain[nd] = gain
                                best_feat[nd] = f
                                best_thr[nd] = thr
                g_left[nd] += g[i]
                h_left[nd] += h[i]
                cnt_left[nd] += 1
                last_x[nd] = x
        any_split = False
        for nd in range(first, end):
            if best_feat[nd] >= 0:
                feature[nd] = best_feat[nd]
                threshold[nd] = best_thr[nd]
                any_split = True
        if not any_split:
            break
        for i in range(n):
            nd = node_of[i]
            if first <= nd < end and feature[nd] >= 0:
                if X[i, feature[nd]] <= threshold[nd]:
                    node_of[i] = 2 * nd + 1
                else:
                    node_of[i] = 2 * nd + 2

    value = np.zeros(heap_size, dtype=np.float64)
    g_leaf = np.zeros(heap_size, dtype=np.float64)
    h_leaf = np.zeros(heap_size, dtype=np.float64)
    occupied = np.zeros(heap_size, dtype=np.int64)
    for i in range(n):
        nd = node_of[i]
        g_leaf[nd] += g[i]
        h_leaf[nd] += h[i]
        occupied[nd] = 1
    for nd in range(heap_size):
        if feature[nd] == -1 and occupied[nd] == 1:
            value[nd] = -g_leaf[nd] / (h_leaf[nd] + lam)
    return feature, threshold, value


@njit(cache=True)
def grow_gini_tree(X, sorted_idx, y0, n_classes, feat_candidates, max_depth, min_samples_leaf):
    """Classification tree by greedy Gini impurity decrease.

    Gain uses the equivalent score sum(c_k^2)/n per side (larger is purer),
    so gain = score_L + score_R - score_parent.  Returns (feature,
    threshold, counts) where counts[(node, class)] holds leaf class counts.
    """
    n = X.shape[0]
    heap_size = 2 ** (max_depth + 1) - 1
    feature = np.full(heap_size, -1, dtype=np.int64)
    threshold = np.zeros(heap_size, dtype=np.float64)
    node_of = np.zeros(n, dtype=np.int64)

    for depth in range(max_depth):
        first = 2 ** depth - 1
        end = first + 2 ** depth
        cls = np.zeros((heap_size, n_classes), dtype=np.float64)
        cnt = np.zeros(heap_size, dtype=np.int64)
        for i in range(n):
            nd = node_of[i]
            if first <= nd < end:
                cls[nd, y0[i]] += 1.0
                cnt[nd] += 1
        parent_score = np.zeros(heap_size, dtype=np.float64)
        pure = np.zeros(heap_size, dtype=np.int64)
        for nd in range(first, end):
            if cnt[nd] > 0:
                s = 0.0
                present = 0
                for c in range(n_classes):
                    s += cls[nd, c] * cls[nd, c]
                    if cls[nd, c] > 0:
                        present += 1
                parent_score[nd] = s / cnt[nd]
                if present <= 1:
                    pure[nd] = 1
        best_gain = np.full(heap_size, -1e-12, dtype=np.float64)
        best_feat = np.full(heap_size, -1, dtype=np.int64)
        best_thr = np.zeros(heap_size, dtype=np.float64)
        cls_left = np.zeros((heap_size, n_classes), dtype=np.float64)
        cnt_left = np.zeros(heap_size, dtype=np.int64)
        last_x = np.zeros(heap_size, dtype=np.float64)
        for fi in range(feat_candidates.shape[0]):
            f = feat_candidates[fi]
            for nd in range(first, end):
                cnt_left[nd] = 0
                for c in range(n_classes):
                    cls_left[nd, c] = 0.0
            for k in range(n):
                i = sorted_idx[f, k]
                nd = node_of[i]
                if nd < first or nd >= end or cnt[nd] < 2 or pure[nd] == 1:
                    continue
                x = X[i, f]
                if cnt_left[nd] > 0 and x > last_x[nd]:
                    thr = 0.5 * (last_x[nd] + x)
                    if thr < x:
                        nl = cnt_left[nd]
                        nr = cnt[nd] - nl
                        if nl >= min_samples_leaf and nr >= min_samples_leaf:
                            sl = 0.0
                            sr = 0.0
                            for c in range(n_classes):
                                left_c = cls_left[nd, c]
                                right_c = cls[nd, c] - left_c
                                sl += left_c * left_c
                                sr += right_c * right_c
                            gain = sl / nl + sr / nr - parent_score[nd]
                            if gain > best_gain[nd]:
                                best_gain[nd] = gain
                                best_feat[nd] = f
                                best_thr[nd] = thr
                cls_left[nd, y0[i]] += 1.0
                cnt_left[nd] += 1
                last_x[nd] = x
        any_split = False
        for nd in range(first, end):
            if best_feat[nd] >= 0:
                feature[nd] = best_feat[nd]
                threshold[nd] = best_thr[nd]
                any_split = True
        if not any_split:
            break
        for i in range(n):
            nd = node_of[i]
            if first <= nd < end and feature[nd] >= 0:
                if X[i, feature[nd]] <= threshold[nd]:
                    node_of[i] = 2 * nd + 1
                else:
                    node_of[i] = 2 * nd + 2

    counts = np.zeros((heap_size, n_classes), dtype=np.float64)
    for i in range(n):
        counts[node_of[i], y0[i]] += 1.0
    return feature, threshold, counts


@njit(cache=True)
def apply_tree(X, feature, threshold):
    """Leaf heap index for every row of X."""
    n = X.shape[0]
    out = np.zeros(n, dtype=np.int64)
    for i in range(n):
        nd = 0
        while feature[nd] >= 0:
            if X[i, feature[nd]] <= threshold[nd]:
                nd = 2 * nd + 1
            else:
                nd = 2 * nd + 2
        out[i] = nd
    return out
