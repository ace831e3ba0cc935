"""Exact minimum-cost one-to-one assignment for track/detection matching.

The solver is a dense shortest-augmenting-path variant (Jonker-Volgenant
style), O(n^3), compiled with numba when the JIT is enabled.  Gated pairs
are encoded by pre-setting their cost to ``GATED_COST``; they never appear
in the returned matches.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .._accel import njit

GATED_COST = 1e5


@dataclass(frozen=True)
class AssignmentResult:
    matches: list[tuple[int, int]]
    unmatched_tracks: list[int]
    unmatched_detections: list[int]


@njit(cache=True)
def _solve_lap(cost):
    """Column assignment for each row of an m x n cost matrix, m <= n."""
    m, n = cost.shape
    u = np.zeros(m + 1)
    v = np.zeros(n + 1)
    col_of = np.full(n + 1, -1, dtype=np.int64)
    for i in range(1, m + 1):
        links = np.zeros(n + 1, dtype=np.int64)
        minv = np.full(n + 1, np.inf)
        used = np.zeros(n + 1, dtype=np.bool_)
        j0 = 0
        col_of[0] = i
        while True:
            used[j0] = True
            i0 = col_of[j0]
            delta = np.inf
            j1 = -1
            for j in range(1, n + 1):
                if not used[j]:
                    cur = cost[i0 - 1, j - 1] - u[i0] - v[j]
                    if cur < minv[j]:
                        minv[j] = cur
                        links[j] = j0
                    if minv[j] < delta:
                        delta = minv[j]
                        j1 = j
            for j in range(n + 1):
                if used[j]:
                    u[col_of[j]] += delta
                    v[j] -= delta
                else:
                    minv[j] -= delta
            j0 = j1
            if col_of[j0] == -1:
                break
        while j0 != 0:
            j1 = links[j0]
            col_of[j0] = col_of[j1]
            j0 = j1
    row_to_col = np.full(m, -1, dtype=np.int64)
    for j in range(1, n + 1):
        if col_of[j] > 0:
            row_to_col[col_of[j] - 1] = j - 1
    return row_to_col


def solve(cost: np.ndarray) -> np.ndarray:
    """Minimum-cost pairing; returns col index per row (-1 for unpaired rows)."""
    cost = np.ascontiguousarray(cost, dtype=np.float64)
    if cost.ndim != 2:
        raise ValueError(f"cost must be a 2-D matrix, got shape {cost.shape}")
    m, n = cost.shape
    if m == 0 or n == 0:
        return np.full(m, -1, dtype=np.int64)
    if not np.all(np.isfinite(cost)):
        raise ValueError("cost matrix entries must be finite")
    if m <= n:
        return _solve_lap(cost)
    col_to_row = _solve_lap(np.ascontiguousarray(cost.T))
    row_to_col = np.full(m, -1, dtype=np.int64)
    for col, row in enumerate(col_to_row):
        row_to_col[row] = col
    return row_to_col


def assign(cost: np.ndarray, gated_cost: float = GATED_COST) -> AssignmentResult:
    """Optimally pair rows (tracks) with columns (detections).

    min(m, n) pairs are formed at globally minimum total cost; any pair
    whose entry reaches ``gated_cost`` is dropped back into the unmatched
    sets rather than reported as a match.
    """
    cost = np.asarray(cost, dtype=np.float64)
    m, n = cost.shape
    row_to_col = solve(cost)
    matches: list[tuple[int, int]] = []
    unmatched_tracks: list[int] = []
    matched_cols: set[int] = set()
    for row in range(m):
        col = int(row_to_col[row])
        if col >= 0 and cost[row, col] < gated_cost:
            matches.append((row, col))
            matched_cols.add(col)
        else:
            unmatched_tracks.append(row)
    unmatched_detections = [c for c in range(n) if c not in matched_cols]
    return AssignmentResult(matches, unmatched_tracks, unmatched_detections)
